// Copyright 2026 The imlsbm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IMLSBM_REFINE_HPP_
#define IMLSBM_REFINE_HPP_

// Node-wise MAP refinement.  For node i the log-posterior over
// (s_star, s_1, ..., s_L) splits into per-layer terms
//
//   f_i^l(s_star, s_l) = log((1-rho)/rho) 1{s_l = s_star}
//                        + sum_{j != i, z_j = s_l} [lambda_l A^l_ij + mu_l]
//
// with lambda_l = log(p(1-q) / (q(1-p))) and mu_l = log((1-p)/(1-q)).  For a
// fixed s_star each layer is maximized on its own, so one node costs O(L)
// plus its degree.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "imlsbm/error.hpp"
#include "imlsbm/model.hpp"
#include "imlsbm/parallel.hpp"
#include "imlsbm/spectral.hpp"

namespace imlsbm {

inline constexpr double kProbabilityGuard = 1e-12;

enum class RefineMode { kGeneric, kProvable };

struct RefineConfig {
  double rho_input = 0.0;
  double rho_floor = 1e-8;
  std::vector<double> p;
  std::vector<double> q;
  RefineMode mode = RefineMode::kGeneric;
  int jobs = 1;

  void validate(std::size_t L) const {
    detail::require(p.size() == L && q.size() == L,
                    "refinement needs one (p, q) pair per layer");
    detail::require(rho_input >= 0.0 && rho_input < 0.5,
                    "rho_input must lie in [0, 1/2)");
    detail::require(rho_floor > 0.0 && rho_floor < 0.5,
                    "rho_floor must lie in (0, 1/2)");
    for (std::size_t l = 0; l < L; ++l) {
      detail::require(p[l] > q[l], "refinement needs p > q in every layer");
    }
  }

  // At or below the floor the regularizer forces s_l = s_star and the node
  // update is the pure likelihood maximization over s_star.
  bool likelihood_only() const noexcept { return rho_input <= rho_floor; }

  double effective_rho() const noexcept {
    return std::max(rho_input, rho_floor);
  }
};

struct LayerCoefficients {
  double lambda = 0.0;  // weight of an observed edge
  double mu = 0.0;      // weight of every same-label pair
};

inline LayerCoefficients layer_coefficients(double p, double q) {
  const double pc = std::min(p, 1.0 - kProbabilityGuard);
  const double qc = std::max(q, kProbabilityGuard);
  return {std::log(pc * (1.0 - qc) / (qc * (1.0 - pc))),
          std::log((1.0 - pc) / (1.0 - qc))};
}

struct DetectionResult {
  Assignment z_star_hat;
  std::vector<Assignment> z_layer_hat;
  // Row i: column 0 holds the achieved total, column l + 1 the layer term.
  Eigen::MatrixXd per_node_scores;
  bool aligned = true;
  std::vector<std::uint8_t> alignment_ties;  // provable mode only
};

struct NodeRefinement {
  int s_star = 1;
  std::vector<int> s_layers;
  double total = 0.0;
  std::vector<double> layer_values;
};

namespace detail {

// Precomputed per-call state shared by all nodes.
class NodeRefiner {
 public:
  NodeRefiner(const MultilayerGraph& graph, const RefineConfig& config)
      : graph_(graph), config_(config) {
    config.validate(graph.num_layers());
    coefficients_.reserve(graph.num_layers());
    for (std::size_t l = 0; l < graph.num_layers(); ++l) {
      coefficients_.push_back(layer_coefficients(config.p[l], config.q[l]));
    }
    const double rho = config.effective_rho();
    regularizer_ = std::log((1.0 - rho) / rho);
  }

  double regularizer() const noexcept { return regularizer_; }

  // Evidence sum_{j != i, z_j = s} [lambda A_ij + mu]; labels[i] is ignored.
  double evidence(std::size_t i, std::size_t l, int s,
                  std::span<const int> labels, std::size_t same_count) const {
    std::size_t linked = 0;
    for (std::uint32_t j : graph_.neighbors(l, i)) linked += labels[j] == s;
    const LayerCoefficients& c = coefficients_[l];
    return c.lambda * static_cast<double>(linked) +
           c.mu * static_cast<double>(same_count);
  }

  // plus_count: number of j != i with labels[j] == +1.
  NodeRefinement refine(std::size_t i, std::span<const int> labels,
                        std::size_t plus_count) const {
    const std::size_t L = graph_.num_layers();
    const std::size_t n = graph_.n();
    const std::size_t minus_count = n - 1 - plus_count;
    std::vector<std::array<double, 2>> ev(L);  // [0]: s = +1, [1]: s = -1
    for (std::size_t l = 0; l < L; ++l) {
      std::size_t linked_plus = 0;
      std::size_t linked_minus = 0;
      for (std::uint32_t j : graph_.neighbors(l, i)) {
        if (labels[j] == 1) {
          ++linked_plus;
        } else {
          ++linked_minus;
        }
      }
      const LayerCoefficients& c = coefficients_[l];
      ev[l][0] = c.lambda * static_cast<double>(linked_plus) +
                 c.mu * static_cast<double>(plus_count);
      ev[l][1] = c.lambda * static_cast<double>(linked_minus) +
                 c.mu * static_cast<double>(minus_count);
    }
    auto idx = [](int s) { return s == 1 ? 0 : 1; };

    std::array<double, 2> totals{};
    std::array<std::vector<int>, 2> choices;
    for (int s_star : {1, -1}) {
      auto& choice = choices[idx(s_star)];
      choice.resize(L);
      double total = 0.0;
      for (std::size_t l = 0; l < L; ++l) {
        const double agree = regularizer_ + ev[l][idx(s_star)];
        const double disagree = ev[l][idx(-s_star)];
        if (!config_.likelihood_only() && disagree > agree) {
          choice[l] = -s_star;
          total += disagree;
        } else {
          choice[l] = s_star;
          total += agree;
        }
      }
      totals[idx(s_star)] = total;
    }
    NodeRefinement out;
    out.s_star = totals[1] > totals[0] ? -1 : 1;
    out.s_layers = std::move(choices[idx(out.s_star)]);
    out.total = totals[idx(out.s_star)];
    out.layer_values.resize(L);
    for (std::size_t l = 0; l < L; ++l) {
      const int s = out.s_layers[l];
      out.layer_values[l] =
          (s == out.s_star ? regularizer_ : 0.0) + ev[l][idx(s)];
    }
    return out;
  }

 private:
  const MultilayerGraph& graph_;
  const RefineConfig& config_;
  std::vector<LayerCoefficients> coefficients_;
  double regularizer_ = 0.0;
};

inline std::size_t plus_count_excluding(std::span<const int> labels,
                                        std::size_t i) {
  std::size_t count = 0;
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (j != i && labels[j] == 1) ++count;
  }
  return count;
}

}  // namespace detail

// f_i^l(s_star, s_l, z_tilde) with rho clamped to max(rho_input, rho_floor).
inline double map_objective(std::size_t i, std::size_t l, int s_star,
                            int s_l, const Assignment& z_tilde,
                            const MultilayerGraph& graph,
                            const RefineConfig& config) {
  detail::require(z_tilde.size() == graph.n(), "z_tilde must have length n");
  detail::require(i < graph.n() && l < graph.num_layers(),
                  "node or layer out of range");
  detail::require((s_star == 1 || s_star == -1) && (s_l == 1 || s_l == -1),
                  "signs must be +1 or -1");
  detail::NodeRefiner refiner(graph, config);
  const std::size_t plus = detail::plus_count_excluding(z_tilde.labels(), i);
  const std::size_t same = s_l == 1 ? plus : graph.n() - 1 - plus;
  return (s_l == s_star ? refiner.regularizer() : 0.0) +
         refiner.evidence(i, l, s_l, z_tilde.labels(), same);
}

// Joint maximizer of sum_l f_i^l over (s_star, s_1..s_L).  Ties go to
// s_star = +1 and s_l = s_star.
inline NodeRefinement refine_node(std::size_t i, const Assignment& z_tilde,
                                  const MultilayerGraph& graph,
                                  const RefineConfig& config) {
  detail::require(z_tilde.size() == graph.n(), "z_tilde must have length n");
  detail::require(i < graph.n(), "node out of range");
  detail::NodeRefiner refiner(graph, config);
  return refiner.refine(i, z_tilde.labels(),
                        detail::plus_count_excluding(z_tilde.labels(), i));
}

// One refinement pass of every node against the fixed initial labels.
inline DetectionResult refine_generic(const Assignment& z_init,
                                      const MultilayerGraph& graph,
                                      const RefineConfig& config) {
  const std::size_t n = graph.n();
  const std::size_t L = graph.num_layers();
  detail::require(z_init.size() == n, "z_init must have length n");
  detail::NodeRefiner refiner(graph, config);
  const std::size_t plus_total = z_init.count_plus();
  std::vector<NodeRefinement> nodes(n);
  parallel_for(n, config.jobs, [&](std::size_t i) {
    const std::size_t plus = plus_total - (z_init[i] == 1 ? 1 : 0);
    nodes[i] = refiner.refine(i, z_init.labels(), plus);
  });

  DetectionResult result;
  std::vector<int> global(n);
  std::vector<std::vector<int>> layers(L, std::vector<int>(n));
  result.per_node_scores.resize(static_cast<Eigen::Index>(n),
                                static_cast<Eigen::Index>(L + 1));
  for (std::size_t i = 0; i < n; ++i) {
    global[i] = nodes[i].s_star;
    result.per_node_scores(i, 0) = nodes[i].total;
    for (std::size_t l = 0; l < L; ++l) {
      layers[l][i] = nodes[i].s_layers[l];
      result.per_node_scores(i, l + 1) = nodes[i].layer_values[l];
    }
  }
  result.z_star_hat = Assignment(std::move(global));
  for (auto& labels : layers) result.z_layer_hat.emplace_back(std::move(labels));
  return result;
}

// Leave-one-out initializer: returns labels for all n nodes computed without
// node i; the entry at i is ignored.
using LeaveOneOutInit = std::function<std::vector<int>(std::size_t i)>;

// Refinement with leave-one-out initial labels followed by alignment of all
// orientations against the solution for node 0.
inline DetectionResult refine_provable(const MultilayerGraph& graph,
                                       const RefineConfig& config,
                                       const LeaveOneOutInit& init_fn) {
  const std::size_t n = graph.n();
  const std::size_t L = graph.num_layers();
  detail::require(n >= 3, "leave-one-out refinement needs n >= 3");
  detail::NodeRefiner refiner(graph, config);

  // Stage I and II: row i of `initial` is the init without node i; `nodes`
  // holds the refined (unaligned) values for node i.
  std::vector<std::vector<int>> initial(n);
  std::vector<NodeRefinement> nodes(n);
  parallel_for(n, config.jobs, [&](std::size_t i) {
    std::vector<int> labels = init_fn(i);
    detail::require(labels.size() == n,
                    "leave-one-out initializer returned wrong length");
    labels[i] = 1;
    for (std::size_t j = 0; j < n; ++j) {
      detail::require(j == i || labels[j] == 1 || labels[j] == -1,
                      "leave-one-out initializer returned a non-sign label");
    }
    nodes[i] = refiner.refine(i, labels,
                              detail::plus_count_excluding(labels, i));
    labels[i] = nodes[i].s_star;
    initial[i] = std::move(labels);
  });

  // Stage III.  The reference R is the node-0 vector with slot 0 refined.
  DetectionResult result;
  result.alignment_ties.assign(n, 0);
  std::vector<int> global(n);
  std::vector<std::vector<int>> layers(L, std::vector<int>(n));
  const std::vector<int>& ref = initial[0];
  global[0] = nodes[0].s_star;
  for (std::size_t l = 0; l < L; ++l) layers[l][0] = nodes[0].s_layers[l];
  auto idx = [](int s) { return s == 1 ? 0 : 1; };

  // overlap(s) = #{j : R_j = s and V_j = v}, split as the bulk j not in
  // {0, i} plus the two special slots whose values differ per layer.
  auto align = [&](const std::array<std::array<std::size_t, 2>, 2>& bulk,
                   int r0, int v0, int ri, int v, bool& tie) {
    std::array<std::size_t, 2> overlap{};
    for (int s : {1, -1}) {
      overlap[idx(s)] = bulk[idx(s)][idx(v)] +
                        static_cast<std::size_t>(r0 == s && v0 == v) +
                        static_cast<std::size_t>(ri == s);
    }
    tie = overlap[0] == overlap[1];
    return overlap[1] > overlap[0] ? -1 : 1;
  };

  for (std::size_t i = 1; i < n; ++i) {
    const std::vector<int>& v = initial[i];
    std::array<std::array<std::size_t, 2>, 2> bulk{};
    for (std::size_t j = 1; j < n; ++j) {
      if (j != i) ++bulk[idx(ref[j])][idx(v[j])];
    }
    bool tie = false;
    bool any_tie = false;
    global[i] = align(bulk, ref[0], v[0], ref[i], nodes[i].s_star, tie);
    any_tie |= tie;
    for (std::size_t l = 0; l < L; ++l) {
      layers[l][i] = align(bulk, nodes[0].s_layers[l], v[0], ref[i],
                           nodes[i].s_layers[l], tie);
      any_tie |= tie;
    }
    if (any_tie) {
      result.alignment_ties[i] = 1;
      result.aligned = false;
    }
  }

  result.per_node_scores.resize(static_cast<Eigen::Index>(n),
                                static_cast<Eigen::Index>(L + 1));
  for (std::size_t i = 0; i < n; ++i) {
    result.per_node_scores(i, 0) = nodes[i].total;
    for (std::size_t l = 0; l < L; ++l) {
      result.per_node_scores(i, l + 1) = nodes[i].layer_values[l];
    }
  }
  result.z_star_hat = Assignment(std::move(global));
  for (auto& labels : layers) result.z_layer_hat.emplace_back(std::move(labels));
  return result;
}

// Spectral leave-one-out initializer: the aggregated matrix with row and
// column i removed, trimmed against (n - 1) * gamma * sum_l w_l p_l, embedded
// and clustered.  The eigen solver is warm-started from the full-graph
// embedding restricted to the remaining nodes.
class SpectralLeaveOneOut {
 public:
  SpectralLeaveOneOut(const MultilayerGraph& graph, WeightVector omega,
                      std::vector<double> p, SpectralOptions options)
      : omega_(std::move(omega)),
        p_(std::move(p)),
        options_(options),
        bar_(weighted_adjacency(graph, omega_)) {
    const TrimResult full = trim(bar_, omega_, p_, options_.gamma);
    EigenOptions eig;
    eig.tol = options_.tol;
    eig.max_iter = options_.max_iter;
    eig.seed = options_.seed;
    // The warm start only needs a good subspace; a loose solve suffices and
    // never fails the caller.
    eig.tol = std::max(options_.tol, 1e-4);
    try {
      warm_ = top2_eigenpairs(full.matrix, eig).U;
    } catch (const ConvergenceError&) {
      warm_.resize(0, 0);
    }
  }

  std::vector<int> operator()(std::size_t i) const {
    const auto n = bar_.rows();
    const auto k = static_cast<Eigen::Index>(i);
    Eigen::MatrixXd sub(n - 1, n - 1);
    sub.topLeftCorner(k, k) = bar_.topLeftCorner(k, k);
    sub.topRightCorner(k, n - 1 - k) = bar_.topRightCorner(k, n - 1 - k);
    sub.bottomLeftCorner(n - 1 - k, k) = bar_.bottomLeftCorner(n - 1 - k, k);
    sub.bottomRightCorner(n - 1 - k, n - 1 - k) =
        bar_.bottomRightCorner(n - 1 - k, n - 1 - k);
    SpectralOptions options = options_;
    options.seed = stream_seed(options_.seed, StreamTag::kLeaveOneOut, i);
    const Eigen::MatrixXd* start = nullptr;
    Eigen::MatrixXd warm;
    if (warm_.rows() == n) {
      warm.resize(n - 1, 2);
      warm.topRows(k) = warm_.topRows(k);
      warm.bottomRows(n - 1 - k) = warm_.bottomRows(n - 1 - k);
      start = &warm;
    }
    const SpectralInitResult init =
        spectral_initialize_matrix(sub, omega_, p_, options, start);
    std::vector<int> labels(static_cast<std::size_t>(n), 1);
    for (Eigen::Index j = 0, r = 0; j < n; ++j) {
      if (j == k) continue;
      labels[static_cast<std::size_t>(j)] = init.assignment[r++];
    }
    return labels;
  }

 private:
  WeightVector omega_;
  std::vector<double> p_;
  SpectralOptions options_;
  Eigen::MatrixXd bar_;
  Eigen::MatrixXd warm_;
};

}  // namespace imlsbm

#endif  // IMLSBM_REFINE_HPP_
