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

#ifndef IMLSBM_BASELINE_HPP_
#define IMLSBM_BASELINE_HPP_

// Co-regularized spectral clustering baseline.  Alternating maximization of
//
//   sum_l tr(U_l' A_l U_l) + gamma_l tr(U*' U_l U_l' U*)
//
// over orthonormal n x 2 blocks: each U_l is the top-2 eigenspace of
// A_l + gamma_l U* U*', then U* is the top-2 eigenspace of
// sum_l gamma_l U_l U_l'.  2-means on U* gives the global labels and
// 2-means on each U_l the per-layer labels (the per-layer read-out is an
// extension; the original method only reads U*).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "imlsbm/eigen_solver.hpp"
#include "imlsbm/error.hpp"
#include "imlsbm/kmeans.hpp"
#include "imlsbm/model.hpp"
#include "imlsbm/parallel.hpp"
#include "imlsbm/random.hpp"
#include "imlsbm/refine.hpp"

namespace imlsbm {

enum class CoRegGammaMode { kSpectralNorm, kFixed };

struct CoRegConfig {
  int max_iters = 20;
  CoRegGammaMode gamma_mode = CoRegGammaMode::kSpectralNorm;
  double fixed_gamma = 1.0;
  double tol = 1e-8;  // relative objective improvement that ends the loop
  int restarts = 10;
  std::uint64_t seed = 0;
  double eig_tol = 1e-8;
  int eig_max_iter = 10000;
  int jobs = 1;
};

struct CoRegResult {
  DetectionResult detection;
  std::vector<double> objective_trace;  // after each full iteration
  std::vector<double> gammas;
  int iterations = 0;
  Eigen::MatrixXd u_star;
  std::vector<Eigen::MatrixXd> u_layers;
};

namespace detail {

inline void apply_layer(const MultilayerGraph& graph, std::size_t l,
                        const Eigen::MatrixXd& X, Eigen::MatrixXd& Y) {
  Y.setZero(X.rows(), X.cols());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (std::uint32_t j : graph.neighbors(l, static_cast<std::size_t>(i))) {
      Y.row(i) += X.row(j);
    }
  }
}

}  // namespace detail

// ||A_l||_2 by power iteration on A_l^2 from the all-ones vector; the
// Rayleigh quotient of A^2 increases monotonically to lambda_max^2.
inline double layer_spectral_norm(const MultilayerGraph& graph, std::size_t l,
                                  double tol = 1e-12, int max_iter = 10000) {
  const auto n = static_cast<Eigen::Index>(graph.n());
  if (graph.edge_count(l) == 0) return 0.0;
  Eigen::MatrixXd x = Eigen::MatrixXd::Constant(n, 1, 1.0 / std::sqrt(n));
  Eigen::MatrixXd y(n, 1);
  Eigen::MatrixXd z(n, 1);
  double estimate = 0.0;
  for (int iter = 0; iter < max_iter; ++iter) {
    detail::apply_layer(graph, l, x, y);
    const double next = y.norm();
    detail::apply_layer(graph, l, y, z);
    const double zn = z.norm();
    if (zn == 0.0) return next;
    x = z / zn;
    if (std::abs(next - estimate) <= tol * next) return next;
    estimate = next;
  }
  throw ConvergenceError("power iteration for the layer norm did not converge",
                         estimate);
}

namespace detail {

// Top-2 algebraic eigenvectors of A_l + gamma U U'.
//
// Sparse layers: range(A_l + gamma U U') lies in span{e_v : v touches an
// edge} + span(U), so the problem is solved exactly on that subspace.
// Dense layers: subspace iteration on the PSD shift A_l + gamma U U' +
// norm(A_l) I, warm-started from the previous iterate.
inline Eigen::MatrixXd coreg_layer_update(const MultilayerGraph& graph,
                                          std::size_t l, double gamma,
                                          double layer_norm,
                                          const Eigen::MatrixXd& u_star,
                                          const Eigen::MatrixXd& warm,
                                          const CoRegConfig& config) {
  const std::size_t n = graph.n();
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < n; ++i) {
    if (graph.degree(l, i) > 0) support.push_back(i);
  }
  if (2 * support.size() <= n) {
    const auto s = static_cast<Eigen::Index>(support.size());
    Eigen::MatrixXd complement = u_star;
    for (std::size_t v : support) complement.row(v).setZero();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(complement);
    qr.setThreshold(1e-10);
    const Eigen::Index r = qr.rank();
    Eigen::MatrixXd W = (qr.householderQ() *
                         Eigen::MatrixXd::Identity(complement.rows(), 2))
                            .leftCols(r);
    const Eigen::Index k = s + r;
    if (k >= 2) {
      std::vector<Eigen::Index> local(n, -1);
      for (Eigen::Index a = 0; a < s; ++a) local[support[a]] = a;
      Eigen::MatrixXd H = Eigen::MatrixXd::Zero(k, k);
      for (Eigen::Index a = 0; a < s; ++a) {
        for (std::uint32_t j : graph.neighbors(l, support[a])) {
          H(a, local[j]) += 1.0;
        }
      }
      Eigen::MatrixXd B(k, 2);
      for (Eigen::Index a = 0; a < s; ++a) B.row(a) = u_star.row(support[a]);
      if (r > 0) B.bottomRows(r) = W.transpose() * complement;
      H += gamma * B * B.transpose();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H);
      // Eigenvalues ascend; the last two columns are the top pair.
      Eigen::MatrixXd Y(k, 2);
      Y.col(0) = eig.eigenvectors().col(k - 1);
      Y.col(1) = eig.eigenvectors().col(k - 2);
      Eigen::MatrixXd U = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), 2);
      for (Eigen::Index a = 0; a < s; ++a) U.row(support[a]) = Y.row(a);
      if (r > 0) U += W * Y.bottomRows(r);
      return U;
    }
  }
  const double shift = layer_norm;
  Eigen::MatrixXd AU(static_cast<Eigen::Index>(n), 2);
  apply_layer(graph, l, u_star, AU);
  const double trace_term = (u_star.transpose() * AU).trace();
  const double frob_sq = 2.0 * static_cast<double>(graph.edge_count(l)) +
                         2.0 * gamma * gamma + 2.0 * gamma * trace_term;
  EigenOptions options;
  options.tol = config.eig_tol;
  options.max_iter = config.eig_max_iter;
  options.seed = stream_seed(config.seed, StreamTag::kCoReg, l);
  options.order = EigenOrder::kMagnitude;
  Eigen::MatrixXd AX;
  const SpectralEmbedding emb = top2_eigenpairs_operator(
      n,
      [&](const Eigen::MatrixXd& X, Eigen::MatrixXd& Y) {
        apply_layer(graph, l, X, AX);
        Y = AX + gamma * (u_star * (u_star.transpose() * X)) + shift * X;
      },
      std::sqrt(std::max(frob_sq, 0.0)), options,
      warm.rows() == static_cast<Eigen::Index>(n) ? &warm : nullptr);
  return emb.U;
}

// Top-2 eigenvectors of sum_l gamma_l U_l U_l' = C C' with
// C = [sqrt(gamma_1) U_1, ..., sqrt(gamma_L) U_L], via the 2L x 2L Gram
// matrix C' C.
inline Eigen::MatrixXd coreg_consensus_update(
    const std::vector<Eigen::MatrixXd>& layers,
    const std::vector<double>& gammas, const Eigen::MatrixXd& previous) {
  const Eigen::Index n = previous.rows();
  std::vector<Eigen::Index> active;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (gammas[l] > 0.0) active.push_back(static_cast<Eigen::Index>(l));
  }
  if (active.empty()) return previous;
  Eigen::MatrixXd C(n, 2 * static_cast<Eigen::Index>(active.size()));
  for (std::size_t a = 0; a < active.size(); ++a) {
    C.middleCols(2 * static_cast<Eigen::Index>(a), 2) =
        std::sqrt(gammas[active[a]]) * layers[active[a]];
  }
  const Eigen::MatrixXd gram = C.transpose() * C;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const Eigen::Index k = gram.rows();
  Eigen::MatrixXd U(n, 2);
  for (int c = 0; c < 2; ++c) {
    const double value = eig.eigenvalues()(k - 1 - c);
    if (value <= 0.0) return previous;
    U.col(c) = C * eig.eigenvectors().col(k - 1 - c) / std::sqrt(value);
  }
  return detail::orthonormalize(U);
}

inline double coreg_objective(const MultilayerGraph& graph,
                              const std::vector<Eigen::MatrixXd>& layers,
                              const std::vector<double>& gammas,
                              const Eigen::MatrixXd& u_star) {
  double total = 0.0;
  Eigen::MatrixXd AU;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    apply_layer(graph, l, layers[l], AU);
    total += (layers[l].transpose() * AU).trace();
    total += gammas[l] * (u_star.transpose() * layers[l]).squaredNorm();
  }
  return total;
}

}  // namespace detail

inline CoRegResult coreg_cluster(const MultilayerGraph& graph,
                                 const CoRegConfig& config = {}) {
  detail::require(config.max_iters >= 1, "max_iters must be at least 1");
  const std::size_t n = graph.n();
  const std::size_t L = graph.num_layers();
  detail::require(n >= 2 && L >= 1, "co-regularization needs n >= 2, L >= 1");
  CoRegResult result;

  std::vector<double> norms(L);
  for (std::size_t l = 0; l < L; ++l) {
    norms[l] = layer_spectral_norm(graph, l);
  }
  result.gammas = config.gamma_mode == CoRegGammaMode::kSpectralNorm
                      ? norms
                      : std::vector<double>(L, config.fixed_gamma);

  // Consensus start: top-2 eigenvectors of the unweighted layer sum.
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::uint32_t j : graph.neighbors(l, i)) sum(i, j) += 1.0;
    }
  }
  double total_norm = 0.0;
  for (double v : norms) total_norm += v;
  EigenOptions start_options;
  start_options.tol = config.eig_tol;
  start_options.max_iter = config.eig_max_iter;
  start_options.seed = stream_seed(config.seed, StreamTag::kCoReg, L);
  const Eigen::MatrixXd shifted =
      sum + total_norm * Eigen::MatrixXd::Identity(sum.rows(), sum.cols());
  Eigen::MatrixXd u_star = top2_eigenpairs(shifted, start_options).U;

  std::vector<Eigen::MatrixXd> layers(L);
  double previous = -std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= config.max_iters; ++iter) {
    parallel_for(L, config.jobs, [&](std::size_t l) {
      layers[l] = detail::coreg_layer_update(graph, l, result.gammas[l],
                                             norms[l], u_star, layers[l],
                                             config);
    });
    u_star = detail::coreg_consensus_update(layers, result.gammas, u_star);
    const double objective =
        detail::coreg_objective(graph, layers, result.gammas, u_star);
    result.objective_trace.push_back(objective);
    result.iterations = iter;
    if (iter > 1 &&
        objective - previous < config.tol * std::max(1.0, std::abs(objective))) {
      break;
    }
    previous = objective;
  }

  KMeansOptions km;
  km.restarts = config.restarts;
  km.seed = config.seed;
  DetectionResult& detection = result.detection;
  detection.z_star_hat = approx_kmeans2(u_star, km).assignment;
  detection.z_layer_hat.resize(L);
  parallel_for(L, config.jobs, [&](std::size_t l) {
    detection.z_layer_hat[l] = approx_kmeans2(layers[l], km).assignment;
  });
  detection.per_node_scores.resize(0, 0);
  result.u_star = std::move(u_star);
  result.u_layers = std::move(layers);
  return result;
}

}  // namespace imlsbm

#endif  // IMLSBM_BASELINE_HPP_
