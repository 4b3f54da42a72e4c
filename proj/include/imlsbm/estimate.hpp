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

#ifndef IMLSBM_ESTIMATE_HPP_
#define IMLSBM_ESTIMATE_HPP_

// Plug-in estimates of the per-layer connection probabilities.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "imlsbm/error.hpp"
#include "imlsbm/model.hpp"

namespace imlsbm {

inline constexpr double kEstimateClip = 1e-12;

struct ProbEstimates {
  std::vector<double> p_hat;
  std::vector<double> q_hat;
  // Filled only by marginal_blend() from known parameters.
  std::vector<double> tilde_p;
  std::vector<double> tilde_q;
  std::vector<std::uint8_t> swapped;  // p_hat < q_hat was swapped
  std::vector<std::uint8_t> tied;     // p_hat == q_hat was separated
  bool fallback = false;              // a cluster had fewer than 2 nodes
};

inline double clip_probability(double x) {
  return std::clamp(x, kEstimateClip, 1.0 - kEstimateClip);
}

// p_hat_l = 2 |E_l| / (n^2 / 2 - n), an overestimate of the within-block
// probability for balanced blocks.
inline std::vector<double> moment_p_hat(const MultilayerGraph& graph) {
  detail::require(graph.n() >= 3, "moment estimator needs n >= 3");
  const double n = static_cast<double>(graph.n());
  const double denom = 0.5 * n * n - n;
  std::vector<double> p_hat(graph.num_layers());
  for (std::size_t l = 0; l < graph.num_layers(); ++l) {
    p_hat[l] = clip_probability(
        2.0 * static_cast<double>(graph.edge_count(l)) / denom);
  }
  return p_hat;
}

namespace detail {

// Enforces p_hat > q_hat.
inline void order_estimates(ProbEstimates& est) {
  const std::size_t L = est.p_hat.size();
  est.swapped.assign(L, 0);
  est.tied.assign(L, 0);
  for (std::size_t l = 0; l < L; ++l) {
    if (est.p_hat[l] < est.q_hat[l]) {
      std::swap(est.p_hat[l], est.q_hat[l]);
      est.swapped[l] = 1;
    }
    if (est.p_hat[l] == est.q_hat[l]) {
      if (est.q_hat[l] >= 1.0 - kEstimateClip) {
        est.q_hat[l] = 1.0 - 2.0 * kEstimateClip;
      } else {
        est.p_hat[l] = std::min(1.0 - kEstimateClip,
                                est.q_hat[l] + kEstimateClip);
      }
      est.tied[l] = 1;
    }
  }
}

}  // namespace detail

// Intra- and inter-cluster edge densities under the labeling z.
inline ProbEstimates plugin_pq(const MultilayerGraph& graph,
                               const Assignment& z) {
  detail::require(z.size() == graph.n(), "assignment must have length n");
  const std::size_t n = graph.n();
  const std::size_t L = graph.num_layers();
  const double plus = static_cast<double>(z.count_plus());
  const double minus = static_cast<double>(z.count_minus());
  ProbEstimates est;
  est.p_hat.resize(L);
  est.q_hat.resize(L);
  if (plus < 2.0 || minus < 2.0) {
    est.fallback = true;
    est.p_hat = moment_p_hat(graph);
    const double pairs = 0.5 * static_cast<double>(n) *
                         static_cast<double>(n - 1);
    for (std::size_t l = 0; l < L; ++l) {
      est.q_hat[l] = clip_probability(
          static_cast<double>(graph.edge_count(l)) / pairs);
    }
    detail::order_estimates(est);
    return est;
  }
  const double intra_pairs =
      0.5 * plus * (plus - 1.0) + 0.5 * minus * (minus - 1.0);
  const double inter_pairs = plus * minus;
  for (std::size_t l = 0; l < L; ++l) {
    std::size_t intra = 0;
    std::size_t inter = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::uint32_t j : graph.neighbors(l, i)) {
        if (j <= i) continue;
        if (z[i] == z[j]) {
          ++intra;
        } else {
          ++inter;
        }
      }
    }
    est.p_hat[l] = clip_probability(static_cast<double>(intra) / intra_pairs);
    est.q_hat[l] = clip_probability(static_cast<double>(inter) / inter_pairs);
  }
  detail::order_estimates(est);
  return est;
}

// Marginal edge probabilities by z* after label flips:
//   p~ = p - 2 (p - q) rho (1 - rho),  q~ = q + 2 (p - q) rho (1 - rho).
inline ProbEstimates marginal_blend(const ModelParams& params) {
  params.validate();
  ProbEstimates est;
  est.p_hat = params.p;
  est.q_hat = params.q;
  const double mix = 2.0 * params.rho * (1.0 - params.rho);
  for (std::size_t l = 0; l < params.L; ++l) {
    const double gap = params.p[l] - params.q[l];
    est.tilde_p.push_back(params.p[l] - gap * mix);
    est.tilde_q.push_back(params.q[l] + gap * mix);
  }
  return est;
}

}  // namespace imlsbm

#endif  // IMLSBM_ESTIMATE_HPP_
