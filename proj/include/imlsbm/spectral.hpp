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

#ifndef IMLSBM_SPECTRAL_HPP_
#define IMLSBM_SPECTRAL_HPP_

// Stage I initializer: aggregate layers with positive weights, zero out the
// rows and columns of over-dense nodes, embed with the two dominant
// eigenvectors and split the embedding with 2-means.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "imlsbm/eigen_solver.hpp"
#include "imlsbm/error.hpp"
#include "imlsbm/kmeans.hpp"
#include "imlsbm/model.hpp"

namespace imlsbm {

// Positive layer weights normalized to sum to one.
class WeightVector {
 public:
  WeightVector() = default;

  explicit WeightVector(std::vector<double> raw) {
    detail::require(!raw.empty(), "weights need at least one layer");
    double total = 0.0;
    for (double w : raw) {
      detail::require(std::isfinite(w) && w > 0.0,
                      "weights must be positive and finite");
      total += w;
    }
    for (double& w : raw) w /= total;
    omega_ = std::move(raw);
  }

  std::size_t size() const noexcept { return omega_.size(); }
  double operator[](std::size_t l) const { return omega_[l]; }
  std::span<const double> values() const noexcept { return omega_; }

 private:
  std::vector<double> omega_;
};

inline WeightVector uniform_weights(std::size_t L) {
  detail::require(L >= 1, "need at least one layer");
  return WeightVector(std::vector<double>(L, 1.0));
}

// omega_l proportional to 1 / p_l.
inline WeightVector variance_weights(std::span<const double> p_hat) {
  std::vector<double> raw;
  for (double p : p_hat) {
    detail::require(p > 0.0, "variance weights need positive p");
    raw.push_back(1.0 / p);
  }
  return WeightVector(std::move(raw));
}

// omega_l proportional to 1 / sqrt(p_l).
inline WeightVector stdev_weights(std::span<const double> p_hat) {
  std::vector<double> raw;
  for (double p : p_hat) {
    detail::require(p > 0.0, "standard-deviation weights need positive p");
    raw.push_back(1.0 / std::sqrt(p));
  }
  return WeightVector(std::move(raw));
}

enum class WeightScheme { kUniform, kVariance, kStdev };

inline WeightVector make_weights(WeightScheme scheme,
                                 std::span<const double> p_hat) {
  switch (scheme) {
    case WeightScheme::kVariance:
      return variance_weights(p_hat);
    case WeightScheme::kStdev:
      return stdev_weights(p_hat);
    case WeightScheme::kUniform:
      break;
  }
  return uniform_weights(p_hat.size());
}

inline Eigen::MatrixXd weighted_adjacency(const MultilayerGraph& graph,
                                          const WeightVector& omega) {
  detail::require(omega.size() == graph.num_layers(),
                  "weight vector length must equal the layer count");
  const auto n = static_cast<Eigen::Index>(graph.n());
  Eigen::MatrixXd bar = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t l = 0; l < graph.num_layers(); ++l) {
    const double w = omega[l];
    for (Eigen::Index i = 0; i < n; ++i) {
      for (std::uint32_t j : graph.neighbors(l, static_cast<std::size_t>(i))) {
        bar(i, j) += w;
      }
    }
  }
  return bar;
}

struct TrimReport {
  std::vector<std::size_t> trimmed_nodes;
  double threshold = 0.0;
  std::vector<double> degrees;
};

struct TrimResult {
  Eigen::MatrixXd matrix;
  TrimReport report;
};

// Single pass: nodes whose weighted degree exceeds gamma * n * sum_l w_l p_l
// have their rows and columns zeroed.
inline TrimResult trim(const Eigen::MatrixXd& bar, const WeightVector& omega,
                       std::span<const double> p, double gamma) {
  detail::require(gamma > 1.0, "trimming parameter gamma must exceed 1");
  detail::require(p.size() == omega.size(),
                  "p must have one entry per weight");
  double expected = 0.0;
  for (std::size_t l = 0; l < p.size(); ++l) expected += omega[l] * p[l];
  TrimResult result;
  result.matrix = bar;
  result.report.threshold =
      gamma * static_cast<double>(bar.rows()) * expected;
  result.report.degrees.resize(bar.rows());
  for (Eigen::Index i = 0; i < bar.rows(); ++i) {
    result.report.degrees[i] = bar.row(i).sum();
    if (result.report.degrees[i] > result.report.threshold) {
      result.report.trimmed_nodes.push_back(static_cast<std::size_t>(i));
    }
  }
  for (std::size_t i : result.report.trimmed_nodes) {
    result.matrix.row(static_cast<Eigen::Index>(i)).setZero();
    result.matrix.col(static_cast<Eigen::Index>(i)).setZero();
  }
  return result;
}

struct SpectralOptions {
  double gamma = 5.0;
  int restarts = 10;
  double epsilon = 0.0;
  double tol = 1e-8;
  int max_iter = 10000;
  std::uint64_t seed = 0;
};

struct SpectralInitResult {
  Assignment assignment;
  TrimReport trim;
  SpectralEmbedding embedding;
  KMeansResult kmeans;
  bool degenerate = false;
};

// The initializer on an already aggregated matrix.  `start` optionally warm
// starts the eigen solver (see top2_eigenpairs_operator).
inline SpectralInitResult spectral_initialize_matrix(
    const Eigen::MatrixXd& bar, const WeightVector& omega,
    std::span<const double> p, const SpectralOptions& options,
    const Eigen::MatrixXd* start = nullptr) {
  const auto n = static_cast<std::size_t>(bar.rows());
  SpectralInitResult result;
  TrimResult trimmed = trim(bar, omega, p, options.gamma);
  result.trim = std::move(trimmed.report);
  EigenOptions eig;
  eig.tol = options.tol;
  eig.max_iter = options.max_iter;
  eig.seed = options.seed;
  result.embedding = top2_eigenpairs(trimmed.matrix, eig, start);
  if (result.embedding.frobenius == 0.0) {
    result.degenerate = true;
    result.assignment = Assignment::constant(n, 1);
    result.kmeans.assignment = result.assignment;
    result.kmeans.degenerate = true;
    return result;
  }
  KMeansOptions km;
  km.restarts = options.restarts;
  km.epsilon = options.epsilon;
  km.seed = options.seed;
  result.kmeans = approx_kmeans2(result.embedding.U, km);
  result.degenerate = result.kmeans.degenerate;
  result.assignment = result.kmeans.assignment;
  return result;
}

inline SpectralInitResult spectral_initialize(const MultilayerGraph& graph,
                                              const WeightVector& omega,
                                              std::span<const double> p,
                                              const SpectralOptions& options =
                                                  {}) {
  detail::require(p.size() == graph.num_layers(),
                  "p must have one entry per layer");
  return spectral_initialize_matrix(weighted_adjacency(graph, omega), omega,
                                    p, options);
}

}  // namespace imlsbm

#endif  // IMLSBM_SPECTRAL_HPP_
