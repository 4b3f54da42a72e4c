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

#ifndef IMLSBM_EIGEN_SOLVER_HPP_
#define IMLSBM_EIGEN_SOLVER_HPP_

// Two dominant eigenpairs of a symmetric operator by blocked subspace
// iteration with Rayleigh-Ritz extraction.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "imlsbm/error.hpp"
#include "imlsbm/random.hpp"

namespace imlsbm {

// kMagnitude ranks eigenvalues by |lambda|.  kAlgebraic ranks by lambda and
// is exact only when the two algebraically largest eigenvalues are among
// the `block` largest in magnitude (true for PSD-dominated operators such as
// the co-regularized updates).
enum class EigenOrder { kMagnitude, kAlgebraic };

struct EigenOptions {
  double tol = 1e-8;
  int max_iter = 10000;
  std::uint64_t seed = 0;
  EigenOrder order = EigenOrder::kMagnitude;
  int block = 8;
};

struct SpectralEmbedding {
  Eigen::MatrixXd U;  // n x 2, orthonormal columns
  std::array<double, 2> eigenvalues{};
  int iterations = 0;
  double residual = 0.0;  // max_k ||M u_k - lambda_k u_k||
  double frobenius = 0.0;
};

namespace detail {

inline Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& Y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(Y.rows(), Y.cols());
}

inline Eigen::MatrixXd random_block(std::size_t n, std::size_t cols,
                                    std::uint64_t seed) {
  Engine engine = make_engine(seed, StreamTag::kEigenStart, 0);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd block(n, cols);
  for (Eigen::Index c = 0; c < block.cols(); ++c) {
    for (Eigen::Index r = 0; r < block.rows(); ++r) block(r, c) = normal(engine);
  }
  return block;
}

}  // namespace detail

// apply(X, Y) must set Y = M X for an n x b block X.  `frobenius` is ||M||_F
// and scales the stopping rule: both selected Ritz pairs must satisfy
// ||M u - lambda u|| <= tol * ||M||_F and their Ritz values must agree with
// the previous iteration to the same tolerance.  `start`, when it has n rows, seeds
// the leading columns of the iteration block; missing columns are random.
template <typename Apply>
SpectralEmbedding top2_eigenpairs_operator(std::size_t n, Apply&& apply,
                                           double frobenius,
                                           const EigenOptions& options,
                                           const Eigen::MatrixXd* start =
                                               nullptr) {
  detail::require(n >= 2, "top-2 eigenpairs need n >= 2");
  detail::require(options.tol > 0.0 && options.max_iter >= 1,
          "eigen solver needs tol > 0 and max_iter >= 1");
  const std::size_t b =
      std::min<std::size_t>(n, std::max(2, options.block));
  Eigen::MatrixXd Q = detail::random_block(n, b, options.seed);
  if (start != nullptr && static_cast<std::size_t>(start->rows()) == n) {
    const Eigen::Index cols = std::min<Eigen::Index>(start->cols(), b);
    Q.leftCols(cols) = start->leftCols(cols);
  }
  Q = detail::orthonormalize(Q);

  const double threshold = options.tol * frobenius;
  Eigen::MatrixXd Y(n, b);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small;
  std::vector<Eigen::Index> order(b);
  double residual = 0.0;
  std::array<double, 2> previous{std::numeric_limits<double>::quiet_NaN(),
                                 std::numeric_limits<double>::quiet_NaN()};
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    apply(Q, Y);
    Eigen::MatrixXd H = Q.transpose() * Y;
    H = 0.5 * (H + H.transpose()).eval();
    small.compute(H);
    const Eigen::VectorXd& theta = small.eigenvalues();
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    if (options.order == EigenOrder::kMagnitude) {
      std::stable_sort(order.begin(), order.end(),
                       [&](Eigen::Index a, Eigen::Index c) {
                         return std::abs(theta(a)) > std::abs(theta(c));
                       });
    } else {
      std::stable_sort(order.begin(), order.end(),
                       [&](Eigen::Index a, Eigen::Index c) {
                         return theta(a) > theta(c);
                       });
    }
    Eigen::MatrixXd W(b, b);
    Eigen::VectorXd sorted_theta(b);
    for (std::size_t k = 0; k < b; ++k) {
      W.col(k) = small.eigenvectors().col(order[k]);
      sorted_theta(k) = theta(order[k]);
    }
    const Eigen::MatrixXd X = Q * W;
    const Eigen::MatrixXd MX = Y * W;
    residual = 0.0;
    for (int k = 0; k < 2; ++k) {
      residual = std::max(
          residual, (MX.col(k) - sorted_theta(k) * X.col(k)).norm());
    }
    const bool settled =
        std::abs(sorted_theta(0) - previous[0]) <= threshold &&
        std::abs(sorted_theta(1) - previous[1]) <= threshold;
    previous = {sorted_theta(0), sorted_theta(1)};
    if (residual <= threshold && settled) {
      SpectralEmbedding out;
      out.U = X.leftCols(2);
      out.eigenvalues = {sorted_theta(0), sorted_theta(1)};
      out.iterations = iter;
      out.residual = residual;
      out.frobenius = frobenius;
      return out;
    }
    Q = detail::orthonormalize(MX);
  }
  throw ConvergenceError("subspace iteration did not converge in " +
                             std::to_string(options.max_iter) +
                             " iterations (residual " +
                             std::to_string(residual) + ")",
                         residual);
}

// Dense symmetric matrix convenience wrapper.
inline SpectralEmbedding top2_eigenpairs(const Eigen::MatrixXd& M,
                                         const EigenOptions& options = {},
                                         const Eigen::MatrixXd* start =
                                             nullptr) {
  detail::require(M.rows() == M.cols(), "matrix must be square");
  return top2_eigenpairs_operator(
      static_cast<std::size_t>(M.rows()),
      [&M](const Eigen::MatrixXd& X, Eigen::MatrixXd& Y) {
        Y.noalias() = M.selfadjointView<Eigen::Lower>() * X;
      },
      M.norm(), options, start);
}

}  // namespace imlsbm

#endif  // IMLSBM_EIGEN_SOLVER_HPP_
