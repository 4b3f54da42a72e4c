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

#ifndef IMLSBM_KMEANS_HPP_
#define IMLSBM_KMEANS_HPP_

// 2-means on rows of an n x 2 embedding: k-means++ seeding, Lloyd
// iterations to a local optimum, best of several restarts.

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "imlsbm/error.hpp"
#include "imlsbm/model.hpp"
#include "imlsbm/random.hpp"

namespace imlsbm {

using Point2 = std::array<double, 2>;

struct KMeansOptions {
  int restarts = 10;
  // Lloyd stops early once the objective improves by less than
  // epsilon * objective; 0 runs until the assignment is stable.
  double epsilon = 0.0;
  int max_iter = 1000;
  std::uint64_t seed = 0;
};

struct KMeansResult {
  Assignment assignment;          // cluster 1 -> +1, cluster 2 -> -1
  std::array<Point2, 2> centroids{};  // lexicographically ordered
  double objective = 0.0;
  int restarts_used = 0;
  bool degenerate = false;  // every point coincides
};

namespace detail {

inline double sq_dist(const Eigen::MatrixXd& U, Eigen::Index i,
                      const Point2& c) {
  const double dx = U(i, 0) - c[0];
  const double dy = U(i, 1) - c[1];
  return dx * dx + dy * dy;
}

struct LloydRun {
  std::vector<int> cluster;  // 0 or 1
  std::array<Point2, 2> centroids{};
  double objective = 0.0;
  bool degenerate = false;
};

inline double assign_points(const Eigen::MatrixXd& U,
                            const std::array<Point2, 2>& centroids,
                            std::vector<int>& cluster, bool& changed) {
  double objective = 0.0;
  changed = false;
  for (Eigen::Index i = 0; i < U.rows(); ++i) {
    const double d0 = sq_dist(U, i, centroids[0]);
    const double d1 = sq_dist(U, i, centroids[1]);
    const int best = d1 < d0 ? 1 : 0;  // lower index wins ties
    if (cluster[i] != best) {
      cluster[i] = best;
      changed = true;
    }
    objective += best == 0 ? d0 : d1;
  }
  return objective;
}

inline void update_centroids(const Eigen::MatrixXd& U,
                             const std::vector<int>& cluster,
                             std::array<Point2, 2>& centroids) {
  std::array<Point2, 2> sum{};
  std::array<std::size_t, 2> count{};
  for (Eigen::Index i = 0; i < U.rows(); ++i) {
    const int k = cluster[i];
    sum[k][0] += U(i, 0);
    sum[k][1] += U(i, 1);
    ++count[k];
  }
  for (int k = 0; k < 2; ++k) {
    // An emptied cluster keeps its previous centroid.
    if (count[k] > 0) {
      centroids[k] = {sum[k][0] / static_cast<double>(count[k]),
                      sum[k][1] / static_cast<double>(count[k])};
    }
  }
}

inline LloydRun lloyd_run(const Eigen::MatrixXd& U,
                          const KMeansOptions& options, int restart) {
  const Eigen::Index n = U.rows();
  Engine engine = make_engine(options.seed, StreamTag::kKMeansRestart,
                              static_cast<std::uint64_t>(restart));
  LloydRun run;
  run.cluster.assign(n, -1);
  const auto first = static_cast<Eigen::Index>(
      std::uniform_int_distribution<std::int64_t>(0, n - 1)(engine));
  run.centroids[0] = {U(first, 0), U(first, 1)};
  std::vector<double> weight(n);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    weight[i] = sq_dist(U, i, run.centroids[0]);
    total += weight[i];
  }
  if (total <= 0.0) {
    run.degenerate = true;
    run.centroids[1] = run.centroids[0];
    run.cluster.assign(n, 0);
    return run;
  }
  // D^2 sampling for the second center.
  const double target = uniform01(engine) * total;
  double acc = 0.0;
  Eigen::Index second = n - 1;
  for (Eigen::Index i = 0; i < n; ++i) {
    acc += weight[i];
    if (acc > target && weight[i] > 0.0) {
      second = i;
      break;
    }
  }
  while (weight[second] <= 0.0) --second;
  run.centroids[1] = {U(second, 0), U(second, 1)};

  bool changed = true;
  double previous = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < options.max_iter; ++iter) {
    const double objective =
        assign_points(U, run.centroids, run.cluster, changed);
    if (!changed) break;
    update_centroids(U, run.cluster, run.centroids);
    if (options.epsilon > 0.0 &&
        previous - objective <= options.epsilon * objective) {
      break;
    }
    previous = objective;
  }
  update_centroids(U, run.cluster, run.centroids);
  run.objective = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    run.objective += sq_dist(U, i, run.centroids[run.cluster[i]]);
  }
  return run;
}

}  // namespace detail

inline KMeansResult approx_kmeans2(const Eigen::MatrixXd& U,
                                   const KMeansOptions& options = {}) {
  detail::require(U.cols() == 2, "embedding must have two columns");
  detail::require(U.rows() >= 1, "embedding must have at least one row");
  detail::require(options.restarts >= 1, "restarts must be at least 1");
  const Eigen::Index n = U.rows();
  detail::LloydRun best;
  best.objective = std::numeric_limits<double>::infinity();
  int used = 0;
  for (int r = 0; r < options.restarts; ++r) {
    detail::LloydRun run = detail::lloyd_run(U, options, r);
    ++used;
    if (run.degenerate) {
      best = std::move(run);
      break;
    }
    if (run.objective < best.objective) best = std::move(run);
  }

  KMeansResult result;
  result.restarts_used = used;
  result.degenerate = best.degenerate;
  if (best.degenerate) {
    result.assignment = Assignment::constant(n, 1);
    result.centroids = best.centroids;
    result.objective = 0.0;
    return result;
  }
  const bool swap = best.centroids[1] < best.centroids[0];
  std::vector<int> labels(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int k = swap ? 1 - best.cluster[i] : best.cluster[i];
    labels[i] = k == 0 ? 1 : -1;
  }
  result.assignment = Assignment(std::move(labels));
  result.centroids = swap ? std::array<Point2, 2>{best.centroids[1],
                                                  best.centroids[0]}
                          : best.centroids;
  result.objective = best.objective;
  return result;
}

}  // namespace imlsbm

#endif  // IMLSBM_KMEANS_HPP_
