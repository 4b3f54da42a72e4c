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

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <random>

#include "imlsbm/error.hpp"
#include "imlsbm/kmeans.hpp"
#include "oracles.hpp"

namespace imlsbm {
namespace {

double recomputed_objective(const Eigen::MatrixXd& U, const KMeansResult& r) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < U.rows(); ++i) {
    const Point2& c = r.centroids[r.assignment[i] == 1 ? 0 : 1];
    total += (U(i, 0) - c[0]) * (U(i, 0) - c[0]) +
             (U(i, 1) - c[1]) * (U(i, 1) - c[1]);
  }
  return total;
}

TEST(KMeans, TwoLocations) {
  Eigen::MatrixXd U(6, 2);
  U << 1, 1, -2, 0, 1, 1, -2, 0, 1, 1, -2, 0;
  const KMeansResult r = approx_kmeans2(U);
  EXPECT_EQ(r.objective, 0.0);
  EXPECT_FALSE(r.degenerate);
  // Lexicographic order: (-2, 0) is cluster 1 -> +1.
  EXPECT_EQ(r.assignment, Assignment({-1, 1, -1, 1, -1, 1}));
  EXPECT_EQ(r.centroids[0], (Point2{-2, 0}));
  EXPECT_EQ(r.centroids[1], (Point2{1, 1}));
}

TEST(KMeans, SeparatedPairs) {
  Eigen::MatrixXd U(4, 2);
  U << 0, 0, 0, 0.1, 5, 5, 5, 5.1;
  const KMeansResult r = approx_kmeans2(U);
  EXPECT_EQ(r.assignment, Assignment({1, 1, -1, -1}));
  EXPECT_NEAR(r.objective, 0.01, 1e-12);
}

TEST(KMeans, AllPointsIdentical) {
  const Eigen::MatrixXd U = Eigen::MatrixXd::Constant(5, 2, 0.3);
  const KMeansResult r = approx_kmeans2(U);
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.assignment, Assignment::constant(5, 1));
}

TEST(KMeans, ObjectiveMatchesAssignment) {
  std::mt19937_64 engine(3);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd U(100, 2);
  for (Eigen::Index i = 0; i < 100; ++i) {
    U(i, 0) = normal(engine) + (i < 50 ? 2 : -2);
    U(i, 1) = normal(engine);
  }
  const KMeansResult r = approx_kmeans2(U);
  EXPECT_NEAR(r.objective, recomputed_objective(U, r), 1e-12 * r.objective);
  EXPECT_EQ(r.restarts_used, 10);
}

TEST(KMeans, NoWorseThanBruteForceOnSmallInstances) {
  std::mt19937_64 engine(17);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  int optimal = 0;
  for (int trial = 0; trial < 25; ++trial) {
    Eigen::MatrixXd U(12, 2);
    for (Eigen::Index i = 0; i < 12; ++i) {
      U(i, 0) = unif(engine);
      U(i, 1) = unif(engine);
    }
    KMeansOptions options;
    options.seed = static_cast<std::uint64_t>(trial);
    const KMeansResult r = approx_kmeans2(U, options);
    const double best = oracle::brute_kmeans2(U);
    EXPECT_GE(r.objective, best - 1e-12);
    optimal += r.objective <= best * (1.0 + 1e-9);
    // Lloyd fixed point: every point sits with its nearest centroid.
    for (Eigen::Index i = 0; i < 12; ++i) {
      auto dist = [&](const Point2& c) {
        return std::pow(U(i, 0) - c[0], 2) + std::pow(U(i, 1) - c[1], 2);
      };
      const int k = r.assignment[static_cast<std::size_t>(i)] == 1 ? 0 : 1;
      EXPECT_LE(dist(r.centroids[k]), dist(r.centroids[1 - k]) + 1e-12)
          << "trial " << trial;
    }
  }
  EXPECT_GE(optimal, 20);
}

TEST(KMeans, ReflectionInvariant) {
  std::mt19937_64 engine(5);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd U(60, 2);
  for (Eigen::Index i = 0; i < 60; ++i) {
    U(i, 0) = normal(engine) + (i % 2 ? 1.5 : -1.5);
    U(i, 1) = normal(engine);
  }
  Eigen::MatrixXd V = U;
  V.col(1) *= -1.0;
  const KMeansResult a = approx_kmeans2(U);
  const KMeansResult b = approx_kmeans2(V);
  const bool same = a.assignment == b.assignment ||
                    a.assignment == b.assignment.negated();
  EXPECT_TRUE(same);
  EXPECT_NEAR(a.objective, b.objective, 1e-10);
}

TEST(KMeans, RejectsBadInput) {
  EXPECT_THROW(approx_kmeans2(Eigen::MatrixXd::Zero(4, 3)), ParameterError);
  KMeansOptions options;
  options.restarts = 0;
  EXPECT_THROW(approx_kmeans2(Eigen::MatrixXd::Zero(4, 2), options),
               ParameterError);
}

}  // namespace
}  // namespace imlsbm
