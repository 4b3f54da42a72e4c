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

#include <cmath>
#include <vector>

#include "imlsbm/error.hpp"
#include "imlsbm/metrics.hpp"
#include "imlsbm/model.hpp"
#include "imlsbm/spectral.hpp"

namespace imlsbm {
namespace {

ModelParams homogeneous(std::size_t n, std::size_t L, double rho, double p,
                        double q) {
  ModelParams params;
  params.n = n;
  params.L = L;
  params.rho = rho;
  params.p.assign(L, p);
  params.q.assign(L, q);
  return params;
}

TEST(Weights, Schemes) {
  const WeightVector u = uniform_weights(4);
  for (std::size_t l = 0; l < 4; ++l) EXPECT_DOUBLE_EQ(u[l], 0.25);
  const std::vector<double> pv{0.1, 0.2};
  const WeightVector v = variance_weights(pv);
  EXPECT_NEAR(v[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(v[1], 1.0 / 3.0, 1e-15);
  const std::vector<double> ps{0.01, 0.04};
  const WeightVector s = stdev_weights(ps);
  EXPECT_NEAR(s[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(s[1], 1.0 / 3.0, 1e-15);
  const std::vector<double> bad{0.1, 0.0};
  EXPECT_THROW(variance_weights(bad), ParameterError);
  EXPECT_THROW(stdev_weights(bad), ParameterError);
  EXPECT_THROW(WeightVector(std::vector<double>{1.0, -1.0}), ParameterError);
}

TEST(WeightedAdjacency, Examples) {
  const MultilayerGraph one(3, {{{0, 1}, {1, 2}}});
  const Eigen::MatrixXd a1 = weighted_adjacency(one, uniform_weights(1));
  EXPECT_EQ(a1(0, 1), 1.0);
  EXPECT_EQ(a1(2, 1), 1.0);
  EXPECT_EQ(a1(0, 2), 0.0);
  EXPECT_EQ(a1.diagonal().norm(), 0.0);

  const MultilayerGraph twin(3, {{{0, 1}}, {{0, 1}}});
  const Eigen::MatrixXd a2 = weighted_adjacency(twin, uniform_weights(2));
  EXPECT_DOUBLE_EQ(a2(0, 1), 1.0);

  const MultilayerGraph mixed(2, {{{0, 1}}, {}});
  const Eigen::MatrixXd a3 = weighted_adjacency(
      mixed, WeightVector(std::vector<double>{0.3, 0.7}));
  EXPECT_DOUBLE_EQ(a3(0, 1), 0.3);
  EXPECT_DOUBLE_EQ(a3(1, 0), 0.3);
  EXPECT_THROW(weighted_adjacency(mixed, uniform_weights(3)), ParameterError);
}

TEST(Trim, NoNodeAboveThreshold) {
  const MultilayerGraph g(4, {{{0, 1}, {2, 3}}});
  const Eigen::MatrixXd bar = weighted_adjacency(g, uniform_weights(1));
  const std::vector<double> p{0.5};
  const TrimResult t = trim(bar, uniform_weights(1), p, 5.0);
  EXPECT_TRUE(t.report.trimmed_nodes.empty());
  EXPECT_EQ(t.matrix, bar);
  EXPECT_DOUBLE_EQ(t.report.threshold, 5.0 * 4 * 0.5);
}

TEST(Trim, PlantedHub) {
  const std::size_t n = 30;
  std::vector<Edge> edges;
  for (std::uint32_t j = 1; j < n; ++j) edges.emplace_back(0, j);
  edges.emplace_back(3, 4);
  const MultilayerGraph g(n, {edges});
  const Eigen::MatrixXd bar = weighted_adjacency(g, uniform_weights(1));
  const std::vector<double> p{0.1};  // threshold 2 * 30 * 0.1 = 6 < 29
  const TrimResult t = trim(bar, uniform_weights(1), p, 2.0);
  ASSERT_EQ(t.report.trimmed_nodes, std::vector<std::size_t>{0});
  EXPECT_EQ(t.matrix.row(0).norm(), 0.0);
  EXPECT_EQ(t.matrix.col(0).norm(), 0.0);
  EXPECT_EQ(t.matrix(3, 4), 1.0);
  // Entrywise 0 <= tau(A) <= A.
  EXPECT_TRUE(((bar - t.matrix).array() >= 0.0).all());
  EXPECT_TRUE((t.matrix.array() >= 0.0).all());
  for (std::size_t i : t.report.trimmed_nodes) {
    EXPECT_GT(t.report.degrees[i], t.report.threshold);
  }
  EXPECT_THROW(trim(bar, uniform_weights(1), p, 1.0), ParameterError);
}

TEST(Trim, IntermediateLayersRarelyTrimmed) {
  const std::size_t n = 200;
  const std::size_t L = 20;
  const ExperimentDesign d =
      experiment_params(n, L, 3.0, 0.1, Scaling::kIntermediate);
  const Assignment z = balanced_assignment(n);
  int good = 0;
  for (int r = 0; r < 100; ++r) {
    const SampleRecord rec = sample_imlsbm(d.params, z, 500 + r);
    const WeightVector w = uniform_weights(L);
    const TrimResult t =
        trim(weighted_adjacency(rec.graph, w), w, d.params.p, 5.0);
    good += static_cast<double>(t.report.trimmed_nodes.size()) / n < 0.05;
  }
  EXPECT_GE(good, 95);
}

TEST(SpectralInitialize, NoiselessSingleLayer) {
  const ModelParams params = homogeneous(40, 1, 0.0, 1.0, 0.0);
  const Assignment z = balanced_assignment(40);
  const SampleRecord rec = sample_imlsbm(params, z, 1);
  const SpectralInitResult r =
      spectral_initialize(rec.graph, uniform_weights(1), params.p);
  EXPECT_EQ(misclustering(r.assignment, z).value, 0.0);
  EXPECT_FALSE(r.degenerate);
}

TEST(SpectralInitialize, EmptyGraphIsDegenerate) {
  const MultilayerGraph g(10, {{}, {}});
  const std::vector<double> p{0.1, 0.1};
  const SpectralInitResult a = spectral_initialize(g, uniform_weights(2), p);
  const SpectralInitResult b = spectral_initialize(g, uniform_weights(2), p);
  EXPECT_TRUE(a.degenerate);
  EXPECT_EQ(a.assignment, b.assignment);
}

TEST(SpectralInitialize, ReflectionOfEmbeddingKeepsPartition) {
  const ModelParams params = homogeneous(120, 5, 0.1, 0.2, 0.05);
  const SampleRecord rec =
      sample_imlsbm(params, balanced_assignment(120), 8);
  const SpectralInitResult r =
      spectral_initialize(rec.graph, uniform_weights(5), params.p);
  Eigen::MatrixXd flipped = r.embedding.U;
  flipped.col(1) *= -1.0;
  const KMeansResult k = approx_kmeans2(flipped);
  EXPECT_TRUE(k.assignment == r.assignment ||
              k.assignment == r.assignment.negated());
}

TEST(SpectralInitialize, ResidualAndOrthonormality) {
  const ModelParams params = homogeneous(150, 4, 0.1, 0.2, 0.05);
  const SampleRecord rec =
      sample_imlsbm(params, balanced_assignment(150), 2);
  const WeightVector w = uniform_weights(4);
  const SpectralInitResult r = spectral_initialize(rec.graph, w, params.p);
  const Eigen::MatrixXd tau =
      trim(weighted_adjacency(rec.graph, w), w, params.p, 5.0).matrix;
  const Eigen::MatrixXd gram = r.embedding.U.transpose() * r.embedding.U;
  EXPECT_LT((gram - Eigen::MatrixXd::Identity(2, 2)).norm(), 1e-10);
  for (int c = 0; c < 2; ++c) {
    const double res = (tau * r.embedding.U.col(c) -
                        r.embedding.eigenvalues[c] * r.embedding.U.col(c))
                           .norm();
    EXPECT_LE(res, 1e-8 * tau.norm() * (1 + 1e-9));
  }
}

// Comfortable spectral gap: loss <= 0.05 in at least 90% of runs.
TEST(SpectralInitialize, AccurateWithLargeGap) {
  const ModelParams params = homogeneous(400, 20, 0.05, 0.05, 0.01);
  const Assignment z = balanced_assignment(400);
  int good = 0;
  for (int r = 0; r < 20; ++r) {
    const SampleRecord rec = sample_imlsbm(params, z, 40 + r);
    SpectralOptions options;
    options.seed = r;
    const SpectralInitResult init =
        spectral_initialize(rec.graph, uniform_weights(20), params.p, options);
    good += misclustering(init.assignment, z).value <= 0.05;
  }
  EXPECT_GE(good, 18);
}

TEST(SpectralInitialize, UniformBeatsVarianceWeightsOnMixedDesign) {
  const std::size_t n = 400;
  const std::size_t L = 50;
  const ExperimentDesign d =
      experiment_params(n, L, 3.0, 0.1, Scaling::kMixed);
  const Assignment z = balanced_assignment(n);
  double uniform = 0.0;
  double variance = 0.0;
  const int reps = 20;
  for (int r = 0; r < reps; ++r) {
    const SampleRecord rec = sample_imlsbm(d.params, z, 70 + r);
    SpectralOptions options;
    options.seed = r;
    uniform += misclustering(spectral_initialize(rec.graph, uniform_weights(L),
                                                 d.params.p, options)
                                 .assignment,
                             z)
                   .value;
    variance += misclustering(
                    spectral_initialize(rec.graph,
                                        variance_weights(d.params.p),
                                        d.params.p, options)
                        .assignment,
                    z)
                    .value;
  }
  EXPECT_LE(uniform / reps, variance / reps);
}

}  // namespace
}  // namespace imlsbm
