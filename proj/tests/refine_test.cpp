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

#include <cmath>
#include <random>
#include <vector>

#include "imlsbm/error.hpp"
#include "imlsbm/metrics.hpp"
#include "imlsbm/model.hpp"
#include "imlsbm/refine.hpp"
#include "imlsbm/spectral.hpp"
#include "oracles.hpp"

namespace imlsbm {
namespace {

RefineConfig make_config(std::size_t L, double p, double q, double rho) {
  RefineConfig config;
  config.p.assign(L, p);
  config.q.assign(L, q);
  config.rho_input = rho;
  return config;
}

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

TEST(RefineConfig, Validation) {
  EXPECT_THROW(make_config(1, 0.3, 0.3, 0.1).validate(1), ParameterError);
  EXPECT_THROW(make_config(1, 0.3, 0.1, 0.5).validate(1), ParameterError);
  EXPECT_THROW(make_config(2, 0.3, 0.1, 0.1).validate(1), ParameterError);
  EXPECT_NO_THROW(make_config(1, 1.0, 0.0, 0.0).validate(1));
}

TEST(MapObjective, EmptyRowCollapses) {
  const MultilayerGraph g(5, {{{0, 1}}});
  const Assignment z{1, 1, -1, -1, 1};
  const RefineConfig config = make_config(1, 0.4, 0.1, 0.2);
  // Node 4 has no edges; two j != 4 carry label +1.
  const double expected =
      std::log(0.8 / 0.2) + 2.0 * std::log(0.6 / 0.9);
  EXPECT_NEAR(map_objective(4, 0, 1, 1, z, g, config), expected, 1e-12);
}

TEST(MapObjective, HandInstance) {
  // z~ = (+, +, -, -, .), edges {0, 4} and {1, 4}.
  const MultilayerGraph g(5, {{{0, 4}, {1, 4}}});
  const Assignment z{1, 1, -1, -1, 1};
  const RefineConfig config = make_config(1, 0.8, 0.1, 0.1);
  const double lambda = std::log(0.8 * 0.9 / (0.1 * 0.2));
  const double mu = std::log(0.2 / 0.9);
  const double hand = std::log(9.0) + 2.0 * lambda + 2.0 * mu;
  const std::vector<int> labels{1, 1, -1, -1, 1};
  EXPECT_NEAR(map_objective(4, 0, 1, 1, z, g, config), hand, 1e-12);
  EXPECT_NEAR(oracle::map_objective(4, 0, 1, 1, labels, g, 0.8, 0.1, 0.1),
              hand, 1e-12);
  // Disagreeing layer label: no regularizer, evidence from the minus side.
  EXPECT_NEAR(map_objective(4, 0, 1, -1, z, g, config), 2.0 * mu, 1e-12);
  // Entry i of z~ is ignored.
  EXPECT_EQ(map_objective(4, 0, 1, 1, z.with(4, -1), g, config),
            map_objective(4, 0, 1, 1, z, g, config));
}

TEST(RefineNode, MatchesBruteForce) {
  std::mt19937_64 engine(2024);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int cases = 0;
  while (cases < 100) {
    const std::size_t n = 3 + engine() % 6;
    const std::size_t L = 1 + engine() % 3;
    std::vector<std::vector<Edge>> edges(L);
    for (std::size_t l = 0; l < L; ++l) {
      const double density = unif(engine);
      for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = i + 1; j < n; ++j) {
          if (unif(engine) < density) edges[l].emplace_back(i, j);
        }
      }
    }
    const MultilayerGraph g(n, edges);
    RefineConfig config;
    for (std::size_t l = 0; l < L; ++l) {
      const double q = 0.02 + 0.5 * unif(engine);
      config.q.push_back(q);
      config.p.push_back(q + (0.98 - q) * (0.05 + 0.95 * unif(engine)));
    }
    const int mode = static_cast<int>(engine() % 4);
    config.rho_input = mode == 0 ? 0.0 : 0.49 * unif(engine);
    std::vector<int> labels(n);
    for (auto& s : labels) s = engine() % 2 ? 1 : -1;
    const Assignment z(labels);
    const std::size_t i = engine() % n;

    const NodeRefinement got = refine_node(i, z, g, config);
    const oracle::BruteRefinement want = oracle::brute_refine(
        i, labels, g, config.p, config.q, config.rho_input);
    double got_total = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
      got_total += oracle::map_objective(i, l, got.s_star, got.s_layers[l],
                                         labels, g, config.p[l], config.q[l],
                                         config.rho_input);
    }
    const double slack = 1e-9 * std::max(1.0, std::abs(want.total));
    EXPECT_NEAR(got_total, want.total, slack) << "case " << cases;
    EXPECT_NEAR(got.total, want.total, slack) << "case " << cases;
    EXPECT_EQ(got.s_star, want.s_star) << "case " << cases;
    EXPECT_EQ(got.s_layers, want.s_layers) << "case " << cases;
    ++cases;
  }
}

TEST(RefineNode, OverwhelmingEvidence) {
  std::vector<Edge> edges;
  for (std::uint32_t j = 0; j < 5; ++j) edges.emplace_back(j, 10);
  const MultilayerGraph g(11, {edges});
  const Assignment z = Assignment(
      std::vector<int>{1, 1, 1, 1, 1, -1, -1, -1, -1, -1, -1});
  const RefineConfig config = make_config(1, 0.6, 0.05, 0.25);
  const NodeRefinement r = refine_node(10, z, g, config);
  EXPECT_EQ(r.s_star, 1);
  EXPECT_EQ(r.s_layers, std::vector<int>{1});
  const oracle::BruteRefinement b =
      oracle::brute_refine(10, std::vector<int>(z.labels().begin(),
                                                z.labels().end()),
                           g, config.p, config.q, 0.25);
  EXPECT_EQ(b.s_star, 1);
}

TEST(RefineNode, EmptyGraphTieRule) {
  const MultilayerGraph g(5, {{}, {}, {}});
  const Assignment z{1, 1, -1, -1, 1};
  const RefineConfig config = make_config(3, 0.3, 0.1, 0.2);
  const NodeRefinement r = refine_node(4, z, g, config);
  EXPECT_EQ(r.s_star, 1);
  EXPECT_EQ(r.s_layers, (std::vector<int>{1, 1, 1}));
}

TEST(RefineNode, LikelihoodOnlyBelowFloor) {
  // Layer 1 pulls toward -1 strongly; below the floor it cannot deviate.
  std::vector<Edge> pull;
  for (std::uint32_t j = 3; j < 6; ++j) pull.emplace_back(j, 6);
  const MultilayerGraph g(7, {{{0, 6}}, pull});
  const Assignment z{1, 1, 1, -1, -1, -1, 1};
  RefineConfig config = make_config(2, 0.9, 0.05, 0.0);
  const NodeRefinement r = refine_node(6, z, g, config);
  EXPECT_EQ(r.s_layers[0], r.s_star);
  EXPECT_EQ(r.s_layers[1], r.s_star);
  config.rho_input = 0.3;
  const NodeRefinement free = refine_node(6, z, g, config);
  EXPECT_NE(free.s_layers[0], free.s_layers[1]);
}

TEST(RefineGeneric, NoiselessExactFromTruth) {
  const ModelParams params = homogeneous(60, 3, 0.01, 1.0, 0.0);
  const Assignment z = balanced_assignment(60);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SampleRecord rec = sample_imlsbm(params, z, seed);
    const RefineConfig config = make_config(3, 1.0, 0.0, 0.01);
    const DetectionResult r = refine_generic(z, rec.graph, config);
    EXPECT_EQ(r.z_star_hat, z);
    for (std::size_t l = 0; l < 3; ++l) {
      EXPECT_EQ(r.z_layer_hat[l], rec.z_layers[l]) << "seed " << seed;
    }
  }
}

TEST(RefineGeneric, PerfectInitNotDegraded) {
  const ModelParams params = homogeneous(40, 2, 0.0, 1.0, 0.0);
  const Assignment z = balanced_assignment(40);
  const SampleRecord rec = sample_imlsbm(params, z, 3);
  const DetectionResult r =
      refine_generic(z, rec.graph, make_config(2, 1.0, 0.0, 0.0));
  EXPECT_EQ(r.z_star_hat, z);
}

TEST(RefineGeneric, OrientationEquivariance) {
  const ModelParams params = homogeneous(80, 4, 0.1, 0.3, 0.1);
  const Assignment z = balanced_assignment(80);
  const SampleRecord rec = sample_imlsbm(params, z, 12);
  std::mt19937_64 engine(1);
  std::vector<int> noisy(z.labels().begin(), z.labels().end());
  for (auto& s : noisy) {
    if (engine() % 5 == 0) s = -s;
  }
  const Assignment init(noisy);
  const RefineConfig config = make_config(4, 0.3, 0.1, 0.1);
  const DetectionResult a = refine_generic(init, rec.graph, config);
  const DetectionResult b = refine_generic(init.negated(), rec.graph, config);
  int ties = 0;
  for (std::size_t i = 0; i < 80; ++i) {
    if (b.z_star_hat[i] == a.z_star_hat[i]) {
      // Exact tie between the two global labels resolves to +1 either way.
      EXPECT_EQ(a.z_star_hat[i], 1);
      ++ties;
      continue;
    }
    for (std::size_t l = 0; l < 4; ++l) {
      EXPECT_EQ(b.z_layer_hat[l][i], -a.z_layer_hat[l][i]);
    }
  }
  EXPECT_LT(ties, 80);
}

TEST(RefineGeneric, LayersEqualGlobalBelowFloor) {
  const ModelParams params = homogeneous(60, 3, 0.2, 0.3, 0.1);
  const SampleRecord rec =
      sample_imlsbm(params, balanced_assignment(60), 4);
  const DetectionResult r = refine_generic(
      balanced_assignment(60), rec.graph, make_config(3, 0.3, 0.1, 0.0));
  for (const Assignment& layer : r.z_layer_hat) {
    EXPECT_EQ(layer, r.z_star_hat);
  }
}

TEST(RefineGeneric, MonotoneEvidence) {
  const Assignment z{1, 1, 1, -1, -1, -1};
  const RefineConfig config = make_config(1, 0.4, 0.1, 0.1);
  std::vector<Edge> edges{{3, 5}};
  double previous = map_objective(
      5, 0, 1, 1, z, MultilayerGraph(6, {edges}), config);
  for (std::uint32_t j : {0u, 1u, 2u}) {
    edges.emplace_back(j, 5);
    const double value =
        map_objective(5, 0, 1, 1, z, MultilayerGraph(6, {edges}), config);
    EXPECT_GT(value, previous);
    previous = value;
  }
}

TEST(RefineGeneric, ScoresMatchObjective) {
  const ModelParams params = homogeneous(30, 2, 0.1, 0.4, 0.1);
  const Assignment z = balanced_assignment(30);
  const SampleRecord rec = sample_imlsbm(params, z, 9);
  const RefineConfig config = make_config(2, 0.4, 0.1, 0.1);
  const DetectionResult r = refine_generic(z, rec.graph, config);
  for (std::size_t i = 0; i < 30; ++i) {
    double total = 0.0;
    for (std::size_t l = 0; l < 2; ++l) {
      const double f = map_objective(i, l, r.z_star_hat[i],
                                     r.z_layer_hat[l][i], z, rec.graph,
                                     config);
      EXPECT_NEAR(r.per_node_scores(i, l + 1), f, 1e-9);
      total += f;
    }
    EXPECT_NEAR(r.per_node_scores(i, 0), total, 1e-9);
  }
}

TEST(RefineProvable, IdenticalCorrectInits) {
  const ModelParams params = homogeneous(30, 2, 0.0, 1.0, 0.0);
  const Assignment z = balanced_assignment(30);
  const SampleRecord rec = sample_imlsbm(params, z, 1);
  const std::vector<int> truth(z.labels().begin(), z.labels().end());
  const DetectionResult r = refine_provable(
      rec.graph, make_config(2, 1.0, 0.0, 0.0),
      [&](std::size_t) { return truth; });
  EXPECT_EQ(r.z_star_hat, z);
  EXPECT_TRUE(r.aligned);
}

TEST(RefineProvable, FlippedInitIsRealigned) {
  const ModelParams params = homogeneous(30, 2, 0.0, 1.0, 0.0);
  const Assignment z = balanced_assignment(30);
  const SampleRecord rec = sample_imlsbm(params, z, 1);
  const std::vector<int> truth(z.labels().begin(), z.labels().end());
  std::vector<int> flipped = truth;
  for (auto& s : flipped) s = -s;
  const DetectionResult r = refine_provable(
      rec.graph, make_config(2, 1.0, 0.0, 0.0),
      [&](std::size_t i) { return i % 3 == 1 ? flipped : truth; });
  EXPECT_EQ(r.z_star_hat, z);
  for (const Assignment& layer : r.z_layer_hat) EXPECT_EQ(layer, z);
  EXPECT_TRUE(r.aligned);
}

TEST(RefineProvable, OverlapTieFlagsNode) {
  // Node 1 refines to -1 and its init splits the reference -1 block, so
  // both orientations overlap the reference in one slot.
  const MultilayerGraph g(4, {{}});
  const std::vector<int> ref{1, 1, -1, -1};
  const std::vector<int> half{1, 1, 1, -1};
  const DetectionResult r = refine_provable(
      g, make_config(1, 0.5, 0.1, 0.1),
      [&](std::size_t i) { return i == 1 ? half : ref; });
  EXPECT_FALSE(r.aligned);
  EXPECT_EQ(r.alignment_ties[1], 1);
  EXPECT_EQ(r.z_star_hat[1], 1);
}

TEST(RefineProvable, SpectralLeaveOneOutNoiseless) {
  const ModelParams params = homogeneous(40, 3, 0.0, 1.0, 0.0);
  const Assignment z = balanced_assignment(40);
  const SampleRecord rec = sample_imlsbm(params, z, 2);
  const WeightVector w = uniform_weights(3);
  const SpectralLeaveOneOut loo(rec.graph, w, params.p, {});
  const DetectionResult r =
      refine_provable(rec.graph, make_config(3, 1.0, 0.0, 0.0), loo);
  EXPECT_EQ(misclustering(r.z_star_hat, z).value, 0.0);
  EXPECT_TRUE(r.aligned);
  const std::vector<int> labels = loo(5);
  ASSERT_EQ(labels.size(), 40u);
  for (std::size_t j = 0; j < 40; ++j) {
    if (j != 5) {
      EXPECT_EQ(labels[j] * labels[0], z[j] * z[0]);
    }
  }
}

TEST(RefineProvable, RejectsBadInitializer) {
  const MultilayerGraph g(4, {{}});
  EXPECT_THROW(refine_provable(g, make_config(1, 0.5, 0.1, 0.1),
                               [](std::size_t) { return std::vector<int>{1}; }),
               ParameterError);
}

}  // namespace
}  // namespace imlsbm
