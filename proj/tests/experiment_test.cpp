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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <set>
#include <string>

#include "imlsbm/error.hpp"
#include "imlsbm/experiment.hpp"
#include "imlsbm/pipeline.hpp"

namespace imlsbm {
namespace {

std::string strip_wall_ms(const std::string& csv) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    out << line.substr(0, line.rfind(',')) << '\n';
  }
  return out.str();
}

std::string results_text(const ExperimentResult& r) {
  std::ostringstream out;
  write_results_csv(out, r.rows);
  return out.str();
}

ExperimentConfig small_config(Scenario scenario) {
  ExperimentConfig config;
  config.scenario = scenario;
  config.n = 60;
  config.L = 20;
  config.replications = 3;
  config.seed = 5;
  config.jobs = 2;
  return config;
}

TEST(Config, ParsesAllKeys) {
  const ExperimentConfig c = parse_config(R"({
    "scenario": "sensitivity", "n": 100, "L": 10, "rho": [0.1, 0.2],
    "c": 3, "rho_input": [0.01, 0.1], "replications": 4, "seed": 9,
    "methods": ["generic"], "params": "true", "weights": ["uniform"],
    "out": "o", "jobs": 2, "coreg_replications": 1, "scaling": "strong",
    "gamma": 4.0})");
  EXPECT_EQ(c.scenario, Scenario::kSensitivity);
  EXPECT_EQ(c.n, 100u);
  EXPECT_EQ(c.rho, (std::vector<double>{0.1, 0.2}));
  EXPECT_EQ(c.c, std::vector<double>{3.0});
  EXPECT_EQ(c.params, std::vector<std::string>{"true"});
  EXPECT_EQ(c.scaling, Scaling::kStrong);
  EXPECT_EQ(c.gamma, 4.0);
}

TEST(Config, Rejections) {
  EXPECT_THROW(parse_config("{"), ParameterError);
  EXPECT_THROW(parse_config(R"({"bogus": 1})"), ParameterError);
  EXPECT_THROW(parse_config(R"({"scenario": "nope"})"), ParameterError);
  EXPECT_THROW(parse_config(R"({"n": -3})"), ParameterError);
  ExperimentConfig c = parse_config(R"({"replications": 0})");
  c.fill_defaults();
  EXPECT_THROW(c.validate(), ParameterError);
  ExperimentConfig m = parse_config(R"({"methods": ["magic"]})");
  m.fill_defaults();
  EXPECT_THROW(m.validate(), ParameterError);
}

TEST(Config, FullScale) {
  ExperimentConfig c;
  c.make_full();
  EXPECT_EQ(c.n, 1000u);
  EXPECT_EQ(c.L, 100u);
  EXPECT_EQ(c.replications, 500u);
}

TEST(Pipeline, EstimatedStageOrder) {
  ModelParams params;
  params.n = 40;
  params.L = 2;
  params.rho = 0.1;
  params.p = {0.5, 0.4};
  params.q = {0.05, 0.05};
  const SampleRecord rec = sample_imlsbm(params, balanced_assignment(40), 3);
  MethodSpec spec;
  spec.method = Method::kGeneric;
  spec.source = ParamsSource::kEstimated;
  const MethodOutcome est = run_method(rec, spec);
  EXPECT_EQ(est.stages, (std::vector<std::string>{"moment", "spectral",
                                                  "plugin", "refine"}));
  ASSERT_TRUE(est.estimates.has_value());
  spec.source = ParamsSource::kTrue;
  const MethodOutcome tru = run_method(rec, spec);
  EXPECT_EQ(tru.stages, (std::vector<std::string>{"spectral", "refine"}));
  spec.method = Method::kCoReg;
  EXPECT_EQ(run_method(rec, spec).stages, std::vector<std::string>{"coreg"});
}

TEST(Pipeline, NoiselessGenericLossZero) {
  ModelParams params;
  params.n = 50;
  params.L = 3;
  params.rho = 0.0;
  params.p.assign(3, 1.0);
  params.q.assign(3, 0.0);
  const SampleRecord rec = sample_imlsbm(params, balanced_assignment(50), 1);
  for (Method m : {Method::kSpectral, Method::kGeneric, Method::kProvable}) {
    MethodSpec spec;
    spec.method = m;
    spec.source = ParamsSource::kTrue;
    spec.rho_input = 0.0;
    const MethodOutcome out = run_method(rec, spec);
    EXPECT_EQ(out.loss_global, 0.0) << to_string(m);
    for (double v : out.loss_layers) EXPECT_EQ(v, 0.0);
  }
}

TEST(Pipeline, CoRegMatchesSpectralOnSingleLayer) {
  ModelParams params;
  params.n = 100;
  params.L = 1;
  params.rho = 0.0;
  params.p = {0.3};
  params.q = {0.05};
  const SampleRecord rec = sample_imlsbm(params, balanced_assignment(100), 6);
  MethodSpec spec;
  spec.seed = 6;
  spec.source = ParamsSource::kTrue;
  spec.method = Method::kSpectral;
  const double spectral = run_method(rec, spec).loss_global;
  spec.method = Method::kCoReg;
  EXPECT_EQ(run_method(rec, spec).loss_global, spectral);
}

TEST(Experiment, SchemaAndRowCount) {
  ExperimentConfig config = small_config(Scenario::kCompareAlgs);
  config.c = {3.0};
  const ExperimentResult r = run_experiment(config);
  EXPECT_TRUE(r.failures.empty());
  // 3 replications x 2 methods x (global + weak + intermediate + strong).
  EXPECT_EQ(r.rows.size(), 3u * 2u * 4u);
  const std::string csv = results_text(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "scenario,n,L,rho,c,rho_input,method,params_source,layer_group,"
            "replication,loss_global,loss_individual_mean,wall_ms");
}

TEST(Experiment, DeterministicAcrossJobCounts) {
  ExperimentConfig config = small_config(Scenario::kSnrSweep);
  config.c = {2.0, 4.0};
  const std::string a = strip_wall_ms(results_text(run_experiment(config)));
  config.jobs = 1;
  const std::string b = strip_wall_ms(results_text(run_experiment(config)));
  EXPECT_EQ(a, b);
}

TEST(Experiment, SensitivityAddsTrueParameterReference) {
  ExperimentConfig config = small_config(Scenario::kSensitivity);
  config.replications = 1;
  const ExperimentResult r = run_experiment(config);
  std::set<std::pair<std::string, double>> variants;
  for (const auto& row : r.rows) {
    variants.insert({row.params_source, row.rho_input});
  }
  EXPECT_EQ(variants.size(), 6u);
  EXPECT_TRUE(variants.count({"true", 0.1}));
}

TEST(Experiment, WeightsAndCoRegLimit) {
  ExperimentConfig config = small_config(Scenario::kWeights);
  config.c = {3.0};
  config.replications = 1;
  const ExperimentResult w = run_experiment(config);
  std::set<std::string> methods;
  for (const auto& row : w.rows) methods.insert(row.method + "/" + row.params_source);
  EXPECT_EQ(methods.size(), 6u);
  EXPECT_TRUE(methods.count("spectral-variance/estimated"));

  ExperimentConfig base = small_config(Scenario::kBaselineCompare);
  base.c = {3.0};
  base.coreg_replications = 1;
  const ExperimentResult b = run_experiment(base);
  std::size_t coreg_rows = 0;
  for (const auto& row : b.rows) coreg_rows += row.method == "coreg";
  EXPECT_EQ(coreg_rows, 4u);
}

TEST(Experiment, WritesOutputFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "imlsbm_exp_test";
  std::filesystem::remove_all(dir);
  ExperimentConfig config = small_config(Scenario::kCompareAlgs);
  config.c = {3.0};
  config.replications = 2;
  const ExperimentResult r = run_experiment(config);
  write_experiment(dir, config, r);
  EXPECT_TRUE(std::filesystem::exists(dir / "results.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "summary.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "plot.csv"));
  EXPECT_FALSE(std::filesystem::exists(dir / "failures.csv"));
  std::ifstream in(dir / "summary.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header,
            "scenario,n,L,rho,c,rho_input,method,params_source,layer_group,"
            "metric,count,mean,sd,q05,q25,q50,q75,q95");
  std::filesystem::remove_all(dir);
}

TEST(Experiment, FailuresAreRecorded) {
  ExperimentConfig config = small_config(Scenario::kCompareAlgs);
  config.n = 3;
  config.L = 1;
  config.c = {2.0};
  config.scaling = Scaling::kWeak;
  config.methods = {"provable"};
  config.replications = 2;
  // Every replication ends up as rows or as a failure record.
  const ExperimentResult r = run_experiment(config);
  EXPECT_EQ(r.rows.size() / 2 + r.failures.size(), 2u);
}

}  // namespace
}  // namespace imlsbm
