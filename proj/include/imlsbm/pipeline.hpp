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

#ifndef IMLSBM_PIPELINE_HPP_
#define IMLSBM_PIPELINE_HPP_

// End-to-end detection on one instance: parameter source, initialization,
// refinement, losses against the stored truth.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "imlsbm/baseline.hpp"
#include "imlsbm/error.hpp"
#include "imlsbm/estimate.hpp"
#include "imlsbm/metrics.hpp"
#include "imlsbm/model.hpp"
#include "imlsbm/refine.hpp"
#include "imlsbm/spectral.hpp"

namespace imlsbm {

enum class Method { kSpectral, kGeneric, kProvable, kCoReg };
enum class ParamsSource { kTrue, kEstimated };

inline const char* to_string(Method method) {
  switch (method) {
    case Method::kSpectral:
      return "spectral";
    case Method::kGeneric:
      return "generic";
    case Method::kProvable:
      return "provable";
    case Method::kCoReg:
      return "coreg";
  }
  return "unknown";
}

inline const char* to_string(ParamsSource source) {
  return source == ParamsSource::kTrue ? "true" : "estimated";
}

inline const char* to_string(WeightScheme scheme) {
  switch (scheme) {
    case WeightScheme::kUniform:
      return "uniform";
    case WeightScheme::kVariance:
      return "variance";
    case WeightScheme::kStdev:
      return "stdev";
  }
  return "unknown";
}

inline Method parse_method(std::string_view name) {
  if (name == "spectral") return Method::kSpectral;
  if (name == "generic") return Method::kGeneric;
  if (name == "provable") return Method::kProvable;
  if (name == "coreg") return Method::kCoReg;
  throw ParameterError("unknown method '" + std::string(name) + "'");
}

inline ParamsSource parse_params_source(std::string_view name) {
  if (name == "true") return ParamsSource::kTrue;
  if (name == "estimated") return ParamsSource::kEstimated;
  throw ParameterError("unknown parameter source '" + std::string(name) +
                       "'");
}

inline WeightScheme parse_weight_scheme(std::string_view name) {
  if (name == "uniform") return WeightScheme::kUniform;
  if (name == "variance") return WeightScheme::kVariance;
  if (name == "stdev") return WeightScheme::kStdev;
  throw ParameterError("unknown weight scheme '" + std::string(name) + "'");
}

struct MethodSpec {
  Method method = Method::kGeneric;
  ParamsSource source = ParamsSource::kEstimated;
  double rho_input = 0.1;
  WeightScheme weights = WeightScheme::kUniform;
  SpectralOptions spectral;  // spectral.seed is overwritten by `seed`
  CoRegConfig coreg;         // coreg.seed is overwritten by `seed`
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct MethodOutcome {
  DetectionResult detection;
  std::vector<std::string> stages;
  std::optional<ProbEstimates> estimates;  // plugin values, if estimated
  double loss_global = 0.0;
  std::vector<double> loss_layers;
  double wall_ms = 0.0;
};

inline double mean_of(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double total = 0.0;
  for (double v : values) total += v;
  return total / static_cast<double>(values.size());
}

inline MethodOutcome run_method(const SampleRecord& record,
                                const MethodSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  const MultilayerGraph& graph = record.graph;
  const std::size_t L = graph.num_layers();
  MethodOutcome out;
  SpectralOptions spectral = spec.spectral;
  spectral.seed = spec.seed;

  if (spec.method == Method::kCoReg) {
    CoRegConfig config = spec.coreg;
    config.seed = spec.seed;
    config.jobs = spec.jobs;
    out.stages.push_back("coreg");
    out.detection = coreg_cluster(graph, config).detection;
  } else {
    std::vector<double> p_init;
    if (spec.source == ParamsSource::kTrue) {
      p_init = record.params.p;
    } else {
      out.stages.push_back("moment");
      p_init = moment_p_hat(graph);
    }
    const WeightVector omega = make_weights(spec.weights, p_init);
    out.stages.push_back("spectral");
    const SpectralInitResult init =
        spectral_initialize(graph, omega, p_init, spectral);
    if (spec.method == Method::kSpectral) {
      out.detection.z_star_hat = init.assignment;
      out.detection.z_layer_hat.assign(L, init.assignment);
    } else {
      RefineConfig config;
      config.rho_input = spec.rho_input;
      config.jobs = spec.jobs;
      if (spec.source == ParamsSource::kTrue) {
        config.p = record.params.p;
        config.q = record.params.q;
      } else {
        out.stages.push_back("plugin");
        out.estimates = plugin_pq(graph, init.assignment);
        config.p = out.estimates->p_hat;
        config.q = out.estimates->q_hat;
      }
      out.stages.push_back("refine");
      if (spec.method == Method::kGeneric) {
        config.mode = RefineMode::kGeneric;
        out.detection = refine_generic(init.assignment, graph, config);
      } else {
        config.mode = RefineMode::kProvable;
        const SpectralLeaveOneOut loo(graph, omega, p_init, spectral);
        out.detection = refine_provable(graph, config, loo);
      }
    }
  }

  out.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  out.loss_global = misclustering(out.detection.z_star_hat, record.z_star).value;
  out.loss_layers.resize(L);
  for (std::size_t l = 0; l < L; ++l) {
    out.loss_layers[l] =
        misclustering(out.detection.z_layer_hat[l], record.z_layers[l]).value;
  }
  return out;
}

}  // namespace imlsbm

#endif  // IMLSBM_PIPELINE_HPP_
