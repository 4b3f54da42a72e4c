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

#ifndef IMLSBM_EXPERIMENT_HPP_
#define IMLSBM_EXPERIMENT_HPP_

// Monte Carlo harness for the simulation studies: configuration, the five
// scenarios, long-format results, summaries and plot data.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "imlsbm/error.hpp"
#include "imlsbm/io.hpp"
#include "imlsbm/metrics.hpp"
#include "imlsbm/model.hpp"
#include "imlsbm/parallel.hpp"
#include "imlsbm/pipeline.hpp"

namespace imlsbm {

enum class Scenario { kCompareAlgs, kSnrSweep, kSensitivity, kWeights,
                      kBaselineCompare };

inline const char* to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::kCompareAlgs:
      return "compare-algs";
    case Scenario::kSnrSweep:
      return "snr-sweep";
    case Scenario::kSensitivity:
      return "sensitivity";
    case Scenario::kWeights:
      return "weights";
    case Scenario::kBaselineCompare:
      return "baseline-compare";
  }
  return "unknown";
}

inline Scenario parse_scenario(std::string_view name) {
  for (Scenario s : {Scenario::kCompareAlgs, Scenario::kSnrSweep,
                     Scenario::kSensitivity, Scenario::kWeights,
                     Scenario::kBaselineCompare}) {
    if (name == to_string(s)) return s;
  }
  throw ParameterError("unknown scenario '" + std::string(name) + "'");
}

inline Scaling parse_scaling(std::string_view name) {
  if (name == "mixed") return Scaling::kMixed;
  if (name == "weak") return Scaling::kWeak;
  if (name == "intermediate") return Scaling::kIntermediate;
  if (name == "strong") return Scaling::kStrong;
  throw ParameterError("unknown scaling '" + std::string(name) + "'");
}

struct ExperimentConfig {
  Scenario scenario = Scenario::kCompareAlgs;
  std::size_t n = 400;
  std::size_t L = 50;
  std::vector<double> rho{0.1};
  std::vector<double> c;          // empty: scenario default
  std::vector<double> rho_input;  // empty: scenario default
  std::size_t replications = 100;
  std::uint64_t seed = 1;
  std::vector<std::string> methods;  // empty: scenario default
  std::vector<std::string> params;   // empty: scenario default
  std::vector<std::string> weights;  // weights scenario only
  std::string out = "results";
  int jobs = 0;                        // 0: default_jobs()
  std::size_t coreg_replications = 0;  // 0: every replication
  Scaling scaling = Scaling::kMixed;
  double gamma = 5.0;

  // Full-size runs.
  void make_full() {
    n = 1000;
    L = 100;
    replications = 500;
  }

  void fill_defaults() {
    if (c.empty()) {
      switch (scenario) {
        case Scenario::kCompareAlgs:
          c = {2.0, 5.0};
          break;
        case Scenario::kSensitivity:
          c = {3.0};
          break;
        case Scenario::kWeights:
          c = {2.0, 3.0, 4.0, 5.0};
          break;
        case Scenario::kSnrSweep:
        case Scenario::kBaselineCompare:
          c = {1.5, 2.0, 3.0, 5.0};
          break;
      }
    }
    if (methods.empty()) {
      switch (scenario) {
        case Scenario::kCompareAlgs:
          methods = {"generic", "provable"};
          break;
        case Scenario::kSnrSweep:
          methods = {"spectral", "generic"};
          break;
        case Scenario::kSensitivity:
          methods = {"generic"};
          break;
        case Scenario::kWeights:
          methods = {"spectral"};
          break;
        case Scenario::kBaselineCompare:
          methods = {"generic", "coreg"};
          break;
      }
    }
    if (params.empty()) {
      params = scenario == Scenario::kWeights
                   ? std::vector<std::string>{"true", "estimated"}
                   : std::vector<std::string>{"estimated"};
    }
    if (weights.empty()) {
      weights = scenario == Scenario::kWeights
                    ? std::vector<std::string>{"uniform", "variance", "stdev"}
                    : std::vector<std::string>{"uniform"};
    }
  }

  void validate() const {
    detail::require(n >= 3, "n must be at least 3");
    detail::require(L >= 1, "L must be at least 1");
    detail::require(replications >= 1, "replications must be at least 1");
    detail::require(!rho.empty(), "rho grid must be nonempty");
    detail::require(!c.empty(), "c grid must be nonempty");
    detail::require(!methods.empty(), "method list must be nonempty");
    detail::require(!params.empty(), "params list must be nonempty");
    detail::require(!weights.empty(), "weight list must be nonempty");
    detail::require(gamma > 1.0, "gamma must exceed 1");
    for (double r : rho) {
      detail::require(r >= 0.0 && r < 0.5, "rho must lie in [0, 1/2)");
    }
    for (double r : rho_input) {
      detail::require(r >= 0.0 && r < 0.5, "rho_input must lie in [0, 1/2)");
    }
    for (double v : c) detail::require(v > 1.0, "c must exceed 1");
    for (const auto& m : methods) parse_method(m);
    for (const auto& p : params) parse_params_source(p);
    for (const auto& w : weights) parse_weight_scheme(w);
  }
};

namespace detail {

inline std::vector<double> number_or_list(const nlohmann::json& value,
                                          const std::string& key) {
  std::vector<double> out;
  if (value.is_number()) {
    out.push_back(value.get<double>());
  } else if (value.is_array()) {
    for (const auto& v : value) {
      require(v.is_number(), "'" + key + "' entries must be numbers");
      out.push_back(v.get<double>());
    }
  } else {
    throw ParameterError("'" + key + "' must be a number or a list");
  }
  return out;
}

inline std::vector<std::string> string_or_list(const nlohmann::json& value,
                                               const std::string& key) {
  std::vector<std::string> out;
  if (value.is_string()) {
    out.push_back(value.get<std::string>());
  } else if (value.is_array()) {
    for (const auto& v : value) {
      require(v.is_string(), "'" + key + "' entries must be strings");
      out.push_back(v.get<std::string>());
    }
  } else {
    throw ParameterError("'" + key + "' must be a string or a list");
  }
  return out;
}

template <typename T>
T unsigned_value(const nlohmann::json& value, const std::string& key) {
  require(value.is_number_unsigned(),
          "'" + key + "' must be a nonnegative integer");
  return value.get<T>();
}

}  // namespace detail

// Keys mirror the ExperimentConfig fields; unknown keys are rejected.
inline ExperimentConfig parse_config(const std::string& text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParameterError(std::string("config is not valid JSON: ") + e.what());
  }
  detail::require(root.is_object(), "config must be a JSON object");
  ExperimentConfig config;
  for (const auto& [key, value] : root.items()) {
    if (key == "scenario") {
      detail::require(value.is_string(), "'scenario' must be a string");
      config.scenario = parse_scenario(value.get<std::string>());
    } else if (key == "n") {
      config.n = detail::unsigned_value<std::size_t>(value, key);
    } else if (key == "L") {
      config.L = detail::unsigned_value<std::size_t>(value, key);
    } else if (key == "rho") {
      config.rho = detail::number_or_list(value, key);
    } else if (key == "c") {
      config.c = detail::number_or_list(value, key);
    } else if (key == "rho_input") {
      config.rho_input = detail::number_or_list(value, key);
    } else if (key == "replications") {
      config.replications = detail::unsigned_value<std::size_t>(value, key);
    } else if (key == "seed") {
      config.seed = detail::unsigned_value<std::uint64_t>(value, key);
    } else if (key == "methods") {
      config.methods = detail::string_or_list(value, key);
    } else if (key == "params") {
      config.params = detail::string_or_list(value, key);
    } else if (key == "weights") {
      config.weights = detail::string_or_list(value, key);
    } else if (key == "out") {
      detail::require(value.is_string(), "'out' must be a string");
      config.out = value.get<std::string>();
    } else if (key == "jobs") {
      config.jobs = detail::unsigned_value<int>(value, key);
    } else if (key == "coreg_replications") {
      config.coreg_replications =
          detail::unsigned_value<std::size_t>(value, key);
    } else if (key == "scaling") {
      detail::require(value.is_string(), "'scaling' must be a string");
      config.scaling = parse_scaling(value.get<std::string>());
    } else if (key == "gamma") {
      detail::require(value.is_number(), "'gamma' must be a number");
      config.gamma = value.get<double>();
    } else {
      throw ParameterError("unknown config key '" + key + "'");
    }
  }
  return config;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str());
  } catch (const ParameterError& e) {
    throw ParameterError(path.string() + ": " + e.what());
  }
}

struct ResultRow {
  Scenario scenario = Scenario::kCompareAlgs;
  std::size_t n = 0;
  std::size_t L = 0;
  double rho = 0.0;
  double c = 0.0;
  double rho_input = 0.0;
  std::string method;
  std::string params_source;
  std::string layer_group;
  std::size_t replication = 0;
  double loss_global = 0.0;
  double loss_individual_mean = 0.0;
  double wall_ms = 0.0;
};

struct FailureRecord {
  double rho = 0.0;
  double c = 0.0;
  std::size_t replication = 0;
  std::string method;
  std::string message;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<FailureRecord> failures;
};

// One method configuration evaluated on every instance.
struct Variant {
  MethodSpec spec;
  std::string label;
  bool limited = false;  // runs only on the first coreg_replications
};

namespace detail {

inline std::vector<Variant> build_variants(const ExperimentConfig& config,
                                           double rho) {
  std::vector<double> rho_inputs = config.rho_input;
  if (rho_inputs.empty()) {
    if (config.scenario == Scenario::kSensitivity) {
      rho_inputs = {rho / 10.0, rho / 3.0, rho, 2.0 * rho, 3.0 * rho};
      rho_inputs.erase(std::remove_if(rho_inputs.begin(), rho_inputs.end(),
                                      [](double r) { return r >= 0.5; }),
                       rho_inputs.end());
    } else {
      rho_inputs = {rho};
    }
  }
  std::vector<Variant> variants;
  auto add = [&](Method method, ParamsSource source, WeightScheme weights,
                 double rho_input) {
    for (const Variant& v : variants) {
      if (v.spec.method == method && v.spec.source == source &&
          v.spec.weights == weights && v.spec.rho_input == rho_input) {
        return;
      }
    }
    Variant v;
    v.spec.method = method;
    v.spec.source = source;
    v.spec.weights = weights;
    v.spec.rho_input = rho_input;
    v.spec.spectral.gamma = config.gamma;
    v.label = to_string(method);
    if (config.scenario == Scenario::kWeights) {
      v.label += std::string("-") + to_string(weights);
    }
    v.limited = method == Method::kCoReg && config.coreg_replications > 0;
    variants.push_back(std::move(v));
  };
  for (const auto& m : config.methods) {
    const Method method = parse_method(m);
    for (const auto& w : config.weights) {
      for (const auto& p : config.params) {
        for (double r : rho_inputs) {
          add(method, parse_params_source(p), parse_weight_scheme(w), r);
        }
      }
    }
  }
  if (config.scenario == Scenario::kSensitivity) {
    // Reference run: the true rho with the true edge probabilities.
    add(parse_method(config.methods.front()), ParamsSource::kTrue,
        parse_weight_scheme(config.weights.front()), rho);
  }
  return variants;
}

inline void append_rows(std::vector<ResultRow>& rows, ResultRow base,
                        const MethodOutcome& outcome,
                        const std::vector<LayerGroup>& groups) {
  base.loss_global = outcome.loss_global;
  base.wall_ms = outcome.wall_ms;
  base.layer_group = "global";
  base.loss_individual_mean = mean_of(outcome.loss_layers);
  rows.push_back(base);
  for (LayerGroup group : {LayerGroup::kWeak, LayerGroup::kIntermediate,
                           LayerGroup::kStrong}) {
    std::vector<double> losses;
    for (std::size_t l = 0; l < groups.size(); ++l) {
      if (groups[l] == group) losses.push_back(outcome.loss_layers[l]);
    }
    if (losses.empty()) continue;
    base.layer_group = to_string(group);
    base.loss_individual_mean = mean_of(losses);
    rows.push_back(base);
  }
}

}  // namespace detail

// Replication r of every grid point uses the instance seed seed + r, so
// methods and grid points are compared on paired instances.  Jobs are
// (grid point, replication) pairs; results are assembled in job order.
inline ExperimentResult run_experiment(ExperimentConfig config) {
  config.fill_defaults();
  config.validate();
  const int jobs = config.jobs > 0 ? config.jobs : default_jobs();

  struct Point {
    double rho;
    double c;
  };
  std::vector<Point> points;
  for (double rho : config.rho) {
    for (double c : config.c) points.push_back({rho, c});
  }
  // Fail fast on designs that violate p < 1.
  for (const Point& pt : points) {
    experiment_params(config.n, config.L, pt.c, pt.rho, config.scaling);
  }

  const std::size_t total = points.size() * config.replications;
  std::vector<std::vector<ResultRow>> job_rows(total);
  std::vector<std::vector<FailureRecord>> job_failures(total);
  const Assignment z_star = balanced_assignment(config.n);

  parallel_for(total, jobs, [&](std::size_t job) {
    const Point& pt = points[job / config.replications];
    const std::size_t r = job % config.replications;
    const std::uint64_t seed = config.seed + r;
    const ExperimentDesign design =
        experiment_params(config.n, config.L, pt.c, pt.rho, config.scaling);
    const SampleRecord record = sample_imlsbm(design.params, z_star, seed);
    for (const Variant& variant : detail::build_variants(config, pt.rho)) {
      if (variant.limited && r >= config.coreg_replications) continue;
      MethodSpec spec = variant.spec;
      spec.seed = seed;
      spec.jobs = 1;
      ResultRow base;
      base.scenario = config.scenario;
      base.n = config.n;
      base.L = config.L;
      base.rho = pt.rho;
      base.c = pt.c;
      base.rho_input = spec.rho_input;
      base.method = variant.label;
      base.params_source = to_string(spec.source);
      base.replication = r;
      try {
        const MethodOutcome outcome = run_method(record, spec);
        detail::append_rows(job_rows[job], base, outcome, design.groups);
      } catch (const std::exception& e) {
        job_failures[job].push_back({pt.rho, pt.c, r, variant.label,
                                     e.what()});
      }
    }
  });

  ExperimentResult result;
  for (std::size_t job = 0; job < total; ++job) {
    for (auto& row : job_rows[job]) result.rows.push_back(std::move(row));
    for (auto& f : job_failures[job]) result.failures.push_back(std::move(f));
  }
  return result;
}

inline constexpr std::string_view kResultHeader =
    "scenario,n,L,rho,c,rho_input,method,params_source,layer_group,"
    "replication,loss_global,loss_individual_mean,wall_ms";

inline std::string format_fixed(double x, int precision) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), x,
                                    std::chars_format::fixed, precision);
  return std::string(buffer, result.ptr);
}

inline void write_results_csv(std::ostream& out,
                              const std::vector<ResultRow>& rows) {
  out << kResultHeader << '\n';
  for (const ResultRow& row : rows) {
    out << to_string(row.scenario) << ',' << row.n << ',' << row.L << ','
        << format_double(row.rho) << ',' << format_double(row.c) << ','
        << format_double(row.rho_input) << ',' << row.method << ','
        << row.params_source << ',' << row.layer_group << ','
        << row.replication << ',' << format_double(row.loss_global) << ','
        << format_double(row.loss_individual_mean) << ','
        << format_fixed(row.wall_ms, 3) << '\n';
  }
}

struct SummaryRow {
  Scenario scenario = Scenario::kCompareAlgs;
  std::size_t n = 0;
  std::size_t L = 0;
  double rho = 0.0;
  double c = 0.0;
  double rho_input = 0.0;
  std::string method;
  std::string params_source;
  std::string layer_group;
  Summary loss_global;
  Summary loss_individual;
};

// Groups rows by everything except the replication, in first-seen order.
inline std::vector<SummaryRow> summarize_results(
    const std::vector<ResultRow>& rows) {
  using Key = std::tuple<double, double, double, std::string, std::string,
                         std::string>;
  std::map<Key, std::size_t> index;
  std::vector<SummaryRow> out;
  std::vector<std::vector<double>> global;
  std::vector<std::vector<double>> individual;
  for (const ResultRow& row : rows) {
    const Key key{row.rho, row.c, row.rho_input, row.method,
                  row.params_source, row.layer_group};
    auto [it, inserted] = index.try_emplace(key, out.size());
    if (inserted) {
      SummaryRow s;
      s.scenario = row.scenario;
      s.n = row.n;
      s.L = row.L;
      s.rho = row.rho;
      s.c = row.c;
      s.rho_input = row.rho_input;
      s.method = row.method;
      s.params_source = row.params_source;
      s.layer_group = row.layer_group;
      out.push_back(std::move(s));
      global.emplace_back();
      individual.emplace_back();
    }
    global[it->second].push_back(row.loss_global);
    individual[it->second].push_back(row.loss_individual_mean);
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].loss_global = summarize(global[k]);
    out[k].loss_individual = summarize(individual[k]);
  }
  return out;
}

inline void write_summary_csv(std::ostream& out,
                              const std::vector<SummaryRow>& rows) {
  out << "scenario,n,L,rho,c,rho_input,method,params_source,layer_group,"
         "metric,count,mean,sd,q05,q25,q50,q75,q95\n";
  for (const SummaryRow& row : rows) {
    for (int m = 0; m < 2; ++m) {
      const Summary& s = m == 0 ? row.loss_global : row.loss_individual;
      out << to_string(row.scenario) << ',' << row.n << ',' << row.L << ','
          << format_double(row.rho) << ',' << format_double(row.c) << ','
          << format_double(row.rho_input) << ',' << row.method << ','
          << row.params_source << ',' << row.layer_group << ','
          << (m == 0 ? "loss_global" : "loss_individual_mean") << ','
          << s.count << ',' << format_double(s.mean) << ','
          << format_double(s.sd) << ',' << format_double(s.q05) << ','
          << format_double(s.q25) << ',' << format_double(s.q50) << ','
          << format_double(s.q75) << ',' << format_double(s.q95) << '\n';
    }
  }
}

// Plot description: one point per summary row.  The x axis is c, except
// log(1/rho_input) for sensitivity and log(1/rho) for a rho sweep.  Error
// bars are one standard deviation; se is the standard error of the mean.
inline void write_plot_csv(std::ostream& out, const ExperimentConfig& config,
                           const std::vector<SummaryRow>& rows) {
  std::string x_label = "c";
  if (config.scenario == Scenario::kSensitivity) {
    x_label = "log(1/rho_input)";
  } else if (config.rho.size() > 1) {
    x_label = "log(1/rho)";
  }
  out << "series,x_label,x,y,y_lo,y_hi,se\n";
  for (const SummaryRow& row : rows) {
    const bool global = row.layer_group == "global";
    const Summary& s = global ? row.loss_global : row.loss_individual;
    double x = row.c;
    if (x_label == "log(1/rho_input)") {
      x = row.rho_input > 0.0 ? std::log(1.0 / row.rho_input)
                              : std::numeric_limits<double>::infinity();
    } else if (x_label == "log(1/rho)") {
      x = row.rho > 0.0 ? std::log(1.0 / row.rho)
                        : std::numeric_limits<double>::infinity();
    }
    std::string series = row.method + "/" + row.params_source + "/" +
                         (global ? "global" : row.layer_group + "-individual");
    if (x_label == "log(1/rho_input)") {
      series += "/c=" + format_double(row.c);
    } else if (x_label == "c" && config.rho.size() == 1 &&
               config.scenario != Scenario::kSensitivity) {
      series += "/rho_input=" + format_double(row.rho_input);
    } else {
      series += "/c=" + format_double(row.c);
    }
    out << series << ',' << x_label << ',' << format_double(x) << ','
        << format_double(s.mean) << ',' << format_double(s.mean - s.sd)
        << ',' << format_double(s.mean + s.sd) << ','
        << format_double(s.sd / std::sqrt(static_cast<double>(s.count)))
        << '\n';
  }
}

inline void write_failures_csv(std::ostream& out,
                               const std::vector<FailureRecord>& failures) {
  out << "rho,c,replication,method,message\n";
  for (const FailureRecord& f : failures) {
    std::string message = f.message;
    std::replace(message.begin(), message.end(), ',', ';');
    std::replace(message.begin(), message.end(), '\n', ' ');
    out << format_double(f.rho) << ',' << format_double(f.c) << ','
        << f.replication << ',' << f.method << ',' << message << '\n';
  }
}

// Writes results.csv, summary.csv, plot.csv and, when needed,
// failures.csv under `dir`.
inline void write_experiment(const std::filesystem::path& dir,
                             ExperimentConfig config,
                             const ExperimentResult& result) {
  config.fill_defaults();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  }
  auto emit = [&](const std::string& name, auto&& writer) {
    const std::filesystem::path path = dir / name;
    std::ofstream out = detail::open_output(path);
    writer(out);
    detail::finish_output(out, path);
  };
  emit("results.csv",
       [&](std::ostream& out) { write_results_csv(out, result.rows); });
  if (!result.rows.empty()) {
    const std::vector<SummaryRow> summary = summarize_results(result.rows);
    emit("summary.csv",
         [&](std::ostream& out) { write_summary_csv(out, summary); });
    emit("plot.csv",
         [&](std::ostream& out) { write_plot_csv(out, config, summary); });
  }
  if (!result.failures.empty()) {
    emit("failures.csv",
         [&](std::ostream& out) { write_failures_csv(out, result.failures); });
  }
}

}  // namespace imlsbm

#endif  // IMLSBM_EXPERIMENT_HPP_
