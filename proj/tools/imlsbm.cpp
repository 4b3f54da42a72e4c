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

// Command-line front end: generate, detect, rate, estimate, experiment.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "imlsbm.hpp"

namespace {

namespace fs = std::filesystem;
using namespace imlsbm;

constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string method = "generic";
  std::string params = "estimated";
  std::optional<double> rho_input;
  bool full = false;
  std::optional<int> jobs;
  std::string input;
  bool curve = false;
  bool method_set = false;
  bool params_set = false;
};

int resolve_jobs(const Options& opt) {
  return opt.jobs ? std::max(1, *opt.jobs) : default_jobs();
}

ExperimentConfig config_from(const Options& opt) {
  if (opt.config.empty()) throw UsageError("--config is required");
  ExperimentConfig config = load_config(opt.config);
  if (opt.full) config.make_full();
  if (opt.seed) config.seed = *opt.seed;
  if (!opt.out.empty()) config.out = opt.out;
  if (opt.method_set) config.methods = {opt.method};
  if (opt.params_set) config.params = {opt.params};
  if (opt.rho_input) config.rho_input = {*opt.rho_input};
  config.jobs = resolve_jobs(opt);
  config.fill_defaults();
  config.validate();
  return config;
}

// Writes to <out>/<name> when --out is given, otherwise to stdout.
template <typename Writer>
void emit(const Options& opt, const std::string& name, Writer&& writer) {
  if (opt.out.empty()) {
    writer(std::cout);
    std::cout.flush();
    return;
  }
  std::error_code ec;
  fs::create_directories(opt.out, ec);
  if (ec) throw IoError("cannot create '" + opt.out + "': " + ec.message());
  const fs::path path = fs::path(opt.out) / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  writer(out);
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
  std::cerr << "wrote " << path.string() << '\n';
}

int cmd_generate(const Options& opt) {
  ExperimentConfig config = config_from(opt);
  const fs::path dir = config.out;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  const Assignment z_star = balanced_assignment(config.n);
  std::size_t point = 0;
  const bool many = config.rho.size() * config.c.size() > 1;
  for (double rho : config.rho) {
    for (double c : config.c) {
      const ExperimentDesign design =
          experiment_params(config.n, config.L, c, rho, config.scaling);
      fs::path target = dir;
      if (many) {
        target /= "point_" + std::to_string(point);
        fs::create_directories(target, ec);
        if (ec) {
          throw IoError("cannot create '" + target.string() + "': " +
                        ec.message());
        }
      }
      for (std::size_t r = 0; r < config.replications; ++r) {
        const SampleRecord record =
            sample_imlsbm(design.params, z_star, config.seed + r);
        write_sample(target / ("instance_" + std::to_string(r) + ".txt"),
                     record);
      }
      ++point;
    }
  }
  std::cerr << "wrote " << point * config.replications << " instance files to "
            << dir.string() << '\n';
  return 0;
}

int cmd_detect(const Options& opt) {
  const SampleRecord record = read_sample(fs::path(opt.input));
  MethodSpec spec;
  spec.method = parse_method(opt.method);
  spec.source = parse_params_source(opt.params);
  spec.rho_input = opt.rho_input ? *opt.rho_input : record.params.rho;
  spec.seed = opt.seed ? *opt.seed : record.seed;
  spec.jobs = resolve_jobs(opt);
  const MethodOutcome outcome = run_method(record, spec);
  emit(opt, "result.txt", [&](std::ostream& out) {
    out << "method " << to_string(spec.method) << '\n';
    out << "params_source " << to_string(spec.source) << '\n';
    out << "rho_input " << format_double(spec.rho_input) << '\n';
    out << "seed " << spec.seed << '\n';
    out << "stages";
    for (const auto& stage : outcome.stages) out << ' ' << stage;
    out << '\n';
    if (outcome.estimates) {
      for (std::size_t l = 0; l < outcome.estimates->p_hat.size(); ++l) {
        out << "estimate " << l << ' '
            << format_double(outcome.estimates->p_hat[l]) << ' '
            << format_double(outcome.estimates->q_hat[l]) << '\n';
      }
    }
    out << "loss_global " << format_double(outcome.loss_global) << '\n';
    out << "loss_individual_mean "
        << format_double(mean_of(outcome.loss_layers)) << '\n';
    for (std::size_t l = 0; l < outcome.loss_layers.size(); ++l) {
      out << "loss_layer " << l << ' '
          << format_double(outcome.loss_layers[l]) << '\n';
    }
    out << "aligned " << (outcome.detection.aligned ? 1 : 0) << '\n';
    out << "wall_ms " << format_fixed(outcome.wall_ms, 3) << '\n';
    out << "z_star_hat";
    for (int s : outcome.detection.z_star_hat.labels()) out << ' ' << s;
    out << '\n';
    for (std::size_t l = 0; l < outcome.detection.z_layer_hat.size(); ++l) {
      out << "z_layer_hat " << l;
      for (int s : outcome.detection.z_layer_hat[l].labels()) out << ' ' << s;
      out << '\n';
    }
  });
  return 0;
}

int cmd_rate(const Options& opt) {
  const ModelParams params = read_params(fs::path(opt.input));
  const RateReport report = rate_report(params);
  emit(opt, "rate.txt", [&](std::ostream& out) {
    out << "n " << params.n << '\n';
    out << "L " << params.L << '\n';
    out << "rho " << format_double(params.rho) << '\n';
    out << "j_rho " << format_double(report.j_rho) << '\n';
    out << "m " << format_double(report.m) << '\n';
    out << "global_min " << format_double(report.global.value) << '\n';
    out << "global_subset";
    for (std::size_t l : report.global.subset) out << ' ' << l;
    out << '\n';
    out << "global_certified " << (report.global.certified ? 1 : 0) << '\n';
    out << "predicted_global_exponent "
        << format_double(report.predicted_global_exponent) << '\n';
    for (std::size_t l = 0; l < report.layers.size(); ++l) {
      const LayerRate& rate = report.layers[l];
      out << "layer " << l << " info " << format_double(rate.info.value)
          << " j_single " << format_double(rate.j_single)
          << " predicted_exponent " << format_double(rate.predicted_exponent)
          << '\n';
    }
  });
  if (opt.curve) {
    if (opt.out.empty()) throw UsageError("--curve needs --out");
    emit(opt, "rate_curve.csv", [&](std::ostream& out) {
      out << "t,layer,info\n";
      constexpr int kPoints = 101;
      for (std::size_t l = 0; l < params.L; ++l) {
        for (int k = 0; k < kPoints; ++k) {
          const double t = static_cast<double>(k) / (kPoints - 1);
          out << format_double(t) << ',' << l << ','
              << format_double(layer_info(params.p[l], params.q[l], t))
              << '\n';
        }
      }
    });
  }
  return 0;
}

int cmd_estimate(const Options& opt) {
  const SampleRecord record = read_sample(fs::path(opt.input));
  const std::vector<double> moment = moment_p_hat(record.graph);
  SpectralOptions spectral;
  spectral.seed = opt.seed ? *opt.seed : record.seed;
  const SpectralInitResult init = spectral_initialize(
      record.graph, uniform_weights(record.params.L), moment, spectral);
  const ProbEstimates plugin = plugin_pq(record.graph, init.assignment);
  emit(opt, "estimate.txt", [&](std::ostream& out) {
    out << "fallback " << (plugin.fallback ? 1 : 0) << '\n';
    out << "# layer moment_p plugin_p plugin_q swapped tied\n";
    for (std::size_t l = 0; l < moment.size(); ++l) {
      out << "layer " << l << ' ' << format_double(moment[l]) << ' '
          << format_double(plugin.p_hat[l]) << ' '
          << format_double(plugin.q_hat[l]) << ' '
          << static_cast<int>(plugin.swapped[l]) << ' '
          << static_cast<int>(plugin.tied[l]) << '\n';
      if (plugin.swapped[l]) {
        std::cerr << "warning: layer " << l
                  << " plugin estimates were swapped to keep p > q\n";
      }
    }
  });
  return 0;
}

int cmd_experiment(const Options& opt) {
  const ExperimentConfig config = config_from(opt);
  const ExperimentResult result = run_experiment(config);
  write_experiment(config.out, config, result);
  std::cerr << "wrote " << result.rows.size() << " rows to "
            << (fs::path(config.out) / "results.csv").string() << '\n';
  if (!result.failures.empty()) {
    std::cerr << result.failures.size() << " replication(s) failed; see "
              << (fs::path(config.out) / "failures.csv").string() << '\n';
    return kExitRuntime;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Community detection in inhomogeneous multilayer SBMs"};
  app.require_subcommand(1);
  Options opt;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", opt.seed, "Base seed");
  };
  auto add_out = [&](CLI::App* cmd, const std::string& help) {
    cmd->add_option("--out", opt.out, help);
  };
  auto add_jobs = [&](CLI::App* cmd) {
    cmd->add_option("--jobs", opt.jobs,
                    "Worker threads (default: IMLSBM_JOBS or all cores)");
  };
  auto add_method = [&](CLI::App* cmd) {
    cmd->add_option("--method", opt.method, "Detection method")
        ->check(CLI::IsMember({"spectral", "generic", "provable", "coreg"}))
        ->each([&](const std::string&) { opt.method_set = true; });
  };
  auto add_params = [&](CLI::App* cmd) {
    cmd->add_option("--params", opt.params, "Edge probabilities to use")
        ->check(CLI::IsMember({"true", "estimated"}))
        ->each([&](const std::string&) { opt.params_set = true; });
  };
  auto add_rho_input = [&](CLI::App* cmd) {
    cmd->add_option("--rho-input", opt.rho_input, "Flip probability used");
  };

  CLI::App* generate = app.add_subcommand("generate", "Sample instances");
  generate->add_option("--config", opt.config, "Experiment config (JSON)")
      ->required();
  add_seed(generate);
  add_out(generate, "Output directory");
  generate->add_flag("--full", opt.full, "Full-size n, L and replications");

  CLI::App* detect = app.add_subcommand("detect", "Detect on one instance");
  detect->add_option("instance", opt.input, "Instance file")->required();
  add_method(detect);
  add_params(detect);
  add_rho_input(detect);
  add_seed(detect);
  add_out(detect, "Output directory for result.txt (default: stdout)");
  add_jobs(detect);

  CLI::App* rate = app.add_subcommand("rate", "Minimax rate quantities");
  rate->add_option("params", opt.input, "Parameter or instance file")
      ->required();
  add_out(rate, "Output directory for rate.txt (default: stdout)");
  rate->add_flag("--curve", opt.curve, "Also write rate_curve.csv");

  CLI::App* estimate = app.add_subcommand("estimate", "Estimate p and q");
  estimate->add_option("instance", opt.input, "Instance file")->required();
  add_seed(estimate);
  add_out(estimate, "Output directory for estimate.txt (default: stdout)");

  CLI::App* experiment =
      app.add_subcommand("experiment", "Run a simulation study");
  experiment->add_option("--config", opt.config, "Experiment config (JSON)")
      ->required();
  add_seed(experiment);
  add_out(experiment, "Output directory");
  add_method(experiment);
  add_params(experiment);
  add_rho_input(experiment);
  experiment->add_flag("--full", opt.full, "Full-size n, L and replications");
  add_jobs(experiment);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (generate->parsed()) return cmd_generate(opt);
    if (detect->parsed()) return cmd_detect(opt);
    if (rate->parsed()) return cmd_rate(opt);
    if (estimate->parsed()) return cmd_estimate(opt);
    if (experiment->parsed()) return cmd_experiment(opt);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
