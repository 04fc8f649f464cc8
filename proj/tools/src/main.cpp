// Copyright 2026 The cvkrotov Authors
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

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cvkrotov/tools/config.hpp"
#include "cvkrotov/tools/runner.hpp"
#include "cvkrotov/version.hpp"

namespace fs = std::filesystem;
using namespace cvk::tools;

namespace {

fs::path output_dir(const ScenarioConfig& cfg, const std::string& flag) {
  if (!flag.empty()) return flag;
  if (cfg.output_dir) return *cfg.output_dir;
  throw ConfigError({"no output directory: pass --out or set output.dir"});
}

void report(const RunSummary& s) {
  for (const auto& f : s.files) std::printf("wrote %s\n", f.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian chain transfer: simulation and Krotov control"};
  app.set_version_flag("--version", CVKROTOV_VERSION);
  app.require_subcommand(1);

  std::string config_path;
  std::string out;
  std::optional<int> iterations;
  bool seedless = false;
  std::string controls_path;

  auto* sim = app.add_subcommand("simulate", "Propagate fixed controls and write dynamics");
  sim->add_option("--config", config_path, "Scenario config (JSON)")->required();
  sim->add_option("--out", out, "Output directory");
  sim->add_flag("--seedless", seedless, "Deterministic operation (no RNG is used anywhere)");

  auto* opt = app.add_subcommand("optimize", "Run the Krotov optimization");
  opt->add_option("--config", config_path, "Scenario config (JSON)")->required();
  opt->add_option("--out", out, "Output directory");
  opt->add_option("--iterations", iterations, "Override krotov.max_iterations")
      ->check(CLI::NonNegativeNumber);
  opt->add_flag("--seedless", seedless, "Deterministic operation (no RNG is used anywhere)");

  auto* spec_cmd = app.add_subcommand("spectrum", "DFT magnitudes of a controls file");
  spec_cmd->add_option("--controls", controls_path, "Controls CSV")->required();
  spec_cmd->add_option("--out", out, "Output directory")->required();

  auto* wig = app.add_subcommand("wigner", "Wigner slices at the configured times");
  wig->add_option("--config", config_path, "Scenario config (JSON)")->required();
  wig->add_option("--out", out, "Output directory");
  std::vector<double> times;
  wig->add_option("--times", times, "Override wigner.times");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (spec_cmd->parsed()) {
      report(run_spectrum(controls_path, out));
      return kOk;
    }
    ScenarioConfig cfg = load_config(config_path);
    const fs::path dir = output_dir(cfg, out);
    if (sim->parsed()) {
      report(run_simulate(cfg, dir));
    } else if (opt->parsed()) {
      if (iterations) cfg.krotov.max_iterations = *iterations;
      const RunSummary s = run_optimize(cfg, dir, seedless);
      report(s);
      std::printf("iterations %d, final J %.17g, monotonicity violations %d\n", s.iterations,
                  s.final_objective, s.monotonicity_violations);
    } else if (wig->parsed()) {
      if (!times.empty()) {
        for (double t : times)
          if (t < 0.0 || t > cfg.grid.horizon)
            throw ConfigError({"--times: " + std::to_string(t) + " outside [0, T]"});
        cfg.wigner.times = times;
      }
      report(run_wigner(cfg, dir));
    }
    return kOk;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfigError;
  } catch (const cvk::OptimizationError& e) {
    std::fprintf(stderr, "optimizer error at iteration %d: %s\n", e.iteration(), e.what());
    return kRuntimeError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime error: %s\n", e.what());
    return kRuntimeError;
  }
}
