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

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cvkrotov/krotov.hpp"
#include "cvkrotov/tools/config.hpp"

namespace cvk::tools {

enum ExitCode : int { kOk = 0, kConfigError = 2, kRuntimeError = 3 };

struct RunSummary {
  std::vector<std::filesystem::path> files;
  double final_objective = 0.0;
  std::vector<Residuals> final_residuals;
  int iterations = 0;
  int monotonicity_violations = 0;
};

/// Controls from `controls_file` when set, otherwise the initial guess.
ControlGrid scenario_controls(const ScenarioConfig& cfg);
ControlProblem scenario_problem(const ScenarioConfig& cfg);

/// Writes dynamics (and wigner/spectrum/residuals when emitted) for the
/// scenario's fixed controls.
RunSummary run_simulate(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

/// Krotov optimization; writes controls, iterations, residuals, final
/// dynamics and manifest.json.
RunSummary run_optimize(const ScenarioConfig& cfg, const std::filesystem::path& out_dir,
                        bool seedless = true);

/// spectrum.csv: one row per channel, magnitudes of DFT bins 0..9 of the
/// clamped controls.
RunSummary run_spectrum(const std::filesystem::path& controls_file,
                        const std::filesystem::path& out_dir);

/// One CSV per (time, mode pair) with columns a, b, W.
RunSummary run_wigner(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

/// File name used for a Wigner slice, e.g. wigner_t7.5_1-2.csv.
std::string wigner_file_name(double time, const ModePair& pair);

}  // namespace cvk::tools
