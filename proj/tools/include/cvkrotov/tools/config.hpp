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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cvkrotov/chain.hpp"
#include "cvkrotov/krotov.hpp"
#include "cvkrotov/measures.hpp"
#include "cvkrotov/open_system.hpp"

namespace cvk::tools {

/// Invalid configuration. `violations` lists every problem found.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

struct EmitFlags {
  bool controls = true;
  bool dynamics = true;
  bool spectrum = false;
  bool wigner = false;
  bool residuals = true;
  bool iterations = true;
};

struct WignerRequest {
  std::vector<double> times;
  std::vector<ModePair> pairs;  // empty: head and tail pairs
  double extent = 4.0;
  int n_points = 101;
};

struct KrotovSettings {
  double lambda_a = 2.0;
  std::optional<double> clamp;
  int max_iterations = 200;
  int o_recompute_first = 100;
  int o_recompute_every = 20;
  double convergence_threshold = 0.0;
  std::optional<double> residual_target;
};

struct ScenarioConfig {
  ChainSpec chain;
  TimeGrid grid;
  std::vector<double> squeezing;  // one value per trajectory pair
  std::optional<BathParams> bath;
  ObjectiveKind objective = ObjectiveKind::fidelity_and_negativity;
  KrotovSettings krotov;
  std::optional<std::filesystem::path> controls_file;
  std::optional<std::filesystem::path> output_dir;
  EmitFlags emit;
  WignerRequest wigner;

  /// Fully resolved config, defaults included, in a fixed key order.
  nlohmann::ordered_json to_json() const;
  /// 64-bit FNV-1a of to_json().dump(), as 16 hex digits.
  std::string hash() const;
  KrotovConfig krotov_config() const;
  std::vector<TrajectoryPair> pairs() const;
};

/// Validates against the schema. Unknown keys are rejected. Relative
/// paths are resolved against `base_dir`.
ScenarioConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
ScenarioConfig load_config(const std::filesystem::path& path);

}  // namespace cvk::tools
