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

#include "cvkrotov/tools/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace cvk::tools {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string out = "invalid configuration:";
  for (const auto& s : v) out += "\n  - " + s;
  return out;
}

// Collects every schema violation instead of stopping at the first.
class Checker {
 public:
  std::vector<std::string> errors;

  void fail(const std::string& msg) { errors.push_back(msg); }

  bool object(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    if (!j.is_object()) {
      fail(where + ": expected an object");
      return false;
    }
    for (const auto& [k, v] : j.items())
      if (!allowed.count(k)) fail(where + ": unknown key '" + k + "'");
    return true;
  }

  std::optional<double> number(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_number()) {
      fail(where + "." + key + ": expected a number");
      return std::nullopt;
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
      fail(where + "." + key + ": must be finite");
      return std::nullopt;
    }
    return x;
  }

  std::optional<int> integer(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
      fail(where + "." + key + ": expected an integer");
      return std::nullopt;
    }
    return v.get<int>();
  }

  std::optional<std::string> string(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_string()) {
      fail(where + "." + key + ": expected a string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }

  std::optional<bool> boolean(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_boolean()) {
      fail(where + "." + key + ": expected true or false");
      return std::nullopt;
    }
    return v.get<bool>();
  }

  void positive(std::optional<double> x, const std::string& what) {
    if (x && !(*x > 0.0)) fail(what + ": must be > 0");
  }
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) return base / path;
  return path;
}

void parse_chain(Checker& c, const json& j, ScenarioConfig& cfg) {
  if (!c.object(j, "chain", {"topology", "n_sites", "omega0", "g0"})) return;
  if (auto s = c.string(j, "topology", "chain")) {
    try {
      cfg.chain.topology = topology_from_string(*s);
    } catch (const std::invalid_argument& e) {
      c.fail(std::string("chain.topology: ") + e.what());
    }
  }
  cfg.chain.n_sites = cfg.chain.topology == Topology::x_shaped ? 7 : 5;
  if (auto n = c.integer(j, "n_sites", "chain")) cfg.chain.n_sites = *n;
  if (auto x = c.number(j, "omega0", "chain")) cfg.chain.omega0 = *x;
  if (auto x = c.number(j, "g0", "chain")) cfg.chain.g0 = *x;
  try {
    cfg.chain.validate();
  } catch (const std::invalid_argument& e) {
    c.fail(std::string("chain: ") + e.what());
  }
}

void parse_grid(Checker& c, const json& j, ScenarioConfig& cfg) {
  if (!c.object(j, "grid", {"T", "n_steps"})) return;
  auto t = c.number(j, "T", "grid");
  if (!j.contains("T")) c.fail("grid: missing required key 'T'");
  c.positive(t, "grid.T");
  auto n = c.integer(j, "n_steps", "grid");
  if (n && *n < 1) c.fail("grid.n_steps: must be >= 1");
  if (t && *t > 0.0 && (!n || *n >= 1)) cfg.grid = TimeGrid{*t, n.value_or(2000)};
}

void parse_squeezing(Checker& c, const json& j, ScenarioConfig& cfg) {
  if (j.is_number()) {
    const double r = j.get<double>();
    if (!(r > 0.0) || !std::isfinite(r)) c.fail("squeezing: r must be finite and > 0");
    cfg.squeezing = {r};
    return;
  }
  if (!c.object(j, "squeezing", {"r", "r_min", "r_max", "n_samples"})) return;
  if (j.contains("r")) {
    if (j.contains("r_min") || j.contains("r_max") || j.contains("n_samples"))
      c.fail("squeezing: give either r or {r_min, r_max, n_samples}, not both");
    auto r = c.number(j, "r", "squeezing");
    c.positive(r, "squeezing.r");
    if (r) cfg.squeezing = {*r};
    return;
  }
  auto lo = c.number(j, "r_min", "squeezing");
  auto hi = c.number(j, "r_max", "squeezing");
  auto n = c.integer(j, "n_samples", "squeezing");
  for (const char* k : {"r_min", "r_max", "n_samples"})
    if (!j.contains(k)) c.fail(std::string("squeezing: missing required key '") + k + "'");
  c.positive(lo, "squeezing.r_min");
  if (n && *n < 1) c.fail("squeezing.n_samples: must be >= 1");
  if (lo && hi && *hi < *lo) c.fail("squeezing: r_max must be >= r_min");
  if (lo && hi && n && *n >= 1 && *lo > 0.0 && *hi >= *lo) {
    cfg.squeezing.clear();
    for (int k = 0; k < *n; ++k)
      cfg.squeezing.push_back(*n == 1 ? *lo : *lo + (*hi - *lo) * k / (*n - 1));
  }
}

void parse_bath(Checker& c, const json& j, ScenarioConfig& cfg) {
  if (j.is_null()) return;
  if (!c.object(j, "bath", {"xi", "omega", "lambda", "mode"})) return;
  BathParams b;
  if (auto x = c.number(j, "xi", "bath")) b.xi = *x;
  if (auto x = c.number(j, "omega", "bath")) b.omega = *x;
  if (auto x = c.number(j, "lambda", "bath")) b.lambda = *x;
  if (auto s = c.string(j, "mode", "bath")) {
    try {
      b.mode = bath_mode_from_string(*s);
    } catch (const std::invalid_argument& e) {
      c.fail(std::string("bath.mode: ") + e.what());
    }
  }
  try {
    b.validate();
  } catch (const std::invalid_argument& e) {
    c.fail(e.what());
  }
  cfg.bath = b;
}

void parse_krotov(Checker& c, const json& j, ScenarioConfig& cfg) {
  if (!c.object(j, "krotov",
                {"lambda_a", "clamp", "max_iterations", "o_recompute_first", "o_recompute_every",
                 "convergence_threshold", "residual_target"}))
    return;
  KrotovSettings& k = cfg.krotov;
  if (auto x = c.number(j, "lambda_a", "krotov")) k.lambda_a = *x;
  c.positive(k.lambda_a, "krotov.lambda_a");
  if (j.contains("clamp") && !j.at("clamp").is_null()) {
    k.clamp = c.number(j, "clamp", "krotov");
    c.positive(k.clamp, "krotov.clamp");
  }
  if (auto n = c.integer(j, "max_iterations", "krotov")) k.max_iterations = *n;
  if (k.max_iterations < 0) c.fail("krotov.max_iterations: must be >= 0");
  if (auto n = c.integer(j, "o_recompute_first", "krotov")) k.o_recompute_first = *n;
  if (auto n = c.integer(j, "o_recompute_every", "krotov")) k.o_recompute_every = *n;
  if (k.o_recompute_first < 0) c.fail("krotov.o_recompute_first: must be >= 0");
  if (k.o_recompute_every < 0) c.fail("krotov.o_recompute_every: must be >= 0");
  if (auto x = c.number(j, "convergence_threshold", "krotov")) k.convergence_threshold = *x;
  if (k.convergence_threshold < 0.0) c.fail("krotov.convergence_threshold: must be >= 0");
  if (j.contains("residual_target") && !j.at("residual_target").is_null()) {
    k.residual_target = c.number(j, "residual_target", "krotov");
    c.positive(k.residual_target, "krotov.residual_target");
  }
}

void parse_output(Checker& c, const json& j, const std::filesystem::path& base, ScenarioConfig& cfg) {
  if (!c.object(j, "output", {"dir", "emit"})) return;
  if (auto s = c.string(j, "dir", "output")) cfg.output_dir = resolve(base, *s);
  if (!j.contains("emit")) return;
  const json& e = j.at("emit");
  if (!c.object(e, "output.emit",
                {"controls", "dynamics", "spectrum", "wigner", "residuals", "iterations"}))
    return;
  EmitFlags& f = cfg.emit;
  if (auto b = c.boolean(e, "controls", "output.emit")) f.controls = *b;
  if (auto b = c.boolean(e, "dynamics", "output.emit")) f.dynamics = *b;
  if (auto b = c.boolean(e, "spectrum", "output.emit")) f.spectrum = *b;
  if (auto b = c.boolean(e, "wigner", "output.emit")) f.wigner = *b;
  if (auto b = c.boolean(e, "residuals", "output.emit")) f.residuals = *b;
  if (auto b = c.boolean(e, "iterations", "output.emit")) f.iterations = *b;
}

void parse_wigner(Checker& c, const json& j, ScenarioConfig& cfg) {
  if (!c.object(j, "wigner", {"times", "pairs", "extent", "n_points"})) return;
  WignerRequest& w = cfg.wigner;
  if (j.contains("times")) {
    const json& t = j.at("times");
    if (!t.is_array()) {
      c.fail("wigner.times: expected an array of numbers");
    } else {
      for (const auto& x : t) {
        if (!x.is_number() || !std::isfinite(x.get<double>())) {
          c.fail("wigner.times: entries must be finite numbers");
          continue;
        }
        w.times.push_back(x.get<double>());
      }
    }
  }
  if (j.contains("pairs")) {
    const json& p = j.at("pairs");
    bool ok = p.is_array();
    if (ok)
      for (const auto& x : p) {
        if (!x.is_array() || x.size() != 2 || !x[0].is_number_integer() || !x[1].is_number_integer()) {
          ok = false;
          break;
        }
        const int a = x[0].get<int>(), b = x[1].get<int>();
        if (a < 1 || b < 1 || a > cfg.chain.n_sites || b > cfg.chain.n_sites || a == b)
          c.fail("wigner.pairs: modes must be distinct sites in 1..N");
        w.pairs.emplace_back(a, b);
      }
    if (!ok) c.fail("wigner.pairs: expected an array of [i, j] site pairs");
  }
  if (auto x = c.number(j, "extent", "wigner")) w.extent = *x;
  c.positive(w.extent, "wigner.extent");
  if (auto n = c.integer(j, "n_points", "wigner")) w.n_points = *n;
  if (w.n_points < 2) c.fail("wigner.n_points: must be >= 2");
}

ordered_json pair_json(const ModePair& p) { return ordered_json::array({p.first, p.second}); }

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

ScenarioConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  Checker c;
  ScenarioConfig cfg;
  if (!c.object(doc, "config",
                {"chain", "grid", "squeezing", "bath", "objective", "krotov", "controls_file",
                 "output", "wigner"}))
    throw ConfigError(c.errors);
  for (const char* k : {"chain", "grid", "squeezing"})
    if (!doc.contains(k)) c.fail(std::string("missing required key '") + k + "'");

  if (doc.contains("chain")) parse_chain(c, doc.at("chain"), cfg);
  if (doc.contains("grid")) parse_grid(c, doc.at("grid"), cfg);
  if (doc.contains("squeezing")) parse_squeezing(c, doc.at("squeezing"), cfg);
  if (doc.contains("bath")) parse_bath(c, doc.at("bath"), cfg);
  if (doc.contains("krotov")) parse_krotov(c, doc.at("krotov"), cfg);
  if (doc.contains("output")) parse_output(c, doc.at("output"), base_dir, cfg);
  if (doc.contains("wigner")) parse_wigner(c, doc.at("wigner"), cfg);

  cfg.objective = cfg.squeezing.size() > 1 ? ObjectiveKind::lse_multi
                                           : ObjectiveKind::fidelity_and_negativity;
  if (auto s = c.string(doc, "objective", "config")) {
    try {
      cfg.objective = objective_from_string(*s);
    } catch (const std::invalid_argument& e) {
      c.fail(std::string("objective: ") + e.what());
    }
  }
  if (cfg.objective != ObjectiveKind::lse_multi && cfg.squeezing.size() > 1)
    c.fail("objective: J1 and J2 take a single squeezing value; use \"lse\" for a range");
  if (auto s = c.string(doc, "controls_file", "config")) cfg.controls_file = resolve(base_dir, *s);

  for (double t : cfg.wigner.times)
    if (t < 0.0 || t > cfg.grid.horizon)
      c.fail("wigner.times: time " + std::to_string(t) + " outside [0, T]");

  if (!c.errors.empty()) throw ConfigError(c.errors);
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file '" + path.string() + "'"});
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("config is not valid JSON: ") + e.what()});
  }
  return parse_config(doc, path.parent_path());
}

ordered_json ScenarioConfig::to_json() const {
  ordered_json j;
  j["chain"] = {{"topology", std::string(to_string(chain.topology))},
                {"n_sites", chain.n_sites},
                {"omega0", chain.omega0},
                {"g0", chain.g0}};
  j["grid"] = {{"T", grid.horizon}, {"n_steps", grid.n_steps}};
  j["squeezing"] = squeezing;
  if (bath)
    j["bath"] = {{"xi", bath->xi},
                 {"omega", bath->omega},
                 {"lambda", bath->lambda},
                 {"mode", std::string(to_string(bath->mode))}};
  else
    j["bath"] = nullptr;
  j["objective"] = std::string(to_string(objective));
  ordered_json k;
  k["lambda_a"] = krotov.lambda_a;
  k["clamp"] = krotov.clamp ? ordered_json(*krotov.clamp) : ordered_json(nullptr);
  k["max_iterations"] = krotov.max_iterations;
  k["o_recompute_first"] = krotov.o_recompute_first;
  k["o_recompute_every"] = krotov.o_recompute_every;
  k["convergence_threshold"] = krotov.convergence_threshold;
  k["residual_target"] =
      krotov.residual_target ? ordered_json(*krotov.residual_target) : ordered_json(nullptr);
  j["krotov"] = k;
  j["controls_file"] = controls_file ? ordered_json(controls_file->string()) : ordered_json(nullptr);
  j["output"]["emit"] = {{"controls", emit.controls},       {"dynamics", emit.dynamics},
                         {"spectrum", emit.spectrum},       {"wigner", emit.wigner},
                         {"residuals", emit.residuals},     {"iterations", emit.iterations}};
  ordered_json pairs = ordered_json::array();
  for (const auto& p : wigner.pairs) pairs.push_back(pair_json(p));
  j["wigner"] = {{"times", wigner.times},
                 {"pairs", pairs},
                 {"extent", wigner.extent},
                 {"n_points", wigner.n_points}};
  return j;
}

std::string ScenarioConfig::hash() const {
  const std::string text = to_json().dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

KrotovConfig ScenarioConfig::krotov_config() const {
  KrotovConfig k;
  k.lambda_a = krotov.lambda_a;
  k.objective = objective;
  k.max_iterations = krotov.max_iterations;
  k.o_recompute_first = krotov.o_recompute_first;
  k.o_recompute_every = krotov.o_recompute_every;
  k.convergence_threshold = krotov.convergence_threshold;
  k.residual_target = krotov.residual_target;
  return k;
}

std::vector<TrajectoryPair> ScenarioConfig::pairs() const {
  std::vector<TrajectoryPair> out;
  for (double r : squeezing) out.push_back(chain_transfer_pair(chain.n_sites, r));
  return out;
}

}  // namespace cvk::tools
