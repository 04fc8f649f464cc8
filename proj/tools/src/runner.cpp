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

#include "cvkrotov/tools/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

#include "cvkrotov/tools/csv.hpp"
#include "cvkrotov/version.hpp"

namespace cvk::tools {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "'");
}

std::vector<ModePair> wigner_pairs(const ScenarioConfig& cfg) {
  if (!cfg.wigner.pairs.empty()) return cfg.wigner.pairs;
  const int n = cfg.chain.n_sites;
  if (n == 2) return {{1, 2}};
  return {{1, 2}, {n - 1, n}};
}

std::string dynamics_name(std::size_t pair, std::size_t n_pairs) {
  return n_pairs == 1 ? "dynamics.csv" : "dynamics_pair" + std::to_string(pair + 1) + ".csv";
}

void write_dynamics(const fs::path& path, const std::string& hash, const ControlProblem& problem,
                    const ControlGrid& controls, const CmTrajectory& traj,
                    const TrajectoryPair& pair) {
  std::vector<std::string> cols{"t", "F", "N_head", "N_tail", "det_gamma"};
  for (int l = 1; l <= problem.n_channels(); ++l) cols.push_back("c" + std::to_string(l));
  CsvWriter w(path, hash, cols);
  const TimeGrid& grid = problem.grid();
  for (int k = 0; k < grid.n_nodes(); ++k) {
    const CovarianceMatrix g(traj[k]);
    std::vector<double> row{grid.time(k), gaussian_fidelity(g, pair.target.gamma),
                            log_negativity(reduce_cm(g, {1, 2})),
                            log_negativity(reduce_cm(g, pair.target.pair)), traj[k].determinant()};
    // The final node reports the last bin's control.
    const int bin = std::min(k, grid.n_steps - 1);
    for (int l = 0; l < problem.n_channels(); ++l)
      row.push_back(clamp(controls(l, bin), problem.clamp_amplitude()).value);
    w.row(row);
  }
}

void write_controls(const fs::path& path, const std::string& hash, const ControlProblem& problem,
                    const ControlGrid& controls) {
  std::vector<std::string> cols{"t"};
  for (int l = 1; l <= problem.n_channels(); ++l) {
    cols.push_back("c" + std::to_string(l) + "_raw");
    cols.push_back("c" + std::to_string(l) + "_clamped");
  }
  CsvWriter w(path, hash, cols);
  for (int k = 0; k < problem.grid().n_steps; ++k) {
    std::vector<double> row{problem.grid().time(k)};
    for (int l = 0; l < problem.n_channels(); ++l) {
      row.push_back(controls(l, k));
      row.push_back(clamp(controls(l, k), problem.clamp_amplitude()).value);
    }
    w.row(row);
  }
}

void write_residuals(const fs::path& path, const std::string& hash, const ScenarioConfig& cfg,
                     const std::vector<Residuals>& res) {
  CsvWriter w(path, hash, {"pair", "r", "F_r", "N_r", "J2"});
  for (std::size_t j = 0; j < res.size(); ++j)
    w.row({double(j + 1), cfg.squeezing[j], res[j].fidelity, res[j].negativity,
           pair_objective(ObjectiveKind::fidelity_and_negativity, res[j])});
}

void write_spectrum(const fs::path& path, const std::string& hash,
                    const std::vector<std::vector<double>>& channels) {
  std::vector<std::string> cols{"channel"};
  for (int b = 0; b < 10; ++b) cols.push_back("bin" + std::to_string(b));
  CsvWriter w(path, hash, cols);
  for (std::size_t l = 0; l < channels.size(); ++l) {
    const Vector mags = control_spectrum(channels[l], 10);
    std::vector<double> row{double(l + 1)};
    for (int b = 0; b < 10; ++b) row.push_back(mags[b]);
    w.row(row);
  }
}

std::vector<std::vector<double>> clamped_channels(const ControlProblem& problem,
                                                  const ControlGrid& controls) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(problem.n_channels()));
  for (int l = 0; l < problem.n_channels(); ++l)
    for (int k = 0; k < controls.n_bins(); ++k)
      out[l].push_back(clamp(controls(l, k), problem.clamp_amplitude()).value);
  return out;
}

void write_wigner(const ScenarioConfig& cfg, const fs::path& out_dir, const std::string& hash,
                  const CmTrajectory& traj, RunSummary& summary) {
  const TimeGrid& grid = cfg.grid;
  for (double t : cfg.wigner.times) {
    if (t < 0.0 || t > grid.horizon)
      throw ConfigError({"wigner time " + format_number(t) + " outside [0, T]"});
    const int node = static_cast<int>(std::lround(t / grid.dt()));
    const CovarianceMatrix g(traj[node]);
    for (const auto& p : wigner_pairs(cfg)) {
      const WignerSlice s = wigner_slice(g, p, default_wigner_u(), default_wigner_v(),
                                         cfg.wigner.extent, cfg.wigner.n_points);
      const fs::path path = out_dir / wigner_file_name(t, p);
      CsvWriter w(path, hash, {"a", "b", "W"});
      for (Eigen::Index ia = 0; ia < s.a.size(); ++ia)
        for (Eigen::Index ib = 0; ib < s.b.size(); ++ib) w.row({s.a[ia], s.b[ib], s.values(ia, ib)});
      summary.files.push_back(path);
    }
  }
}

void write_manifest(const fs::path& path, const ScenarioConfig& cfg, const std::string& command,
                    const RunSummary& summary, bool seedless, double wall_seconds) {
  nlohmann::ordered_json m;
  m["tool"] = "cvkrotov";
  m["version"] = CVKROTOV_VERSION;
  m["command"] = command;
  m["config_hash"] = cfg.hash();
  m["seedless"] = seedless;
  m["config"] = cfg.to_json();
  m["iterations"] = summary.iterations;
  m["final_objective"] = summary.final_objective;
  nlohmann::ordered_json res = nlohmann::ordered_json::array();
  for (std::size_t j = 0; j < summary.final_residuals.size(); ++j)
    res.push_back({{"r", cfg.squeezing[j]},
                   {"F_r", summary.final_residuals[j].fidelity},
                   {"N_r", summary.final_residuals[j].negativity}});
  m["final_residuals"] = res;
  m["monotonicity_violations"] = summary.monotonicity_violations;
  m["wall_seconds"] = wall_seconds;
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const auto& f : summary.files) files.push_back(f.filename().string());
  m["files"] = files;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << m.dump(2) << '\n';
}

std::string file_hash(const fs::path& controls_file) {
  std::ifstream in(controls_file);
  std::string first;
  std::getline(in, first);
  const std::string prefix = "# config-hash: ";
  if (first.rfind(prefix, 0) == 0) return first.substr(prefix.size());
  in.clear();
  in.seekg(0);
  std::uint64_t h = 14695981039346656037ull;
  char ch;
  while (in.get(ch)) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

std::string wigner_file_name(double time, const ModePair& pair) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "wigner_t%g_%d-%d.csv", time, pair.first, pair.second);
  return buf;
}

ControlProblem scenario_problem(const ScenarioConfig& cfg) {
  return ControlProblem::for_chain(cfg.chain, cfg.grid, cfg.bath, cfg.krotov.clamp);
}

ControlGrid scenario_controls(const ScenarioConfig& cfg) {
  if (!cfg.controls_file) return initial_guess(cfg.chain, cfg.grid);
  return controls_from_table(read_csv(*cfg.controls_file), cfg.chain.n_sites, cfg.grid);
}

RunSummary run_simulate(const ScenarioConfig& cfg, const fs::path& out_dir) {
  const auto start = std::chrono::steady_clock::now();
  ensure_dir(out_dir);
  const ControlProblem problem = scenario_problem(cfg);
  const ControlGrid controls = scenario_controls(cfg);
  const auto pairs = cfg.pairs();
  const std::string hash = cfg.hash();
  const DissipatorTable diss = problem.dissipator(problem.o_coefficients(controls));

  RunSummary summary;
  std::vector<CmTrajectory> trajs;
  for (const auto& p : pairs) trajs.push_back(problem.simulate(controls, p.initial, diss));
  summary.final_residuals = final_residuals(trajs, pairs);
  summary.final_objective = objective_value(cfg.objective, summary.final_residuals);

  if (cfg.emit.dynamics)
    for (std::size_t j = 0; j < pairs.size(); ++j) {
      const fs::path path = out_dir / dynamics_name(j, pairs.size());
      write_dynamics(path, hash, problem, controls, trajs[j], pairs[j]);
      summary.files.push_back(path);
    }
  if (cfg.emit.residuals) {
    write_residuals(out_dir / "residuals.csv", hash, cfg, summary.final_residuals);
    summary.files.push_back(out_dir / "residuals.csv");
  }
  if (cfg.emit.spectrum) {
    write_spectrum(out_dir / "spectrum.csv", hash, clamped_channels(problem, controls));
    summary.files.push_back(out_dir / "spectrum.csv");
  }
  if (cfg.emit.wigner) write_wigner(cfg, out_dir, hash, trajs.front(), summary);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(out_dir / "manifest.json", cfg, "simulate", summary, true, wall);
  return summary;
}

RunSummary run_optimize(const ScenarioConfig& cfg, const fs::path& out_dir, bool seedless) {
  const auto start = std::chrono::steady_clock::now();
  ensure_dir(out_dir);
  const ControlProblem problem = scenario_problem(cfg);
  const auto pairs = cfg.pairs();
  const std::string hash = cfg.hash();
  const int n_pairs = static_cast<int>(pairs.size());

  std::unique_ptr<CsvWriter> iter_csv;
  if (cfg.emit.iterations) {
    std::vector<std::string> cols{"iteration", "J"};
    for (int j = 1; j <= n_pairs; ++j) cols.push_back("F_r_" + std::to_string(j));
    for (int j = 1; j <= n_pairs; ++j) cols.push_back("N_r_" + std::to_string(j));
    cols.insert(cols.end(), {"max_update", "o_recomputed", "flagged"});
    iter_csv = std::make_unique<CsvWriter>(out_dir / "iterations.csv", hash, cols);
  }
  KrotovConfig kc = cfg.krotov_config();
  kc.on_iteration = [&](const IterationRecord& rec) {
    if (!iter_csv) return;
    std::vector<double> row{double(rec.iteration), rec.objective};
    for (const auto& r : rec.per_pair) row.push_back(r.fidelity);
    for (const auto& r : rec.per_pair) row.push_back(r.negativity);
    row.push_back(rec.max_update);
    row.push_back(rec.o_recomputed ? 1.0 : 0.0);
    row.push_back(rec.monotonicity_violation ? 1.0 : 0.0);
    iter_csv->row(row);
  };

  const KrotovResult result = krotov_optimize(problem, pairs, scenario_controls(cfg), kc);
  iter_csv.reset();

  RunSummary summary;
  if (cfg.emit.iterations) summary.files.push_back(out_dir / "iterations.csv");
  summary.iterations = result.history.back().iteration;
  summary.final_objective = result.history.back().objective;
  summary.final_residuals = result.history.back().per_pair;
  for (const auto& r : result.history)
    if (r.monotonicity_violation) ++summary.monotonicity_violations;

  if (cfg.emit.controls) {
    write_controls(out_dir / "controls.csv", hash, problem, result.controls);
    summary.files.push_back(out_dir / "controls.csv");
  }
  if (cfg.emit.dynamics)
    for (std::size_t j = 0; j < pairs.size(); ++j) {
      const fs::path path = out_dir / dynamics_name(j, pairs.size());
      write_dynamics(path, hash, problem, result.controls, result.trajectories[j], pairs[j]);
      summary.files.push_back(path);
    }
  if (cfg.emit.residuals) {
    write_residuals(out_dir / "residuals.csv", hash, cfg, summary.final_residuals);
    summary.files.push_back(out_dir / "residuals.csv");
  }
  if (cfg.emit.spectrum) {
    write_spectrum(out_dir / "spectrum.csv", hash, clamped_channels(problem, result.controls));
    summary.files.push_back(out_dir / "spectrum.csv");
  }
  if (cfg.emit.wigner) write_wigner(cfg, out_dir, hash, result.trajectories.front(), summary);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(out_dir / "manifest.json", cfg, "optimize", summary, seedless, wall);
  return summary;
}

RunSummary run_spectrum(const fs::path& controls_file, const fs::path& out_dir) {
  const CsvTable table = read_csv(controls_file);
  const int n = control_channel_count(table);
  std::vector<std::vector<double>> channels;
  std::vector<std::string> errors;
  for (int l = 1; l <= n; ++l) {
    const std::string name = "c" + std::to_string(l) + "_clamped";
    const auto& col = table.data[table.column(name)];
    if (col.empty()) errors.push_back("column '" + name + "' is empty");
    channels.push_back(col);
  }
  if (!errors.empty()) throw ConfigError(errors);
  ensure_dir(out_dir);
  RunSummary summary;
  write_spectrum(out_dir / "spectrum.csv", file_hash(controls_file), channels);
  summary.files.push_back(out_dir / "spectrum.csv");
  return summary;
}

RunSummary run_wigner(const ScenarioConfig& cfg, const fs::path& out_dir) {
  if (cfg.wigner.times.empty()) throw ConfigError({"wigner: no times requested"});
  ensure_dir(out_dir);
  const ControlProblem problem = scenario_problem(cfg);
  const ControlGrid controls = scenario_controls(cfg);
  const CmTrajectory traj = problem.simulate(controls, cfg.pairs().front().initial);
  RunSummary summary;
  write_wigner(cfg, out_dir, cfg.hash(), traj, summary);
  return summary;
}

}  // namespace cvk::tools
