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

// Acceptance runner. Usage: acceptance [criterion ...]
// Runs criteria 1-12 (or the listed subset), prints one PASS/FAIL line per
// criterion and exits non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cvkrotov/chain.hpp"
#include "cvkrotov/fock.hpp"
#include "cvkrotov/gaussian.hpp"
#include "cvkrotov/krotov.hpp"
#include "cvkrotov/measures.hpp"
#include "cvkrotov/open_system.hpp"
#include "support/gaussian_ops.hpp"

namespace {

using namespace cvk;
using cd = std::complex<double>;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// Shared scenario: the five-site linear chain over T = 15 with 2000 steps.
constexpr double kHorizon = 15.0;
constexpr int kSteps = 2000;
constexpr double kSqueezing = 1.2;

ChainSpec linear_chain(int n) {
  ChainSpec c;
  c.n_sites = n;
  return c;
}

BathParams bath(BathMode mode) {
  BathParams b;
  b.mode = mode;
  return b;
}

KrotovResult optimize(const ControlProblem& p, std::span<const TrajectoryPair> pairs, const ChainSpec& chain,
                      KrotovConfig cfg) {
  return krotov_optimize(p, pairs, initial_guess(chain, p.grid()), cfg);
}

// Largest J_k - J_{k-1} over the run.
double worst_increase(const KrotovResult& r) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < r.history.size(); ++k)
    worst = std::max(worst, r.history[k].objective - r.history[k - 1].objective);
  return worst;
}

double max_clamped(const ControlGrid& c, double amplitude) {
  double m = 0.0;
  for (int l = 0; l < c.n_channels(); ++l)
    for (int k = 0; k < c.n_bins(); ++k) m = std::max(m, std::abs(clamp(c(l, k), amplitude).value));
  return m;
}

// Runs reused by several criteria.
std::optional<KrotovResult> g_non_markov;
std::optional<KrotovResult> g_multi;

const KrotovResult& non_markov_run() {
  if (!g_non_markov) {
    const ChainSpec chain = linear_chain(5);
    const ControlProblem p =
        ControlProblem::for_chain(chain, TimeGrid(kHorizon, kSteps), bath(BathMode::non_markov), 8.0);
    const TrajectoryPair pair = chain_transfer_pair(5, kSqueezing);
    KrotovConfig cfg;
    cfg.lambda_a = 4.0;
    cfg.max_iterations = 2000;
    g_non_markov = optimize(p, {&pair, 1}, chain, cfg);
  }
  return *g_non_markov;
}

const std::vector<double> kTrained{0.6, 0.7, 0.8, 0.9, 1.0};

const KrotovResult& multi_run() {
  if (!g_multi) {
    const ChainSpec chain = linear_chain(5);
    const ControlProblem p =
        ControlProblem::for_chain(chain, TimeGrid(kHorizon, kSteps), bath(BathMode::non_markov), 10.0);
    std::vector<TrajectoryPair> pairs;
    for (double r : kTrained) pairs.push_back(chain_transfer_pair(5, r));
    KrotovConfig cfg;
    cfg.lambda_a = 5.0;
    cfg.objective = ObjectiveKind::lse_multi;
    cfg.max_iterations = 2000;
    g_multi = optimize(p, pairs, chain, cfg);
  }
  return *g_multi;
}

Outcome criterion1() {
  std::mt19937_64 rng(1001);
  double worst = 0.0, worst_edge = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int modes = trial < 25 ? 1 : 2;
    const fock::FockSpace space(modes, modes == 1 ? 150 : 60);
    const auto ga = testing::random_gates(modes, 1.0, rng);
    const auto gb = testing::random_gates(modes, 1.0, rng);
    const fock::State vac = fock::vacuum(space);
    const fock::State a = testing::apply_gates(ga, space, vac);
    const fock::State b = testing::apply_gates(gb, space, vac);
    worst_edge = std::max({worst_edge, fock::edge_population(space, a), fock::edge_population(space, b)});
    const double f_fock = fock::bures_fidelity(a, b);
    const double f_gauss =
        gaussian_fidelity(testing::apply_gates(ga, vacuum_cm(modes)), testing::apply_gates(gb, vacuum_cm(modes)));
    worst = std::max(worst, std::abs(f_fock - f_gauss));
  }
  return {worst <= 1e-3, fmt("max |dF| = %.3e over 50 pairs (tol 1e-3), max edge population %.1e", worst,
                             worst_edge)};
}

Outcome criterion2() {
  double analytic = 0.0, oracle = 0.0;
  const fock::FockSpace space(2, 60);
  for (double r : {0.2, 0.6, 1.0, 1.2}) {
    const double n = log_negativity(tmss_cm(2, 1, 2, r));
    analytic = std::max(analytic, std::abs(n - 2 * r / std::numbers::ln2));
    oracle = std::max(oracle, std::abs(n - fock::log_negativity_fock(space, fock::tmss_state(space, r))));
  }
  return {analytic <= 1e-9 && oracle <= 1e-3,
          fmt("analytic dev %.2e (tol 1e-9), Fock dev %.2e (tol 1e-3)", analytic, oracle)};
}

Outcome criterion3() {
  const ChainSpec chain = linear_chain(5);
  const TimeGrid grid(kHorizon, kSteps);
  const ControlProblem p = ControlProblem::for_chain(chain, grid);
  double worst = 0.0;
  for (const ControlGrid& c : {ControlGrid(5, kSteps), initial_guess(chain, grid)}) {
    const auto traj = p.simulate(c, tmss_cm(5, 1, 2, kSqueezing));
    for (const Matrix& g : traj) worst = std::max(worst, std::abs(g.determinant() - 1.0));
  }
  return {worst <= 1e-6, fmt("max |det - 1| = %.2e over %d nodes, free and guess controls (tol 1e-6)", worst,
                             grid.n_nodes())};
}

Outcome criterion4() {
  const ChainSpec chain = linear_chain(2);
  const TimeGrid grid(5.0, 1000);
  const double lambda = 0.12;
  BathParams b = bath(BathMode::markov);
  b.lambda = lambda;
  const ControlProblem p = ControlProblem::for_chain(chain, grid, b);
  const ControlGrid c = initial_guess(chain, grid);
  const fock::FockSpace space(2, 14);
  const fock::State psi0 = fock::tmss_state(space, 0.5);
  const auto traj = p.simulate(c, fock::extract_cm(space, psi0));

  const auto ops = fock::build_operators(space);
  const fock::SparseOp jump = fock::SparseOp(cd(lambda) * (ops[0].q + ops[1].q));
  std::vector<fock::SparseOp> h;
  for (int k = 0; k < grid.n_steps; ++k) h.push_back(fock::quadratic_hamiltonian(space, p.form_at(c, k).matrix()));
  double worst = 0.0, edge = 0.0;
  fock::lindblad_propagate(psi0 * psi0.adjoint(), [&](int k) { return h[k]; }, jump, grid,
                           [&](int k, const fock::Density& rho) {
                             if (k % 50 != 0) return;
                             edge = std::max(edge, fock::edge_population(space, rho));
                             worst = std::max(worst, max_abs(fock::extract_cm(space, rho).matrix() - traj[k]));
                           });
  return {worst <= 1e-3,
          fmt("max CM deviation %.2e over T = 5 (tol 1e-3), cutoff 14 edge population %.1e", worst, edge)};
}

Outcome criterion5() {
  const ChainSpec chain = linear_chain(5);
  const TimeGrid grid(kHorizon, 6 * kSteps);  // xi dt = 1.25, inside the RK4 stability region
  BathParams b;
  b.xi = 500.0;
  b.omega = 0.0;
  const ControlProblem p = ControlProblem::for_chain(chain, grid, b);
  const OCoefficients o = p.o_coefficients(initial_guess(chain, grid));
  const CVector half = 0.5 * coupling_vector(5, b.lambda);
  double sup = 0.0;
  for (int k = 0; k < grid.n_nodes(); ++k)
    if (grid.time(k) >= 0.02) sup = std::max(sup, (o[k] - half).norm());
  const double rel = sup / half.norm();
  return {rel <= 0.01, fmt("sup_{t>=0.02} |o - l/2| / |l/2| = %.3e (tol 1e-2)", rel)};
}

Outcome criterion6() {
  const ChainSpec chain = linear_chain(5);
  const TimeGrid grid(kHorizon, kSteps);
  const TransferTarget target = tail_tmss_target(5, kSqueezing);
  double worst = 0.0;
  for (std::optional<BathParams> b : {std::optional<BathParams>{}, std::optional(bath(BathMode::markov)),
                                      std::optional(bath(BathMode::non_markov))}) {
    const ControlProblem p = ControlProblem::for_chain(chain, grid, b, 8.0);
    const ControlGrid c = initial_guess(chain, grid);
    const DissipatorTable diss = p.dissipator(p.o_coefficients(c));
    const StepGenerator gen = [&](int k) { return p.generator(c, diss, k); };
    const auto traj = p.simulate(c, tmss_cm(5, 1, 2, kSqueezing), diss);
    const auto chis = backward_propagate(
        terminal_costate(traj.back(), ObjectiveKind::fidelity_and_negativity, target), gen, grid);
    const double ref = chis.back().pair(traj.back());
    for (int k = 0; k < grid.n_nodes(); ++k) worst = std::max(worst, std::abs(chis[k].pair(traj[k]) - ref));
  }
  return {worst <= 1e-8, fmt("max pairing drift %.2e over 2000 steps, closed/Markov/non-Markov (tol 1e-8)", worst)};
}

Outcome criterion7() {
  std::mt19937_64 rng(1007);
  const TransferTarget target = tail_tmss_target(5, kSqueezing);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    // Strictly mixed, so the +-h probes stay physical.
    const Matrix g = (1.02 + 0.05 * trial) * testing::random_pure_cm(5, 0.8, rng).matrix();
    const Matrix v = testing::random_symmetric(10, rng);
    for (auto kind : {ObjectiveKind::fidelity_only, ObjectiveKind::fidelity_and_negativity}) {
      const auto j = [&](double s) { return pair_objective(kind, residuals(CovarianceMatrix(g + s * v), target)); };
      const auto central = [&](double h) { return (j(h) - j(-h)) / (2 * h); };
      const double h = 1e-4;
      const double fd = (4 * central(h / 2) - central(h)) / 3;
      const Costate chi = terminal_costate(g, kind, target);
      const double an = -(chi.block.array() * v.array()).sum();
      worst = std::max(worst, std::abs(an - fd) / std::max(std::abs(fd), 1e-3));
    }
  }
  return {worst <= 1e-5, fmt("max relative error %.2e on 10 states x {J1, J2} (tol 1e-5)", worst)};
}

Outcome criterion8() {
  const ChainSpec chain = linear_chain(3);
  const TimeGrid grid(kHorizon, kSteps);
  const TrajectoryPair pair = chain_transfer_pair(3, kSqueezing);
  KrotovConfig cfg;
  cfg.max_iterations = 200;
  cfg.lambda_a = 2.0;
  const KrotovResult closed = optimize(ControlProblem::for_chain(chain, grid), {&pair, 1}, chain, cfg);
  cfg.lambda_a = 4.0;
  const KrotovResult open = optimize(
      ControlProblem::for_chain(chain, grid, bath(BathMode::non_markov), 8.0), {&pair, 1}, chain, cfg);
  const double wc = worst_increase(closed), wo = worst_increase(open);
  int where = 0;
  for (std::size_t k = 1; k < open.history.size(); ++k)
    if (open.history[k].objective - open.history[k - 1].objective > 1e-10 && where == 0) where = static_cast<int>(k);
  return {wc <= 1e-10 && wo <= 1e-10,
          fmt("closed: J %.4e -> %.4e, max increase %.2e; open: J %.4e -> %.4e, max increase %.2e%s (slack 1e-10)",
              closed.history.front().objective, closed.history.back().objective, wc,
              open.history.front().objective, open.history.back().objective, wo,
              where ? fmt(" first at iteration %d", where).c_str() : "")};
}

Outcome criterion9() {
  const ChainSpec chain = linear_chain(5);
  const TrajectoryPair pair = chain_transfer_pair(5, kSqueezing);
  KrotovConfig cfg;
  cfg.lambda_a = 2.0;
  cfg.max_iterations = 5000;
  cfg.residual_target = 1e-2;
  const KrotovResult r = optimize(ControlProblem::for_chain(chain, TimeGrid(kHorizon, kSteps)), {&pair, 1}, chain, cfg);
  const Residuals res = r.history.back().per_pair.front();
  return {res.fidelity <= 1e-2 && res.negativity <= 1e-2,
          fmt("F_r = %.3e, N_r = %.3e after %zu iterations (tol 1e-2, budget 5000)", res.fidelity, res.negativity,
              r.history.size() - 1)};
}

Outcome criterion10() {
  const ChainSpec chain = linear_chain(5);
  const ControlProblem p =
      ControlProblem::for_chain(chain, TimeGrid(kHorizon, kSteps), bath(BathMode::markov), 8.0);
  const TrajectoryPair pair = chain_transfer_pair(5, kSqueezing);
  KrotovConfig cfg;
  cfg.lambda_a = 4.0;
  cfg.max_iterations = 2000;
  const KrotovResult markov = optimize(p, {&pair, 1}, chain, cfg);
  const KrotovResult& nm = non_markov_run();
  const double jm = markov.history.back().objective, jn = nm.history.back().objective;
  return {jn < jm, fmt("J2 non-Markov %.4e vs Markov %.4e after 2000 iterations, ratio %.2f", jn, jm, jm / jn)};
}

Outcome criterion11() {
  const double open = max_clamped(non_markov_run().controls, 8.0);
  const double multi = max_clamped(multi_run().controls, 10.0);
  return {open < 8.0 && multi < 10.0, fmt("open max |c~| = %.4f (< 8), multi-target max |c~| = %.4f (< 10)", open,
                                          multi)};
}

Outcome criterion12() {
  const ChainSpec chain = linear_chain(5);
  const TimeGrid grid(kHorizon, kSteps);
  const ControlProblem p = ControlProblem::for_chain(chain, grid, bath(BathMode::non_markov), 10.0);
  const ControlGrid trained = multi_run().controls;
  const ControlGrid guess = initial_guess(chain, grid);
  bool ok = true;
  std::string detail;
  for (double r : {0.65, 0.95}) {
    const TrajectoryPair pair = chain_transfer_pair(5, r);
    const double nt = residuals(CovarianceMatrix(p.simulate(trained, pair.initial).back()), pair.target).negativity;
    const double nb = residuals(CovarianceMatrix(p.simulate(guess, pair.initial).back()), pair.target).negativity;
    ok = ok && nt < nb;
    detail += fmt("r = %.2f: N_r %.3e vs untrained %.3e; ", r, nt, nb);
  }
  return {ok, detail + fmt("final LSE J %.4e", multi_run().history.back().objective)};
}

struct Criterion {
  std::function<Outcome()> run;
  double runtime_limit;  // seconds; 0 when no bound is stated
  const char* title;
};

const std::map<int, Criterion>& criteria() {
  static const std::map<int, Criterion> all{
      {1, {criterion1, 120, "oracle fidelity equivalence"}},
      {2, {criterion2, 60, "log-negativity"}},
      {3, {criterion3, 0, "closed-system purity"}},
      {4, {criterion4, 120, "Markov consistency with Lindblad oracle"}},
      {5, {criterion5, 0, "Markov limit of the O-ODE"}},
      {6, {criterion6, 0, "adjoint pairing"}},
      {7, {criterion7, 60, "gradient correctness"}},
      {8, {criterion8, 600, "Krotov monotonicity"}},
      {9, {criterion9, 3600, "closed-chain transfer"}},
      {10, {criterion10, 0, "non-Markovian advantage"}},
      {11, {criterion11, 0, "clamp bound"}},
      {12, {criterion12, 0, "multi-target coverage"}},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& [id, c] : criteria()) {
    if (!selected.empty() && !selected.contains(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.runtime_limit > 0 && secs > c.runtime_limit) {
      out.pass = false;
      out.detail += fmt("; runtime %.0f s exceeds %.0f s", secs, c.runtime_limit);
    }
    failures += out.pass ? 0 : 1;
    std::printf("criterion %2d %s  %s: %s [%.1f s]\n", id, out.pass ? "PASS" : "FAIL", c.title, out.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
