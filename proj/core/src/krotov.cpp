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

#include "cvkrotov/krotov.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

namespace cvk {

double shape(double t, double horizon) {
  const double x = 2.0 * std::numbers::pi * t / horizon;
  const double s = 0.42 - 0.5 * std::cos(x) + 0.08 * std::cos(2.0 * x);
  return std::clamp(s, 0.0, 1.0);
}

ClampedControl clamp(double c, std::optional<double> amplitude) {
  if (!amplitude) return {c, 1.0};
  const double a = *amplitude;
  if (!(a > 0.0)) throw std::invalid_argument("clamp: amplitude must be > 0");
  const double th = std::tanh(c / a);
  return {a * th, 1.0 - th * th};
}

TrajectoryPair chain_transfer_pair(int n_sites, double r) {
  return TrajectoryPair{tmss_cm(n_sites, 1, 2, r), tail_tmss_target(n_sites, r)};
}

ControlProblem::ControlProblem(QuadraticForm drift_form, std::vector<QuadraticForm> control_forms,
                               TimeGrid grid, std::optional<BathParams> bath, CVector coupling,
                               std::optional<double> clamp_amplitude)
    : drift_form_(std::move(drift_form)),
      control_forms_(std::move(control_forms)),
      grid_(grid),
      bath_(bath),
      coupling_(std::move(coupling)),
      clamp_(clamp_amplitude) {
  const int n = drift_form_.n_modes();
  for (const auto& f : control_forms_)
    if (f.n_modes() != n) throw std::invalid_argument("ControlProblem: control form size mismatch");
  if (bath_) {
    bath_->validate();
    if (coupling_.size() != 2 * n)
      throw std::invalid_argument("ControlProblem: coupling vector must have length 2N");
  }
  if (clamp_ && !(*clamp_ > 0.0))
    throw std::invalid_argument("ControlProblem: clamp amplitude must be > 0");
  base_drift_ = closed_drift(drift_form_);
  for (const auto& f : control_forms_) channel_drifts_.push_back(closed_drift(f));
}

ControlProblem ControlProblem::for_chain(const ChainSpec& chain, const TimeGrid& grid,
                                         std::optional<BathParams> bath,
                                         std::optional<double> clamp_amplitude) {
  std::vector<QuadraticForm> controls;
  for (int i = 1; i <= chain.n_sites; ++i) controls.push_back(control_form(i, chain.n_sites));
  CVector l;
  if (bath) l = coupling_vector(chain.n_sites, bath->lambda);
  return ControlProblem(chain_form(chain), std::move(controls), grid, bath, std::move(l),
                        clamp_amplitude);
}

QuadraticForm ControlProblem::form_at(const ControlGrid& controls, int bin) const {
  Matrix m = drift_form_.matrix();
  for (int l = 0; l < n_channels(); ++l)
    m += clamp(controls(l, bin), clamp_).value * control_forms_[l].matrix();
  return QuadraticForm(m);
}

OCoefficients ControlProblem::o_coefficients(const ControlGrid& controls) const {
  if (!bath_) return {};
  return integrate_o([&](int k) { return form_at(controls, k); }, coupling_, *bath_, grid_);
}

DissipatorTable ControlProblem::dissipator(const OCoefficients& o) const {
  DissipatorTable t;
  if (!bath_) return t;
  if (static_cast<int>(o.size()) != grid_.n_nodes())
    throw std::invalid_argument("dissipator: O coefficients do not match the grid");
  const QuadraticForm zero = QuadraticForm::zero(n_modes());
  t.drift.reserve(static_cast<std::size_t>(grid_.n_steps));
  t.diffusion.reserve(static_cast<std::size_t>(grid_.n_steps));
  for (int k = 0; k < grid_.n_steps; ++k) {
    const CVector mid = 0.5 * (o[k] + o[k + 1]);
    GeneratorTerms g = open_generator(zero, mid, coupling_);
    t.drift.push_back(std::move(g.drift));
    t.diffusion.push_back(std::move(g.diffusion));
  }
  return t;
}

GeneratorTerms ControlProblem::generator(const Vector& bin_controls, const DissipatorTable& diss,
                                         int bin) const {
  GeneratorTerms g;
  g.drift = base_drift_;
  for (int l = 0; l < n_channels(); ++l)
    g.drift += clamp(bin_controls[l], clamp_).value * channel_drifts_[l];
  if (!diss.empty()) {
    g.drift += diss.drift[bin];
    g.diffusion = diss.diffusion[bin];
  }
  return g;
}

GeneratorTerms ControlProblem::generator(const ControlGrid& controls, const DissipatorTable& diss,
                                         int bin) const {
  return generator(Vector(controls.values.col(bin)), diss, bin);
}

CmTrajectory ControlProblem::simulate(const ControlGrid& controls,
                                      const CovarianceMatrix& gamma0) const {
  return simulate(controls, gamma0, dissipator(o_coefficients(controls)));
}

CmTrajectory ControlProblem::simulate(const ControlGrid& controls, const CovarianceMatrix& gamma0,
                                      const DissipatorTable& diss) const {
  if (controls.n_channels() != n_channels() || controls.n_bins() != grid_.n_steps)
    throw std::invalid_argument("simulate: control grid shape does not match the problem");
  return propagate(gamma0, [&](int k) { return generator(controls, diss, k); }, grid_);
}

namespace {

double fd_step(double x) { return 1e-6 * std::max(1.0, std::abs(x)); }

// Symmetric central difference of f over the unique entries of `gamma`
// listed by `entries` (row, col) with row <= col.
template <class F>
void accumulate_fd(const Matrix& gamma, const std::vector<std::pair<int, int>>& entries, F&& f,
                   Matrix& grad, double scale) {
  Matrix probe = gamma;
  for (const auto& [i, j] : entries) {
    const double h = fd_step(gamma(i, j));
    const double orig = gamma(i, j);
    probe(i, j) = probe(j, i) = orig + h;
    const double fp = f(probe);
    probe(i, j) = probe(j, i) = orig - h;
    const double fm = f(probe);
    probe(i, j) = probe(j, i) = orig;
    const double d = (fp - fm) / (2.0 * h);
    if (i == j) {
      grad(i, i) += scale * d;
    } else {
      grad(i, j) += 0.5 * scale * d;
      grad(j, i) += 0.5 * scale * d;
    }
  }
}

}  // namespace

Matrix objective_gradient(const Matrix& gamma, ObjectiveKind kind, const TransferTarget& target) {
  const int dim = static_cast<int>(gamma.rows());
  const int n = dim / 2;
  Matrix grad = Matrix::Zero(dim, dim);

  std::vector<std::pair<int, int>> all;
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) all.emplace_back(i, j);

  const double fid_scale = kind == ObjectiveKind::fidelity_only ? 1.0 : 0.5;
  accumulate_fd(
      gamma, all,
      [&](const Matrix& g) { return 1.0 - gaussian_fidelity(CovarianceMatrix(g), target.gamma); },
      grad, fid_scale);
  if (kind == ObjectiveKind::fidelity_only) return grad;

  const CovarianceMatrix cm(gamma);
  const auto pt = partial_transpose_symplectic_eigenvalues(reduce_cm(cm, target.pair));
  if (std::abs(pt[0] - 1.0) <= 1e-6 && std::abs(pt[1] - 1.0) <= 1e-6) return grad;

  const auto [mi, mj] = target.pair;
  const std::array<int, 4> idx{mi - 1, mj - 1, n + mi - 1, n + mj - 1};
  std::vector<std::pair<int, int>> block;
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b) block.emplace_back(std::min(idx[a], idx[b]), std::max(idx[a], idx[b]));
  const double n0 = target.negativity;
  accumulate_fd(
      gamma, block,
      [&](const Matrix& g) {
        const double neg = log_negativity_unchecked(reduce_cm(CovarianceMatrix(g), target.pair));
        const double q = (neg - n0) / (neg + n0);
        return q * q;
      },
      grad, 0.5);
  return grad;
}

Costate terminal_costate(const Matrix& gamma_final, ObjectiveKind kind,
                         const TransferTarget& target, double weight) {
  Costate chi;
  chi.block = -weight * objective_gradient(gamma_final, kind, target);
  if (!chi.block.allFinite()) throw PropagationError("terminal_costate: non-finite gradient", 0);
  return chi;
}

std::vector<Costate> backward_propagate(const Costate& chi_final, const StepGenerator& generator,
                                        const TimeGrid& grid) {
  std::vector<Costate> chis(static_cast<std::size_t>(grid.n_nodes()));
  chis.back() = chi_final;
  const double dt = grid.dt();
  for (int k = grid.n_steps - 1; k >= 0; --k) {
    Costate c = rk4_step_adjoint(generator(k), chis[k + 1], dt);
    check_finite(c.block, k, "backward_propagate");
    chis[k] = std::move(c);
  }
  return chis;
}

double control_update(const Costate& chi, const Matrix& gamma, const Matrix& channel_drift,
                      double lambda_a, double shape_value, double clamp_factor) {
  const Matrix bg = channel_drift * gamma;
  const double overlap = (chi.block.array() * (bg + bg.transpose()).array()).sum();
  return shape_value / lambda_a * clamp_factor * overlap;
}

bool o_recompute_due(int iteration, const KrotovConfig& config) {
  if (iteration <= config.o_recompute_first) return true;
  return config.o_recompute_every > 0 && iteration % config.o_recompute_every == 0;
}

std::vector<Residuals> final_residuals(std::span<const CmTrajectory> trajectories,
                                       std::span<const TrajectoryPair> pairs) {
  std::vector<Residuals> out;
  out.reserve(pairs.size());
  for (std::size_t j = 0; j < pairs.size(); ++j)
    out.push_back(residuals(CovarianceMatrix(trajectories[j].back()), pairs[j].target));
  return out;
}

namespace {

KrotovResult run_krotov(const ControlProblem& problem, std::span<const TrajectoryPair> pairs,
                        ControlGrid guess, const KrotovConfig& config, int& iteration) {
  using clock = std::chrono::steady_clock;
  if (pairs.empty()) throw std::invalid_argument("krotov_optimize: no trajectory pairs");
  if (!(config.lambda_a > 0.0)) throw std::invalid_argument("krotov_optimize: lambda_a must be > 0");
  if (config.objective != ObjectiveKind::lse_multi && pairs.size() != 1)
    throw std::invalid_argument("krotov_optimize: J1/J2 objectives take a single pair");
  const TimeGrid& grid = problem.grid();
  if (guess.n_channels() != problem.n_channels() || guess.n_bins() != grid.n_steps)
    throw std::invalid_argument("krotov_optimize: guess shape does not match the problem");

  const auto start = clock::now();
  const std::size_t n_pairs = pairs.size();
  KrotovResult result;
  result.controls = std::move(guess);
  ControlGrid& controls = result.controls;

  DissipatorTable diss = problem.dissipator(problem.o_coefficients(controls));
  std::vector<CmTrajectory>& trajs = result.trajectories;
  for (const auto& p : pairs) trajs.push_back(problem.simulate(controls, p.initial, diss));

  std::vector<Residuals> res = final_residuals(trajs, pairs);
  double j_prev = objective_value(config.objective, res);
  {
    IterationRecord rec{0, j_prev, res, 0.0, 0.0, false, false};
    rec.wall_seconds = std::chrono::duration<double>(clock::now() - start).count();
    if (config.on_iteration) config.on_iteration(rec);
    result.history.push_back(std::move(rec));
  }
  auto within_target = [&](const std::vector<Residuals>& r) {
    return config.residual_target &&
           std::all_of(r.begin(), r.end(), [&](const Residuals& x) {
             return x.fidelity <= *config.residual_target && x.negativity <= *config.residual_target;
           });
  };
  if (within_target(res)) return result;

  const double dt = grid.dt();
  const int n_ch = problem.n_channels();
  std::vector<double> shapes(static_cast<std::size_t>(grid.n_steps));
  for (int k = 0; k < grid.n_steps; ++k) shapes[k] = shape(grid.time(k), grid.horizon);

  for (int it = 1; it <= config.max_iterations; ++it) {
    iteration = it;
    // Co-states under the previous controls.
    const std::vector<double> weights = objective_pair_weights(config.objective, res);
    const ObjectiveKind pair_kind = config.objective == ObjectiveKind::fidelity_only
                                        ? ObjectiveKind::fidelity_only
                                        : ObjectiveKind::fidelity_and_negativity;
    std::vector<std::vector<Costate>> chis;
    chis.reserve(n_pairs);
    for (std::size_t j = 0; j < n_pairs; ++j) {
      const Costate chi_t = terminal_costate(trajs[j].back(), pair_kind, pairs[j].target, weights[j]);
      chis.push_back(backward_propagate(
          chi_t, [&](int k) { return problem.generator(controls, diss, k); }, grid));
    }

    // Sequential sweep: update bin k from the new state at t_k, then advance.
    std::vector<CmTrajectory> next(n_pairs);
    for (std::size_t j = 0; j < n_pairs; ++j) {
      next[j].reserve(static_cast<std::size_t>(grid.n_nodes()));
      next[j].push_back(trajs[j].front());
    }
    double max_update = 0.0;
    Vector bin(n_ch);
    for (int k = 0; k < grid.n_steps; ++k) {
      for (int l = 0; l < n_ch; ++l) {
        const double c = controls(l, k);
        const double factor = clamp(c, problem.clamp_amplitude()).derivative;
        double dc = 0.0;
        for (std::size_t j = 0; j < n_pairs; ++j)
          dc += control_update(chis[j][k], next[j][k], problem.channel_drift(l), config.lambda_a,
                               shapes[k], factor);
        controls(l, k) = c + dc;
        bin[l] = c + dc;
        max_update = std::max(max_update, std::abs(dc));
      }
      const GeneratorTerms g = problem.generator(bin, diss, k);
      for (std::size_t j = 0; j < n_pairs; ++j) {
        Matrix x = rk4_step(g, next[j][k], dt);
        x = (0.5 * (x + x.transpose())).eval();
        check_finite(x, k, "krotov sweep");
        next[j].push_back(std::move(x));
      }
    }

    const bool memory = problem.is_open() && problem.bath()->mode == BathMode::non_markov;
    bool recompute = memory && (o_recompute_due(it, config) || it == config.max_iterations);
    auto refresh = [&] {
      diss = problem.dissipator(problem.o_coefficients(controls));
      for (std::size_t j = 0; j < n_pairs; ++j)
        next[j] = problem.simulate(controls, pairs[j].initial, diss);
    };
    if (recompute) refresh();

    auto stop_now = [&](double j_now, const std::vector<Residuals>& r) {
      const double decrease = j_prev - j_now;
      if (config.convergence_threshold > 0.0 && decrease >= 0.0 &&
          decrease < config.convergence_threshold)
        return true;
      return within_target(r);
    };

    res = final_residuals(next, pairs);
    double j_now = objective_value(config.objective, res);
    bool stop = stop_now(j_now, res);
    if (stop && memory && !recompute) {
      recompute = true;
      refresh();
      res = final_residuals(next, pairs);
      j_now = objective_value(config.objective, res);
    }
    trajs = std::move(next);

    IterationRecord rec{it, j_now, res, max_update, 0.0, recompute, false};
    rec.monotonicity_violation = j_now > j_prev + config.monotonic_slack;
    rec.wall_seconds = std::chrono::duration<double>(clock::now() - start).count();
    if (config.on_iteration) config.on_iteration(rec);
    result.history.push_back(std::move(rec));
    j_prev = j_now;
    if (stop) break;
  }
  return result;
}

}  // namespace

KrotovResult krotov_optimize(const ControlProblem& problem, std::span<const TrajectoryPair> pairs,
                             ControlGrid guess, const KrotovConfig& config) {
  int iteration = 0;
  try {
    return run_krotov(problem, pairs, std::move(guess), config, iteration);
  } catch (const PropagationError& e) {
    throw OptimizationError(e.what(), iteration);
  } catch (const std::domain_error& e) {
    throw OptimizationError(e.what(), iteration);
  }
}

}  // namespace cvk
