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

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvkrotov/chain.hpp"
#include "cvkrotov/gaussian.hpp"
#include "cvkrotov/measures.hpp"
#include "cvkrotov/open_system.hpp"

namespace cvk {

/// Blackman window on [0, T], clipped to [0, 1].
double shape(double t, double horizon);

struct ClampedControl {
  double value;       // A tanh(c/A)
  double derivative;  // sech^2(c/A)
};

/// tanh clamp; identity with unit derivative when `amplitude` is empty.
ClampedControl clamp(double c, std::optional<double> amplitude);

/// One initial/target pair of the transfer problem.
struct TrajectoryPair {
  CovarianceMatrix initial;
  TransferTarget target;
};

/// TMSS(r) on sites (1,2) moved to TMSS(r) on (N-1, N).
TrajectoryPair chain_transfer_pair(int n_sites, double r);

/// Dissipative contribution per grid bin: sigma Delta and D evaluated at the
/// bin midpoint (o_k + o_{k+1})/2. Empty for closed dynamics.
struct DissipatorTable {
  std::vector<Matrix> drift;
  std::vector<Matrix> diffusion;

  bool empty() const { return drift.empty(); }
};

/// Controlled chain dynamics on a fixed grid: M(t) = M0 + sum_l c~_l(t) M_l,
/// plus an optional bath.
class ControlProblem {
 public:
  ControlProblem(QuadraticForm drift_form, std::vector<QuadraticForm> control_forms,
                 TimeGrid grid, std::optional<BathParams> bath = std::nullopt,
                 CVector coupling = {}, std::optional<double> clamp_amplitude = std::nullopt);

  static ControlProblem for_chain(const ChainSpec& chain, const TimeGrid& grid,
                                  std::optional<BathParams> bath = std::nullopt,
                                  std::optional<double> clamp_amplitude = std::nullopt);

  int n_modes() const { return drift_form_.n_modes(); }
  int n_channels() const { return static_cast<int>(control_forms_.size()); }
  const TimeGrid& grid() const { return grid_; }
  const std::optional<BathParams>& bath() const { return bath_; }
  const std::optional<double>& clamp_amplitude() const { return clamp_; }
  const CVector& coupling() const { return coupling_; }
  bool is_open() const { return bath_.has_value(); }

  /// sigma M_l for channel l (0-based).
  const Matrix& channel_drift(int channel) const { return channel_drifts_[channel]; }

  /// Total quadratic form in bin k with clamped controls.
  QuadraticForm form_at(const ControlGrid& controls, int bin) const;

  /// O coefficients for the given controls (empty when closed).
  OCoefficients o_coefficients(const ControlGrid& controls) const;
  DissipatorTable dissipator(const OCoefficients& o) const;

  /// Generator for bin k given the raw control amplitudes in that bin.
  GeneratorTerms generator(const Vector& bin_controls, const DissipatorTable& diss, int bin) const;
  GeneratorTerms generator(const ControlGrid& controls, const DissipatorTable& diss, int bin) const;

  /// O coefficients recomputed from `controls`, then forward propagation.
  CmTrajectory simulate(const ControlGrid& controls, const CovarianceMatrix& gamma0) const;
  CmTrajectory simulate(const ControlGrid& controls, const CovarianceMatrix& gamma0,
                        const DissipatorTable& diss) const;

 private:
  QuadraticForm drift_form_;
  std::vector<QuadraticForm> control_forms_;
  TimeGrid grid_;
  std::optional<BathParams> bath_;
  CVector coupling_;
  std::optional<double> clamp_;
  Matrix base_drift_;
  std::vector<Matrix> channel_drifts_;
};

/// Gradient of the single-pair objective with respect to the CM entries,
/// by central differences with step 1e-6 max(1, |gamma_ij|), symmetrized.
/// The N_r part is dropped when both partial-transpose symplectic
/// eigenvalues lie within 1e-6 of 1 (separable boundary).
Matrix objective_gradient(const Matrix& gamma, ObjectiveKind kind, const TransferTarget& target);

/// chi(T) = -weight * grad J_pair; the pad component is zero.
Costate terminal_costate(const Matrix& gamma_final, ObjectiveKind kind,
                         const TransferTarget& target, double weight = 1.0);

/// chi at every node, integrated from T down to 0 under `generator`.
std::vector<Costate> backward_propagate(const Costate& chi_final, const StepGenerator& generator,
                                        const TimeGrid& grid);

/// Delta c = (S/Lambda) * clamp_factor * <chi, vec(B gamma + gamma B^T)>
/// with B = sigma M_l.
double control_update(const Costate& chi, const Matrix& gamma, const Matrix& channel_drift,
                      double lambda_a, double shape_value, double clamp_factor);

struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;
  std::vector<Residuals> per_pair;
  double max_update = 0.0;
  double wall_seconds = 0.0;
  bool o_recomputed = false;
  bool monotonicity_violation = false;
};

struct KrotovConfig {
  double lambda_a = 2.0;
  ObjectiveKind objective = ObjectiveKind::fidelity_and_negativity;
  int max_iterations = 0;
  int o_recompute_first = 100;
  int o_recompute_every = 20;
  /// Stop when 0 <= J_prev - J < threshold. Zero disables.
  double convergence_threshold = 0.0;
  /// Stop once every pair has F_r and N_r at or below this value.
  std::optional<double> residual_target;
  double monotonic_slack = 1e-10;
  std::function<void(const IterationRecord&)> on_iteration;
};

/// Failure inside an iteration; `iteration` is 1-based (0 for the guess).
class OptimizationError : public std::runtime_error {
 public:
  OptimizationError(const std::string& what, int iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

struct KrotovResult {
  ControlGrid controls;
  std::vector<IterationRecord> history;  // history[0] is the guess
  std::vector<CmTrajectory> trajectories;  // final forward runs, one per pair
};

/// Whether the O coefficients are rebuilt after `iteration` (1-based). The
/// last iteration of a run always rebuilds them as well, so the recorded
/// final J matches a fresh simulation of the final controls.
bool o_recompute_due(int iteration, const KrotovConfig& config);

KrotovResult krotov_optimize(const ControlProblem& problem, std::span<const TrajectoryPair> pairs,
                             ControlGrid guess, const KrotovConfig& config);

/// Residuals of each pair at the end of its trajectory.
std::vector<Residuals> final_residuals(std::span<const CmTrajectory> trajectories,
                                       std::span<const TrajectoryPair> pairs);

}  // namespace cvk
