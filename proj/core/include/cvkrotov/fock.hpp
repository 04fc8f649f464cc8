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

// Truncated Fock-space reference implementation. Only used to validate the
// Gaussian-level formulas on small systems; nothing in the optimizer calls it.

#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "cvkrotov/gaussian.hpp"

namespace cvk::fock {

using SparseOp = Eigen::SparseMatrix<std::complex<double>, Eigen::RowMajor>;
using State = Eigen::VectorXcd;
using Density = Eigen::MatrixXcd;

/// Product space of `n_modes` (1..3) oscillators truncated at `cutoff`
/// levels each. Mode 1 is the most significant digit of the basis index.
class FockSpace {
 public:
  static constexpr std::int64_t kMaxDimension = 100000;

  FockSpace(int n_modes, int cutoff);

  int n_modes() const { return n_modes_; }
  int cutoff() const { return cutoff_; }
  std::int64_t dimension() const { return dimension_; }

  /// Occupation of `mode` (0-based) in basis state `index`.
  int occupation(std::int64_t index, int mode) const;

 private:
  int n_modes_;
  int cutoff_;
  std::int64_t dimension_;
};

struct ModeOperators {
  SparseOp a;
  SparseOp adag;
  SparseOp q;  // (a^dag + a)/sqrt2
  SparseOp p;  // i (a^dag - a)/sqrt2
};

std::vector<ModeOperators> build_operators(const FockSpace& space);

SparseOp identity(const FockSpace& space);
State vacuum(const FockSpace& space);

/// exp(G) v by scaled Taylor series.
State apply_exponential(const SparseOp& generator, const State& v);

/// r (a_i a_j - a_i^dag a_j^dag), 0-based modes.
SparseOp two_mode_squeeze_generator(const FockSpace& space, int mode_i, int mode_j, double r);
/// (r/2)(a^2 - a^dag^2).
SparseOp squeeze_generator(const FockSpace& space, int mode, double r);
/// -i theta a^dag a.
SparseOp rotation_generator(const FockSpace& space, int mode, double theta);
/// theta (a_i^dag a_j - a_i a_j^dag).
SparseOp beam_splitter_generator(const FockSpace& space, int mode_i, int mode_j, double theta);

/// exp(r a_1 a_2 - r a_1^dag a_2^dag)|0> on a two-mode space. Throws if
/// more than 1e-4 of the population sits on the top Fock level.
State tmss_state(const FockSpace& space, double r);

/// Population on basis states where some mode is within `width` levels of
/// the cutoff.
double edge_population(const FockSpace& space, const State& psi, int width = 1);
double edge_population(const FockSpace& space, const Density& rho, int width = 1);

/// gamma_ij = <R_i R_j + R_j R_i> - 2 <R_i><R_j>, R = (q..., p...).
CovarianceMatrix extract_cm(const FockSpace& space, const State& psi);
CovarianceMatrix extract_cm(const FockSpace& space, const Density& rho);
Vector extract_means(const FockSpace& space, const State& psi);
Vector extract_means(const FockSpace& space, const Density& rho);

/// R M R^T / 2 built from the truncated quadrature operators.
SparseOp quadratic_hamiltonian(const FockSpace& space, const Matrix& form);

using DensityObserver = std::function<void(int node, const Density& rho)>;

/// RK4 on d rho/dt = -i[H, rho] + L rho L^dag - {L^dag L, rho}/2 with
/// H held constant on each grid step. The observer sees every node.
/// Throws PropagationError if the trace drifts by more than 1e-6.
Density lindblad_propagate(const Density& rho0, const std::function<SparseOp(int step)>& hamiltonian,
                           const SparseOp& jump, const TimeGrid& grid,
                           const DensityObserver& observer = {});

/// Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)); eigenvalues below -1e-8 are rejected.
double bures_fidelity(const Density& rho1, const Density& rho2);
/// Pure-state forms: |<psi1|psi2>| and sqrt(<psi|rho|psi>).
double bures_fidelity(const State& psi1, const State& psi2);
double bures_fidelity(const State& psi, const Density& rho);

/// log2 || rho^{T_B} ||_1 with B = mode 2 of a two-mode space.
double log_negativity_fock(const FockSpace& space, const Density& rho);
double log_negativity_fock(const FockSpace& space, const State& psi);

/// Hermitian check, unit trace and positivity within the documented
/// tolerances.
bool is_valid_density(const Density& rho);

}  // namespace cvk::fock
