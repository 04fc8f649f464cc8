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
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cvk {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Thrown when a propagation produces non-finite values or leaves its
/// validity domain. Carries the grid step at which the failure was detected.
class PropagationError : public std::runtime_error {
 public:
  PropagationError(const std::string& what, int step)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"),
        step_(step) {}
  int step() const noexcept { return step_; }

 private:
  int step_;
};

/// Canonical symplectic form for the quadrature ordering
/// R = (q_1 ... q_N, p_1 ... p_N):  [[0, I], [-I, 0]].
Matrix symplectic_form(int n_modes);

/// Second-moment matrix gamma_ij = <{R_i, R_j}> of a zero-mean Gaussian
/// state. The vacuum is the identity in this convention.
///
/// Construction only checks shape and symmetry; physicality is a separate
/// query because intermediate finite-difference probes are allowed to leave
/// the physical set.
class CovarianceMatrix {
 public:
  explicit CovarianceMatrix(Matrix m);

  int n_modes() const { return static_cast<int>(m_.rows() / 2); }
  int dimension() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }

  /// Smallest eigenvalue of the Hermitian matrix gamma + i sigma.
  double min_uncertainty_eigenvalue() const;
  bool is_physical(double tol = 1e-9) const { return min_uncertainty_eigenvalue() >= -tol; }

  /// Symplectic eigenvalues in ascending order, one per mode.
  Vector symplectic_eigenvalues() const;

  /// gamma sigma gamma == sigma within `tol` (scaled by |gamma|^2).
  bool is_pure(double tol = 1e-10) const;

 private:
  Matrix m_;
};

CovarianceMatrix vacuum_cm(int n_modes);

/// CM of S_{i,j}(r)|0>, S = exp(r a_i a_j - r a_i^dag a_j^dag), modes are
/// 1-based. Signs fixed against the Fock-space construction.
CovarianceMatrix tmss_cm(int n_modes, int mode_i, int mode_j, double r);

/// Symmetrized coefficient matrix of H = R M R^T / 2.
class QuadraticForm {
 public:
  explicit QuadraticForm(const Matrix& m);
  static QuadraticForm zero(int n_modes);

  int n_modes() const { return static_cast<int>(m_.rows() / 2); }
  const Matrix& matrix() const { return m_; }

  QuadraticForm& operator+=(const QuadraticForm& other);
  friend QuadraticForm operator+(QuadraticForm a, const QuadraticForm& b) { return a += b; }
  friend QuadraticForm operator*(double s, QuadraticForm a) {
    a.m_ *= s;
    return a;
  }

 private:
  Matrix m_;
};

/// Uniform grid t_k = k dt, k = 0 ... n_steps.
struct TimeGrid {
  double horizon = 0.0;
  int n_steps = 2000;

  TimeGrid() = default;
  TimeGrid(double horizon_, int n_steps_);

  double dt() const { return horizon / n_steps; }
  double time(int k) const { return k * dt(); }
  int n_nodes() const { return n_steps + 1; }
};

/// Drift A = sigma M_bar for a closed system.
Matrix closed_drift(const QuadraticForm& form);

/// Affine CM flow d gamma/dt = A gamma + gamma A^T + D, held constant over one
/// grid step. An empty `diffusion` means D = 0.
struct GeneratorTerms {
  Matrix drift;
  Matrix diffusion;

  bool has_diffusion() const { return diffusion.size() != 0; }
};

/// Column-stacked CM with a constant 1 appended.
Vector pad_state(const CovarianceMatrix& gamma);
CovarianceMatrix unpad_state(const Vector& padded);

/// Explicit homogeneous generator acting on padded states:
///   [ I (x) A + A (x) I   vec(D) ]
///   [        0              0    ]
Matrix lift_generator(const Matrix& drift, const Matrix& diffusion);
inline Matrix lift_generator(const GeneratorTerms& g) { return lift_generator(g.drift, g.diffusion); }

/// Right-hand side A gamma + gamma A^T + D.
Matrix cm_rhs(const GeneratorTerms& g, const Matrix& gamma);

/// One classical RK4 step of the CM flow (no symmetrization).
Matrix rk4_step(const GeneratorTerms& g, const Matrix& gamma, double dt);

/// One classical RK4 step of the padded-vector flow under an explicit lifted
/// generator.
Vector rk4_step_lifted(const Matrix& lifted, const Vector& padded, double dt);

/// Co-state of the padded flow, split into its CM-shaped block and the
/// component paired with the constant pad entry.
struct Costate {
  Matrix block;
  double pad = 0.0;

  /// Real pairing <chi, x> with a padded state built from `gamma`.
  double pair(const Matrix& gamma) const { return (block.array() * gamma.array()).sum() + pad; }
};

/// chi(t_k) from chi(t_{k+1}) for d chi/dt = -L^T chi with L frozen over the
/// step. This is the exact transpose of rk4_step, so the pairing with the
/// forward state is preserved step by step.
Costate rk4_step_adjoint(const GeneratorTerms& g, const Costate& chi, double dt);

using CmTrajectory = std::vector<Matrix>;
using StepGenerator = std::function<GeneratorTerms(int step)>;

/// Fixed-step RK4 over `grid`; generator(k) is used on [t_k, t_{k+1}).
/// Returns gamma at every node, symmetrized after each step.
CmTrajectory propagate(const CovarianceMatrix& gamma0, const StepGenerator& generator,
                       const TimeGrid& grid);

/// Throws PropagationError unless every entry is finite.
void check_finite(const Matrix& m, int step, const char* what);

}  // namespace cvk
