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

#include "cvkrotov/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Eigenvalues>

namespace cvk {

Matrix symplectic_form(int n_modes) {
  if (n_modes < 1) throw std::invalid_argument("symplectic_form: n_modes must be >= 1");
  const int n = n_modes;
  Matrix s = Matrix::Zero(2 * n, 2 * n);
  s.topRightCorner(n, n) = Matrix::Identity(n, n);
  s.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);
  return s;
}

CovarianceMatrix::CovarianceMatrix(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0 || m_.rows() % 2 != 0)
    throw std::invalid_argument("CovarianceMatrix: expected a non-empty 2N x 2N matrix");
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  if ((m_ - m_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("CovarianceMatrix: matrix is not symmetric");
  if (!m_.allFinite()) throw std::invalid_argument("CovarianceMatrix: non-finite entries");
}

double CovarianceMatrix::min_uncertainty_eigenvalue() const {
  const Matrix sigma = symplectic_form(n_modes());
  CMatrix h = m_.cast<std::complex<double>>();
  h += std::complex<double>(0.0, 1.0) * sigma.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Vector CovarianceMatrix::symplectic_eigenvalues() const {
  // Eigenvalues of sigma*gamma are +-i nu_k.
  const Matrix sg = symplectic_form(n_modes()) * m_;
  Eigen::EigenSolver<Matrix> es(sg, false);
  std::vector<double> mags;
  mags.reserve(static_cast<std::size_t>(sg.rows()));
  for (Eigen::Index k = 0; k < sg.rows(); ++k) mags.push_back(std::abs(es.eigenvalues()[k]));
  std::sort(mags.begin(), mags.end());
  Vector nu(n_modes());
  for (int k = 0; k < n_modes(); ++k) nu[k] = 0.5 * (mags[2 * k] + mags[2 * k + 1]);
  return nu;
}

bool CovarianceMatrix::is_pure(double tol) const {
  const Matrix sigma = symplectic_form(n_modes());
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  return (m_ * sigma * m_ - sigma).cwiseAbs().maxCoeff() <= tol * scale * scale;
}

CovarianceMatrix vacuum_cm(int n_modes) {
  if (n_modes < 1) throw std::invalid_argument("vacuum_cm: n_modes must be >= 1");
  return CovarianceMatrix(Matrix::Identity(2 * n_modes, 2 * n_modes));
}

CovarianceMatrix tmss_cm(int n_modes, int mode_i, int mode_j, double r) {
  if (n_modes < 2) throw std::invalid_argument("tmss_cm: need at least two modes");
  if (mode_i == mode_j) throw std::invalid_argument("tmss_cm: modes must differ");
  if (mode_i < 1 || mode_j < 1 || mode_i > n_modes || mode_j > n_modes)
    throw std::invalid_argument("tmss_cm: mode index out of range");
  const int n = n_modes;
  const int qi = mode_i - 1, qj = mode_j - 1, pi = n + qi, pj = n + qj;
  const double c = std::cosh(2.0 * r), s = std::sinh(2.0 * r);
  Matrix g = Matrix::Identity(2 * n, 2 * n);
  g(qi, qi) = g(qj, qj) = g(pi, pi) = g(pj, pj) = c;
  g(qi, qj) = g(qj, qi) = -s;
  g(pi, pj) = g(pj, pi) = s;
  return CovarianceMatrix(std::move(g));
}

QuadraticForm::QuadraticForm(const Matrix& m) : m_(0.5 * (m + m.transpose())) {
  if (m.rows() != m.cols() || m.rows() == 0 || m.rows() % 2 != 0)
    throw std::invalid_argument("QuadraticForm: expected a non-empty 2N x 2N matrix");
}

QuadraticForm QuadraticForm::zero(int n_modes) {
  return QuadraticForm(Matrix::Zero(2 * n_modes, 2 * n_modes));
}

QuadraticForm& QuadraticForm::operator+=(const QuadraticForm& other) {
  if (other.m_.rows() != m_.rows()) throw std::invalid_argument("QuadraticForm: size mismatch");
  m_ += other.m_;
  return *this;
}

TimeGrid::TimeGrid(double horizon_, int n_steps_) : horizon(horizon_), n_steps(n_steps_) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("TimeGrid: horizon must be finite and > 0");
  if (n_steps < 1) throw std::invalid_argument("TimeGrid: n_steps must be >= 1");
}

Matrix closed_drift(const QuadraticForm& form) {
  return symplectic_form(form.n_modes()) * form.matrix();
}

Vector pad_state(const CovarianceMatrix& gamma) {
  const Eigen::Index n2 = gamma.matrix().size();
  Vector v(n2 + 1);
  v.head(n2) = gamma.matrix().reshaped();
  v[n2] = 1.0;
  return v;
}

CovarianceMatrix unpad_state(const Vector& padded) {
  const auto dim = static_cast<Eigen::Index>(std::lround(std::sqrt(double(padded.size() - 1))));
  if (dim * dim + 1 != padded.size())
    throw std::invalid_argument("unpad_state: length is not (2N)^2 + 1");
  Matrix g = padded.head(dim * dim).reshaped(dim, dim);
  return CovarianceMatrix(0.5 * (g + g.transpose()));
}

Matrix lift_generator(const Matrix& drift, const Matrix& diffusion) {
  const Eigen::Index n = drift.rows();
  const Eigen::Index n2 = n * n;
  const Matrix eye = Matrix::Identity(n, n);
  Matrix lifted = Matrix::Zero(n2 + 1, n2 + 1);
  // I (x) A + A (x) I, column-stacked vec.
  for (Eigen::Index bi = 0; bi < n; ++bi)
    for (Eigen::Index bj = 0; bj < n; ++bj)
      lifted.block(bi * n, bj * n, n, n) = eye(bi, bj) * drift + drift(bi, bj) * eye;
  if (diffusion.size() != 0) lifted.col(n2).head(n2) = diffusion.reshaped();
  return lifted;
}

Matrix cm_rhs(const GeneratorTerms& g, const Matrix& gamma) {
  Matrix ag = g.drift * gamma;
  Matrix out = ag + ag.transpose();
  if (g.has_diffusion()) out += g.diffusion;
  return out;
}

Matrix rk4_step(const GeneratorTerms& g, const Matrix& gamma, double dt) {
  const Matrix k1 = cm_rhs(g, gamma);
  const Matrix k2 = cm_rhs(g, gamma + 0.5 * dt * k1);
  const Matrix k3 = cm_rhs(g, gamma + 0.5 * dt * k2);
  const Matrix k4 = cm_rhs(g, gamma + dt * k3);
  return gamma + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Vector rk4_step_lifted(const Matrix& lifted, const Vector& padded, double dt) {
  const Vector k1 = lifted * padded;
  const Vector k2 = lifted * (padded + 0.5 * dt * k1);
  const Vector k3 = lifted * (padded + 0.5 * dt * k2);
  const Vector k4 = lifted * (padded + dt * k3);
  return padded + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

namespace {

// L^T chi: block -> A^T X + X A, pad -> <D, X>.
Costate adjoint_rhs(const GeneratorTerms& g, const Costate& chi) {
  Costate out;
  out.block = g.drift.transpose() * chi.block + chi.block * g.drift;
  out.pad = g.has_diffusion() ? (g.diffusion.array() * chi.block.array()).sum() : 0.0;
  return out;
}

Costate axpy(const Costate& x, double a, const Costate& y) {
  return Costate{x.block + a * y.block, x.pad + a * y.pad};
}

}  // namespace

Costate rk4_step_adjoint(const GeneratorTerms& g, const Costate& chi, double dt) {
  const Costate k1 = adjoint_rhs(g, chi);
  const Costate k2 = adjoint_rhs(g, axpy(chi, 0.5 * dt, k1));
  const Costate k3 = adjoint_rhs(g, axpy(chi, 0.5 * dt, k2));
  const Costate k4 = adjoint_rhs(g, axpy(chi, dt, k3));
  Costate out;
  out.block = chi.block + (dt / 6.0) * (k1.block + 2.0 * k2.block + 2.0 * k3.block + k4.block);
  out.pad = chi.pad + (dt / 6.0) * (k1.pad + 2.0 * k2.pad + 2.0 * k3.pad + k4.pad);
  return out;
}

void check_finite(const Matrix& m, int step, const char* what) {
  if (!m.allFinite()) throw PropagationError(std::string(what) + ": non-finite values", step);
}

CmTrajectory propagate(const CovarianceMatrix& gamma0, const StepGenerator& generator,
                       const TimeGrid& grid) {
  CmTrajectory traj;
  traj.reserve(static_cast<std::size_t>(grid.n_nodes()));
  traj.push_back(gamma0.matrix());
  const double dt = grid.dt();
  for (int k = 0; k < grid.n_steps; ++k) {
    Matrix next = rk4_step(generator(k), traj.back(), dt);
    next = (0.5 * (next + next.transpose())).eval();
    check_finite(next, k, "propagate");
    traj.push_back(std::move(next));
  }
  return traj;
}

}  // namespace cvk
