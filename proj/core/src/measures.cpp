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

#include "cvkrotov/measures.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace cvk {

namespace {

constexpr double kImagTolerance = 1e-8;

void require_same_size(const CovarianceMatrix& a, const CovarianceMatrix& b) {
  if (a.dimension() != b.dimension())
    throw std::invalid_argument("gaussian_fidelity: mode counts differ");
}

double mean_det_quarter_root(const Matrix& g1, const Matrix& g2) {
  Eigen::PartialPivLU<Matrix> lu(0.5 * (g1 + g2));
  const double det = lu.determinant();
  if (!(det > 0.0) || !std::isfinite(det))
    throw std::domain_error("gaussian_fidelity: (gamma1 + gamma2)/2 is singular");
  return std::pow(det, 0.25);
}

}  // namespace

CovarianceMatrix reduce_cm(const CovarianceMatrix& gamma, ModePair modes) {
  const int n = gamma.n_modes();
  const auto [i, j] = modes;
  if (i == j) throw std::invalid_argument("reduce_cm: modes must differ");
  if (i < 1 || j < 1 || i > n || j > n)
    throw std::invalid_argument("reduce_cm: mode out of range");
  const std::array<int, 4> idx{i - 1, j - 1, n + i - 1, n + j - 1};
  Matrix r(4, 4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) r(a, b) = gamma.matrix()(idx[a], idx[b]);
  return CovarianceMatrix(std::move(r));
}

double gaussian_fidelity_eigen(const CovarianceMatrix& gamma1, const CovarianceMatrix& gamma2) {
  require_same_size(gamma1, gamma2);
  const int n = gamma1.n_modes();
  const Matrix& g1 = gamma1.matrix();
  const Matrix& g2 = gamma2.matrix();
  const Matrix sigma = symplectic_form(n);
  const double denom = mean_det_quarter_root(g1, g2);

  Eigen::PartialPivLU<Matrix> lu(0.5 * (g1 + g2));
  const Matrix v_aux = sigma.transpose() * lu.solve(sigma + g2 * sigma * g1) / 4.0;
  const CMatrix w = -2.0 * v_aux.cast<std::complex<double>>() *
                    (std::complex<double>(0.0, 1.0) * sigma.cast<std::complex<double>>());
  Eigen::ComplexEigenSolver<CMatrix> es(w, false);
  std::vector<std::complex<double>> ev(es.eigenvalues().begin(), es.eigenvalues().end());
  std::sort(ev.begin(), ev.end(), [](auto a, auto b) { return a.real() > b.real(); });

  double log_ftot = 0.0;
  for (int k = 0; k < n; ++k) {
    // Pair the k-th largest with the k-th smallest; the pair is (w, -w).
    const std::complex<double> hi = ev[static_cast<std::size_t>(k)];
    const std::complex<double> lo = ev[ev.size() - 1 - static_cast<std::size_t>(k)];
    const std::complex<double> wk = 0.5 * (hi - lo);
    if (std::abs(wk.imag()) > kImagTolerance * std::max(1.0, std::abs(wk)))
      throw std::domain_error("gaussian_fidelity: complex eigenvalue residue in W");
    const double x = std::max(1.0, wk.real());
    log_ftot += 0.5 * std::log(x + std::sqrt(x * x - 1.0));
  }
  return std::exp(log_ftot) / denom;
}

double gaussian_fidelity(const CovarianceMatrix& gamma1, const CovarianceMatrix& gamma2) {
  require_same_size(gamma1, gamma2);
  if (gamma1.is_pure() || gamma2.is_pure())
    return 1.0 / mean_det_quarter_root(gamma1.matrix(), gamma2.matrix());
  return gaussian_fidelity_eigen(gamma1, gamma2);
}

std::array<double, 2> partial_transpose_symplectic_eigenvalues(const CovarianceMatrix& two_mode) {
  if (two_mode.n_modes() != 2)
    throw std::invalid_argument("partial transpose: expected a two-mode CM");
  const Eigen::Vector4d p(1.0, 1.0, 1.0, -1.0);
  const Matrix pt = p.asDiagonal() * two_mode.matrix() * p.asDiagonal();
  const Matrix sg = symplectic_form(2) * pt;
  Eigen::EigenSolver<Matrix> es(sg, false);
  std::array<double, 4> mags{};
  for (int k = 0; k < 4; ++k) mags[k] = std::abs(es.eigenvalues()[k]);
  std::sort(mags.begin(), mags.end());
  return {0.5 * (mags[0] + mags[1]), 0.5 * (mags[2] + mags[3])};
}

double log_negativity(const CovarianceMatrix& two_mode) {
  if (two_mode.n_modes() != 2) throw std::invalid_argument("log_negativity: expected two modes");
  const Vector nu = two_mode.symplectic_eigenvalues();
  if (nu.minCoeff() < 1.0 - 1e-6)
    throw std::domain_error("log_negativity: non-physical CM (symplectic eigenvalue " +
                            std::to_string(nu.minCoeff()) + " < 1)");
  return log_negativity_unchecked(two_mode);
}

double log_negativity_unchecked(const CovarianceMatrix& two_mode) {
  double n = 0.0;
  for (double lam : partial_transpose_symplectic_eigenvalues(two_mode))
    n -= std::log2(std::min(1.0, lam));
  return n;
}

TransferTarget tail_tmss_target(int n_sites, double r) {
  TransferTarget t{tmss_cm(n_sites, n_sites - 1, n_sites, r), 0.0, {n_sites - 1, n_sites}};
  t.negativity = log_negativity(reduce_cm(t.gamma, t.pair));
  return t;
}

Residuals residuals(const CovarianceMatrix& final_state, const TransferTarget& target) {
  if (!(target.negativity > 0.0))
    throw std::invalid_argument("residuals: target negativity must be > 0");
  Residuals r;
  r.fidelity = 1.0 - gaussian_fidelity(final_state, target.gamma);
  const double n = log_negativity(reduce_cm(final_state, target.pair));
  const double q = (n - target.negativity) / (n + target.negativity);
  r.negativity = q * q;
  return r;
}

std::string_view to_string(ObjectiveKind k) {
  switch (k) {
    case ObjectiveKind::fidelity_only: return "J1";
    case ObjectiveKind::fidelity_and_negativity: return "J2";
    case ObjectiveKind::lse_multi: return "lse";
  }
  return "?";
}

ObjectiveKind objective_from_string(std::string_view s) {
  if (s == "J1") return ObjectiveKind::fidelity_only;
  if (s == "J2") return ObjectiveKind::fidelity_and_negativity;
  if (s == "lse") return ObjectiveKind::lse_multi;
  throw std::invalid_argument("unknown objective '" + std::string(s) + "'");
}

double pair_objective(ObjectiveKind kind, const Residuals& r) {
  if (kind == ObjectiveKind::fidelity_only) return r.fidelity;
  return 0.5 * (r.fidelity + r.negativity);
}

double objective_value(ObjectiveKind kind, std::span<const Residuals> per_pair) {
  if (per_pair.empty()) throw std::invalid_argument("objective_value: no pairs");
  if (kind != ObjectiveKind::lse_multi) {
    if (per_pair.size() != 1)
      throw std::invalid_argument("objective_value: J1/J2 take exactly one pair");
    return pair_objective(kind, per_pair.front());
  }
  double mx = -INFINITY;
  for (const auto& r : per_pair) mx = std::max(mx, pair_objective(kind, r));
  double s = 0.0;
  for (const auto& r : per_pair) s += std::exp(pair_objective(kind, r) - mx);
  return mx + std::log(s);
}

std::vector<double> objective_pair_weights(ObjectiveKind kind,
                                           std::span<const Residuals> per_pair) {
  std::vector<double> w(per_pair.size(), 1.0);
  if (kind != ObjectiveKind::lse_multi) return w;
  const double lse = objective_value(kind, per_pair);
  for (std::size_t j = 0; j < per_pair.size(); ++j)
    w[j] = std::exp(pair_objective(kind, per_pair[j]) - lse);
  return w;
}

Eigen::Vector4d default_wigner_u() { return Eigen::Vector4d(1.0, 1.0, 0.0, 0.0) / std::sqrt(2.0); }
Eigen::Vector4d default_wigner_v() { return Eigen::Vector4d(0.0, 0.0, 1.0, -1.0) / std::sqrt(2.0); }

double wigner_value(const CovarianceMatrix& two_mode, const Eigen::Vector4d& x) {
  const Eigen::Matrix4d g = two_mode.matrix();
  Eigen::FullPivLU<Eigen::Matrix4d> lu(g);
  if (!lu.isInvertible()) throw std::domain_error("wigner: singular CM");
  const double det = lu.determinant();
  const double quad = x.dot(lu.solve(x));
  return std::exp(-quad) / (std::numbers::pi * std::numbers::pi * std::sqrt(det));
}

WignerSlice wigner_slice(const CovarianceMatrix& gamma, ModePair modes, const Eigen::Vector4d& u,
                         const Eigen::Vector4d& v, double extent, int n_points) {
  if (std::abs(u.norm() - 1.0) > 1e-9 || std::abs(v.norm() - 1.0) > 1e-9 ||
      std::abs(u.dot(v)) > 1e-9)
    throw std::invalid_argument("wigner_slice: axes must be orthonormal");
  if (n_points < 2 || !(extent > 0.0)) throw std::invalid_argument("wigner_slice: bad grid");
  const CovarianceMatrix red = gamma.n_modes() == 2 && modes == ModePair{1, 2}
                                   ? gamma
                                   : reduce_cm(gamma, modes);
  const Eigen::Matrix4d g = red.matrix();
  Eigen::FullPivLU<Eigen::Matrix4d> lu(g);
  if (!lu.isInvertible()) throw std::domain_error("wigner_slice: singular reduced CM");
  const Eigen::Matrix4d ginv = lu.inverse();
  const double norm = 1.0 / (std::numbers::pi * std::numbers::pi * std::sqrt(lu.determinant()));

  WignerSlice s{modes, u, v, Vector::LinSpaced(n_points, -extent, extent),
                Vector::LinSpaced(n_points, -extent, extent), Matrix(n_points, n_points)};
  for (int ia = 0; ia < n_points; ++ia)
    for (int ib = 0; ib < n_points; ++ib) {
      const Eigen::Vector4d x = s.a[ia] * u + s.b[ib] * v;
      s.values(ia, ib) = norm * std::exp(-x.dot(ginv * x));
    }
  return s;
}

Vector control_spectrum(std::span<const double> samples, int n_bins) {
  const auto n = static_cast<double>(samples.size());
  Vector mags = Vector::Zero(n_bins);
  for (int f = 0; f < n_bins; ++f) {
    std::complex<double> acc = 0.0;
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const double phase = -2.0 * std::numbers::pi * f * static_cast<double>(k) / n;
      acc += samples[k] * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    mags[f] = std::abs(acc);
  }
  return mags;
}

}  // namespace cvk
