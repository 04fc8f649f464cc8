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

#include <array>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "cvkrotov/gaussian.hpp"

namespace cvk {

using ModePair = std::pair<int, int>;  // 1-based

/// Two-mode marginal in the ordering (q_i, q_j, p_i, p_j).
CovarianceMatrix reduce_cm(const CovarianceMatrix& gamma, ModePair modes);

/// Bures fidelity Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)) of two zero-mean
/// Gaussian states.
///
/// General route: W = -2 V_aux i sigma with
///   V_aux = sigma^T (gamma1/2 + gamma2/2)^{-1} (sigma + gamma2 sigma gamma1) / 4,
/// eigenvalues of W come in +-w pairs with w >= 1 and
///   F = prod_k [w_k + sqrt(w_k^2 - 1)]^{1/2} / det((gamma1 + gamma2)/2)^{1/4},
/// with one w_k (the positive one) per pair.
///
/// If either state is pure, W^2 = I identically and the product is exactly 1.
/// That branch is taken explicitly: the square root is singular at w = 1 and
/// would amplify eigenvalue round-off.
double gaussian_fidelity(const CovarianceMatrix& gamma1, const CovarianceMatrix& gamma2);

/// Always the eigenvalue route (used to cross-check the pure-state branch).
double gaussian_fidelity_eigen(const CovarianceMatrix& gamma1, const CovarianceMatrix& gamma2);

/// The two symplectic eigenvalues of the partial transpose P gamma P,
/// P = diag(1,1,1,-1), ascending.
std::array<double, 2> partial_transpose_symplectic_eigenvalues(const CovarianceMatrix& two_mode);

/// Logarithmic negativity of a two-mode CM (base 2). Rejects CMs whose own
/// symplectic eigenvalues fall below 1 - 1e-6.
double log_negativity(const CovarianceMatrix& two_mode);

/// Same formula without the physicality check, for finite-difference probes
/// that may step slightly outside the physical set.
double log_negativity_unchecked(const CovarianceMatrix& two_mode);

struct Residuals {
  double fidelity = 0.0;    // F_r = 1 - F
  double negativity = 0.0;  // N_r = ((N - N0)/(N + N0))^2
};

/// What a final state is compared against: the full target CM, the target
/// negativity and the mode pair the negativity is read from.
struct TransferTarget {
  CovarianceMatrix gamma;
  double negativity = 0.0;
  ModePair pair{0, 0};
};

/// TMSS(r) on (N-1, N) of an N-site chain, N0 its log-negativity.
TransferTarget tail_tmss_target(int n_sites, double r);

Residuals residuals(const CovarianceMatrix& final_state, const TransferTarget& target);

enum class ObjectiveKind { fidelity_only, fidelity_and_negativity, lse_multi };

std::string_view to_string(ObjectiveKind k);
ObjectiveKind objective_from_string(std::string_view s);

/// Single-pair value: J1 = F_r, J2 = (F_r + N_r)/2. For lse_multi the
/// per-pair value is J2.
double pair_objective(ObjectiveKind kind, const Residuals& r);

/// Aggregate over pairs. lse_multi is log sum_j exp(J2_j); the other kinds
/// require exactly one pair.
double objective_value(ObjectiveKind kind, std::span<const Residuals> per_pair);

/// d J / d J_j for each pair: softmax weights for lse_multi, 1 otherwise.
std::vector<double> objective_pair_weights(ObjectiveKind kind, std::span<const Residuals> per_pair);

struct WignerSlice {
  ModePair modes{0, 0};
  Eigen::Vector4d u;
  Eigen::Vector4d v;
  Vector a;  // coordinates along u
  Vector b;  // coordinates along v
  Matrix values;  // values(ia, ib)
};

/// Default slice axes: the squeezed quadratures of S(r)|0> in this sign
/// convention, u = (q_i + q_j)/sqrt2 and v = (p_i - p_j)/sqrt2.
Eigen::Vector4d default_wigner_u();
Eigen::Vector4d default_wigner_v();

/// W(x) = pi^-2 det(g)^-1/2 exp(-x^T g^-1 x) at x = a u + b v on an
/// n_points x n_points grid over [-extent, extent]^2.
WignerSlice wigner_slice(const CovarianceMatrix& gamma, ModePair modes, const Eigen::Vector4d& u,
                         const Eigen::Vector4d& v, double extent = 4.0, int n_points = 101);

/// Wigner function of a two-mode CM at a single phase-space point.
double wigner_value(const CovarianceMatrix& two_mode, const Eigen::Vector4d& x);

/// |DFT| of the samples for bins 0 .. n_bins-1.
Vector control_spectrum(std::span<const double> samples, int n_bins = 10);

}  // namespace cvk
