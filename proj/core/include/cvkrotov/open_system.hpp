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

#include <complex>
#include <string_view>
#include <vector>

#include "cvkrotov/gaussian.hpp"

namespace cvk {

enum class BathMode { markov, non_markov };

std::string_view to_string(BathMode m);
BathMode bath_mode_from_string(std::string_view s);

/// Ornstein-Uhlenbeck bath, alpha(t,s) = (xi/2) exp(-(xi + i Omega)|t - s|),
/// coupled through L = lambda sum_i q_i.
struct BathParams {
  double xi = 0.6;
  double omega = 0.7;
  double lambda = 0.12;
  BathMode mode = BathMode::non_markov;

  std::complex<double> xi_eff() const { return {xi, omega}; }
  double alpha0() const { return 0.5 * xi; }
  void validate() const;
};

/// Leading-order O-bar coefficients o(t_k) at every grid node.
using OCoefficients = std::vector<CVector>;

/// d o_i/dt = alpha(0) l_i - xi_eff o_i - o_l [sigma M]_{li}
///            - i sigma_{kl} (o_k o_l l*_i + o_i o_l l*_k)
CVector o_rhs(const CVector& o, const QuadraticForm& form, const CVector& coupling,
              const BathParams& bath);

/// RK4 on the shared grid with M(t) taken per bin from `form_of_step`;
/// o(0) = 0. Markov mode returns l/2 at every node without integrating.
/// Throws PropagationError if |o| exceeds 1e3 |l|.
OCoefficients integrate_o(const std::function<QuadraticForm(int step)>& form_of_step,
                          const CVector& coupling, const BathParams& bath, const TimeGrid& grid);

struct DissipativeTerms {
  CMatrix big_delta;    // Delta_mn = i l_m o*_n - i l*_m o_n
  CMatrix small_delta;  // delta_mn = l*_m o_n + o*_m l_n
  Matrix delta_real;    // Re delta
};

DissipativeTerms dissipative_terms(const CVector& o, const CVector& coupling);

/// A = sigma M + sigma Delta, D = 2 sigma Re(delta) sigma^T. Throws
/// std::domain_error if sigma Delta carries an imaginary part above 1e-10.
GeneratorTerms open_generator(const QuadraticForm& form, const CVector& o, const CVector& coupling);

}  // namespace cvk
