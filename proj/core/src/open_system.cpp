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

#include "cvkrotov/open_system.hpp"

#include <cmath>
#include <string>

namespace cvk {

namespace {
using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};
}  // namespace

std::string_view to_string(BathMode m) { return m == BathMode::markov ? "markov" : "non_markov"; }

BathMode bath_mode_from_string(std::string_view s) {
  if (s == "markov") return BathMode::markov;
  if (s == "non_markov") return BathMode::non_markov;
  throw std::invalid_argument("unknown bath mode '" + std::string(s) + "'");
}

void BathParams::validate() const {
  if (!(xi > 0.0) || !std::isfinite(xi)) throw std::invalid_argument("bath: xi must be > 0");
  if (!std::isfinite(omega)) throw std::invalid_argument("bath: omega must be finite");
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("bath: lambda must be >= 0");
}

CVector o_rhs(const CVector& o, const QuadraticForm& form, const CVector& coupling,
              const BathParams& bath) {
  const int n = form.n_modes();
  const Matrix sigma = symplectic_form(n);
  const CMatrix sm = (sigma * form.matrix()).cast<cd>();
  const CMatrix sc = sigma.cast<cd>();
  const CVector lc = coupling.conjugate();

  // sigma_kl o_k o_l vanishes for antisymmetric sigma but is kept literal.
  const cd oso = o.transpose() * sc * o;
  const cd lso = lc.transpose() * sc * o;

  CVector rhs = bath.alpha0() * coupling - bath.xi_eff() * o;
  rhs -= sm.transpose() * o;
  rhs -= kI * (oso * lc + lso * o);
  return rhs;
}

OCoefficients integrate_o(const std::function<QuadraticForm(int step)>& form_of_step,
                          const CVector& coupling, const BathParams& bath, const TimeGrid& grid) {
  bath.validate();
  OCoefficients out;
  out.reserve(static_cast<std::size_t>(grid.n_nodes()));
  if (bath.mode == BathMode::markov) {
    out.assign(static_cast<std::size_t>(grid.n_nodes()), 0.5 * coupling);
    return out;
  }
  const double dt = grid.dt();
  const double limit = 1e3 * coupling.norm();
  out.push_back(CVector::Zero(coupling.size()));
  for (int k = 0; k < grid.n_steps; ++k) {
    const QuadraticForm form = form_of_step(k);
    const CVector& o = out.back();
    const CVector k1 = o_rhs(o, form, coupling, bath);
    const CVector k2 = o_rhs(o + 0.5 * dt * k1, form, coupling, bath);
    const CVector k3 = o_rhs(o + 0.5 * dt * k2, form, coupling, bath);
    const CVector k4 = o_rhs(o + dt * k3, form, coupling, bath);
    CVector next = o + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!next.allFinite() || next.norm() > limit)
      throw PropagationError("integrate_o: O coefficients diverged", k);
    out.push_back(std::move(next));
  }
  return out;
}

DissipativeTerms dissipative_terms(const CVector& o, const CVector& coupling) {
  const CVector lc = coupling.conjugate();
  const CVector oc = o.conjugate();
  DissipativeTerms t;
  t.big_delta = kI * coupling * oc.transpose() - kI * lc * o.transpose();
  t.small_delta = lc * o.transpose() + oc * coupling.transpose();
  t.delta_real = t.small_delta.real();
  return t;
}

GeneratorTerms open_generator(const QuadraticForm& form, const CVector& o, const CVector& coupling) {
  const Matrix sigma = symplectic_form(form.n_modes());
  const DissipativeTerms t = dissipative_terms(o, coupling);
  const CMatrix sd = sigma.cast<cd>() * t.big_delta;
  const double scale = std::max(1.0, sd.cwiseAbs().maxCoeff());
  if (sd.imag().cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::domain_error("open_generator: sigma Delta has an imaginary residue");
  GeneratorTerms g;
  g.drift = sigma * form.matrix() + sd.real();
  g.diffusion = 2.0 * sigma * t.delta_real * sigma.transpose();
  return g;
}

}  // namespace cvk
