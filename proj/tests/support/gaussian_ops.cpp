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

#include "gaussian_ops.hpp"

#include <cmath>
#include <numbers>

namespace cvk::testing {

Matrix gate_symplectic(const Gate& g, int n) {
  Matrix s = Matrix::Identity(2 * n, 2 * n);
  const int qi = g.mode_i, pi = n + g.mode_i;
  switch (g.kind) {
    case GateKind::squeeze:
      s(qi, qi) = std::exp(-g.param);
      s(pi, pi) = std::exp(g.param);
      break;
    case GateKind::rotation: {
      const double c = std::cos(g.param), sn = std::sin(g.param);
      s(qi, qi) = c;
      s(qi, pi) = sn;
      s(pi, qi) = -sn;
      s(pi, pi) = c;
      break;
    }
    case GateKind::beam_splitter: {
      const int qj = g.mode_j, pj = n + g.mode_j;
      const double c = std::cos(g.param), sn = std::sin(g.param);
      for (auto [a, b] : {std::pair{qi, qj}, std::pair{pi, pj}}) {
        s(a, a) = c;
        s(a, b) = sn;
        s(b, a) = -sn;
        s(b, b) = c;
      }
      break;
    }
  }
  return s;
}

fock::SparseOp gate_generator(const Gate& g, const fock::FockSpace& space) {
  switch (g.kind) {
    case GateKind::squeeze:
      return fock::squeeze_generator(space, g.mode_i, g.param);
    case GateKind::rotation:
      return fock::rotation_generator(space, g.mode_i, g.param);
    case GateKind::beam_splitter:
      return fock::beam_splitter_generator(space, g.mode_i, g.mode_j, g.param);
  }
  return {};
}

CovarianceMatrix apply_gates(const std::vector<Gate>& gates, const CovarianceMatrix& gamma) {
  Matrix m = gamma.matrix();
  for (const auto& g : gates) {
    const Matrix s = gate_symplectic(g, gamma.n_modes());
    m = s * m * s.transpose();
  }
  return CovarianceMatrix(0.5 * (m + m.transpose()));
}

fock::State apply_gates(const std::vector<Gate>& gates, const fock::FockSpace& space,
                        const fock::State& psi) {
  fock::State out = psi;
  for (const auto& g : gates) out = fock::apply_exponential(gate_generator(g, space), out);
  return out;
}

std::vector<Gate> random_gates(int n, double r_max, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> sq(-r_max, r_max);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  std::vector<Gate> gates;
  for (int i = 0; i < n; ++i) gates.push_back({GateKind::squeeze, i, 0, sq(rng)});
  for (int i = 0; i < n; ++i) gates.push_back({GateKind::rotation, i, 0, ang(rng)});
  for (int i = 0; i + 1 < n; ++i) gates.push_back({GateKind::beam_splitter, i, i + 1, ang(rng)});
  for (int i = 0; i < n; ++i) gates.push_back({GateKind::rotation, i, 0, ang(rng)});
  return gates;
}

CovarianceMatrix random_pure_cm(int n, double r_max, std::mt19937_64& rng) {
  return apply_gates(random_gates(n, r_max, rng), vacuum_cm(n));
}

Matrix random_symmetric(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = nd(rng);
  m = (0.5 * (m + m.transpose())).eval();
  return m / m.norm();
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace cvk::testing
