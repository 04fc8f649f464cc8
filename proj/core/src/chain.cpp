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

#include "cvkrotov/chain.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace cvk {

std::string_view to_string(Topology t) {
  return t == Topology::linear ? "linear" : "x_shaped";
}

Topology topology_from_string(std::string_view s) {
  if (s == "linear") return Topology::linear;
  if (s == "x_shaped") return Topology::x_shaped;
  throw std::invalid_argument("unknown topology '" + std::string(s) + "'");
}

void ChainSpec::validate() const {
  if (topology == Topology::linear && n_sites < 2)
    throw std::invalid_argument("linear chain requires n_sites >= 2");
  if (topology == Topology::x_shaped && n_sites != 7)
    throw std::invalid_argument("x_shaped chain requires n_sites = 7");
  if (!std::isfinite(omega0) || !std::isfinite(g0))
    throw std::invalid_argument("chain parameters must be finite");
}

QuadraticForm linear_chain_form(int n_sites, double omega0, double g0) {
  if (n_sites < 2) throw std::invalid_argument("linear_chain_form: n_sites must be >= 2");
  const int n = n_sites;
  Matrix block = omega0 * Matrix::Identity(n, n);
  for (int i = 0; i + 1 < n; ++i) block(i, i + 1) = block(i + 1, i) = g0;
  Matrix m = Matrix::Zero(2 * n, 2 * n);
  m.topLeftCorner(n, n) = block;
  m.bottomRightCorner(n, n) = block;
  return QuadraticForm(m);
}

const std::vector<std::pair<int, int>>& x_chain_edges() {
  static const std::vector<std::pair<int, int>> edges{{1, 3}, {2, 3}, {3, 4},
                                                      {4, 5}, {5, 6}, {5, 7}};
  return edges;
}

QuadraticForm x_chain_form(double g0) {
  constexpr int n = 7;
  Matrix m = Matrix::Identity(2 * n, 2 * n);
  for (const auto& [a, b] : x_chain_edges()) m(a - 1, b - 1) = m(b - 1, a - 1) = g0;
  return QuadraticForm(m);
}

QuadraticForm chain_form(const ChainSpec& chain) {
  chain.validate();
  if (chain.topology == Topology::linear)
    return linear_chain_form(chain.n_sites, chain.omega0, chain.g0);
  // The X-chain carries unit on-site frequency; omega0 scales it.
  QuadraticForm form = x_chain_form(chain.g0);
  if (chain.omega0 != 1.0) {
    Matrix m = form.matrix();
    for (int k = 0; k < 14; ++k) m(k, k) = chain.omega0;
    form = QuadraticForm(m);
  }
  return form;
}

QuadraticForm control_form(int site, int n_sites) {
  if (site < 1 || site > n_sites)
    throw std::invalid_argument("control_form: site " + std::to_string(site) + " out of range");
  Matrix m = Matrix::Zero(2 * n_sites, 2 * n_sites);
  m(site - 1, site - 1) = 1.0;
  m(n_sites + site - 1, n_sites + site - 1) = 1.0;
  return QuadraticForm(m);
}

CVector coupling_vector(int n_sites, double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("coupling_vector: lambda must be >= 0");
  CVector l = CVector::Zero(2 * n_sites);
  l.head(n_sites).setConstant(lambda);
  return l;
}

Vector initial_guess(Topology topology, int channel, const TimeGrid& grid) {
  Vector c = Vector::Zero(grid.n_steps);
  if (topology == Topology::x_shaped) {
    const double amp = 0.1 + channel / 20.0;
    for (int k = 0; k < grid.n_steps; ++k)
      c[k] = amp * std::sin(4.0 * std::numbers::pi * grid.time(k) / grid.horizon);
  }
  return c;
}

ControlGrid initial_guess(const ChainSpec& chain, const TimeGrid& grid) {
  ControlGrid cg(chain.n_sites, grid.n_steps);
  for (int i = 1; i <= chain.n_sites; ++i)
    cg.values.row(i - 1) = initial_guess(chain.topology, i, grid).transpose();
  return cg;
}

}  // namespace cvk
