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

#include <string_view>
#include <utility>
#include <vector>

#include "cvkrotov/gaussian.hpp"

namespace cvk {

enum class Topology { linear, x_shaped };
enum class CouplingKind { excitation_preserving, position_position };

std::string_view to_string(Topology t);
Topology topology_from_string(std::string_view s);

struct ChainSpec {
  Topology topology = Topology::linear;
  int n_sites = 5;
  double omega0 = 1.0;
  double g0 = 0.4;

  CouplingKind coupling_kind() const {
    return topology == Topology::linear ? CouplingKind::excitation_preserving
                                        : CouplingKind::position_position;
  }
  /// Throws std::invalid_argument on an inconsistent chain.
  void validate() const;
};

/// omega0 sum a^dag a + g0 sum (a_i^dag a_{i+1} + h.c.), constants dropped.
QuadraticForm linear_chain_form(int n_sites, double omega0, double g0);

/// The seven-site X graph with position-position couplings; sites 1,2 are
/// the head legs and 6,7 the tail legs.
QuadraticForm x_chain_form(double g0);

/// Undirected 1-based edges of the X graph.
const std::vector<std::pair<int, int>>& x_chain_edges();

QuadraticForm chain_form(const ChainSpec& chain);

/// (p_i^2 + q_i^2)/2 on site i (1-based).
QuadraticForm control_form(int site, int n_sites);

/// Coefficients l of L = l . R for L = lambda sum_i q_i. Stored complex
/// because the O-coefficient algebra is complex.
CVector coupling_vector(int n_sites, double lambda);

/// Piecewise-constant control amplitudes: row = channel (site order),
/// column = grid bin k on [t_k, t_{k+1}).
struct ControlGrid {
  Matrix values;

  ControlGrid() = default;
  ControlGrid(int n_channels, int n_bins) : values(Matrix::Zero(n_channels, n_bins)) {}

  int n_channels() const { return static_cast<int>(values.rows()); }
  int n_bins() const { return static_cast<int>(values.cols()); }
  double operator()(int channel, int bin) const { return values(channel, bin); }
  double& operator()(int channel, int bin) { return values(channel, bin); }
};

/// Guess amplitudes for one channel (1-based) sampled at the bin edges t_k.
Vector initial_guess(Topology topology, int channel, const TimeGrid& grid);
ControlGrid initial_guess(const ChainSpec& chain, const TimeGrid& grid);

}  // namespace cvk
