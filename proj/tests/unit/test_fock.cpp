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

#include <cmath>
#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "cvkrotov/fock.hpp"
#include "support/gaussian_ops.hpp"

namespace cvk::fock {
namespace {

using cd = std::complex<double>;

std::int64_t basis_index(const FockSpace& space, std::vector<int> occ) {
  for (std::int64_t i = 0; i < space.dimension(); ++i) {
    bool match = true;
    for (int m = 0; m < space.n_modes(); ++m) match = match && space.occupation(i, m) == occ[m];
    if (match) return i;
  }
  return -1;
}

State basis_state(const FockSpace& space, std::vector<int> occ) {
  State s = State::Zero(space.dimension());
  s[basis_index(space, std::move(occ))] = 1.0;
  return s;
}

TEST(FockSpace, Validation) {
  EXPECT_EQ(FockSpace(2, 10).dimension(), 100);
  EXPECT_EQ(FockSpace(3, 5).dimension(), 125);
  EXPECT_THROW(FockSpace(4, 3), std::invalid_argument);
  EXPECT_THROW(FockSpace(1, 1), std::invalid_argument);
  EXPECT_THROW(FockSpace(3, 50), std::invalid_argument);
}

TEST(FockSpace, OccupationsEnumerateBasis) {
  const FockSpace space(3, 4);
  std::vector<int> seen(64, 0);
  for (std::int64_t i = 0; i < space.dimension(); ++i) {
    const int code = space.occupation(i, 0) * 16 + space.occupation(i, 1) * 4 + space.occupation(i, 2);
    ++seen[code];
  }
  for (int c : seen) EXPECT_EQ(c, 1);
}

TEST(Operators, CanonicalCommutatorBelowCutoff) {
  const FockSpace space(2, 8);
  const auto ops = build_operators(space);
  for (int m = 0; m < 2; ++m) {
    const Density comm = Density(ops[m].q * ops[m].p) - Density(ops[m].p * ops[m].q);
    for (std::int64_t i = 0; i < space.dimension(); ++i) {
      if (space.occupation(i, m) >= space.cutoff() - 1) continue;
      for (std::int64_t j = 0; j < space.dimension(); ++j) {
        const cd expected = i == j ? cd(0, 1) : cd(0);
        EXPECT_LT(std::abs(comm(i, j) - expected), 1e-14);
      }
    }
  }
  // Different modes commute.
  const Density cross = Density(ops[0].q * ops[1].p) - Density(ops[1].p * ops[0].q);
  EXPECT_LT(cross.cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Operators, LadderAction) {
  const FockSpace space(1, 6);
  const auto ops = build_operators(space);
  const State one = basis_state(space, {1});
  EXPECT_LT((ops[0].a * one - vacuum(space)).norm(), 1e-15);
  const State three = basis_state(space, {3});
  EXPECT_LT((ops[0].adag * three - 2.0 * basis_state(space, {4})).norm(), 1e-14);
  EXPECT_LT((ops[0].a * vacuum(space)).norm(), 1e-15);
}

TEST(Operators, NumberSpectrum) {
  const FockSpace space(1, 9);
  const auto ops = build_operators(space);
  const Density n = Density(ops[0].adag * ops[0].a);
  const Eigen::SelfAdjointEigenSolver<Density> es(n);
  for (int k = 0; k < 9; ++k) EXPECT_NEAR(es.eigenvalues()[k], k, 1e-12);
}

TEST(Operators, QuadraturesHermitian) {
  const FockSpace space(2, 6);
  for (const auto& o : build_operators(space)) {
    EXPECT_LT(Density(o.q - SparseOp(o.q.adjoint())).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT(Density(o.p - SparseOp(o.p.adjoint())).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Exponential, UnitaryAndAgreesWithDense) {
  const FockSpace space(2, 6);
  const SparseOp g = beam_splitter_generator(space, 0, 1, 0.7);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  State v(space.dimension());
  for (auto& x : v) x = cd(nd(rng), nd(rng));
  v.normalize();
  const State out = apply_exponential(g, v);
  EXPECT_NEAR(out.norm(), 1.0, 1e-13);
  // Dense reference through the eigen-decomposition of the Hermitian i G.
  const Density h = cd(0, 1) * Density(g);
  const Eigen::SelfAdjointEigenSolver<Density> es(h);
  const Eigen::VectorXcd phase =
      (es.eigenvalues().cast<cd>() * cd(0, -1)).array().exp().matrix();
  const State ref = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint() * v;
  EXPECT_LT((out - ref).norm(), 1e-12);
}

TEST(TmssState, ZeroSqueezingIsVacuum) {
  const FockSpace space(2, 10);
  EXPECT_LT((tmss_state(space, 0.0) - vacuum(space)).norm(), 1e-15);
}

TEST(TmssState, SchmidtCoefficients) {
  const double r = 0.9;
  const FockSpace space(2, 40);
  const State psi = tmss_state(space, r);
  ASSERT_LT(edge_population(space, psi, 5), 1e-8);
  for (int n = 0; n < 15; ++n) {
    const double expected = std::pow(std::tanh(r), n) / std::cosh(r);
    // Sign follows the generator convention (-tanh r)^n.
    EXPECT_NEAR(std::abs(psi[basis_index(space, {n, n})]), expected, 1e-10) << "n=" << n;
  }
  EXPECT_LT(std::abs(psi[basis_index(space, {1, 2})]), 1e-14);
}

TEST(TmssState, MomentsMatchGaussian) {
  for (double r : {0.3, 0.6, 1.0}) {
    const FockSpace space(2, 40);
    const State psi = tmss_state(space, r);
    ASSERT_LT(edge_population(space, psi, 5), 1e-8);
    EXPECT_LT(testing::max_abs(extract_cm(space, psi).matrix() - tmss_cm(2, 1, 2, r).matrix()), 1e-6);
    EXPECT_LT(extract_means(space, psi).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(TmssState, TruncationIsAnError) {
  EXPECT_THROW(tmss_state(FockSpace(2, 8), 1.2), std::exception);
  EXPECT_THROW(tmss_state(FockSpace(3, 4), 0.1), std::invalid_argument);
}

TEST(ExtractCm, Vacuum) {
  const FockSpace space(3, 4);
  EXPECT_LT(testing::max_abs(extract_cm(space, vacuum(space)).matrix() - Matrix::Identity(6, 6)), 1e-15);
  const State v = vacuum(space);
  const Density rho = v * v.adjoint();
  EXPECT_LT(testing::max_abs(extract_cm(space, rho).matrix() - Matrix::Identity(6, 6)), 1e-15);
}

TEST(ExtractCm, DensityAndStateAgree) {
  std::mt19937_64 rng(7);
  const FockSpace space(2, 20);
  const auto gates = testing::random_gates(2, 0.4, rng);
  const State psi = testing::apply_gates(gates, space, vacuum(space));
  ASSERT_LT(edge_population(space, psi, 3), 1e-8);
  const Density rho = psi * psi.adjoint();
  EXPECT_LT(testing::max_abs(extract_cm(space, psi).matrix() - extract_cm(space, rho).matrix()), 1e-12);
  EXPECT_LT(testing::max_abs(extract_cm(space, psi).matrix() -
                             testing::apply_gates(gates, vacuum_cm(2)).matrix()),
            1e-6);
}

TEST(Lindblad, ZeroJumpIsUnitary) {
  const FockSpace space(2, 8);
  const State psi = tmss_state(space, 0.3);
  const SparseOp h = quadratic_hamiltonian(space, Matrix::Identity(4, 4));
  const SparseOp none(space.dimension(), space.dimension());
  double worst = 0.0;
  const Density out = lindblad_propagate(psi * psi.adjoint(), [&](int) { return h; }, none, TimeGrid(3.0, 1500),
                                         [&](int, const Density& rho) {
                                           worst = std::max(worst, std::abs((rho * rho).trace().real() - 1.0));
                                         });
  EXPECT_LT(worst, 1e-8);
  EXPECT_TRUE(is_valid_density(out));
}

TEST(Lindblad, AmplitudeDampingDecay) {
  const FockSpace space(1, 12);
  const auto ops = build_operators(space);
  const SparseOp zero(space.dimension(), space.dimension());
  State psi = basis_state(space, {3});
  const Density rho0 = psi * psi.adjoint();
  const SparseOp n_op = ops[0].adag * ops[0].a;
  const TimeGrid grid(2.0, 400);
  lindblad_propagate(rho0, [&](int) { return zero; }, ops[0].a, grid, [&](int k, const Density& rho) {
    const double n = (Density(n_op) * rho).trace().real();
    EXPECT_NEAR(n, 3.0 * std::exp(-grid.time(k)), 1e-8) << "node " << k;
  });
}

TEST(Lindblad, StaysPhysical) {
  const FockSpace space(2, 10);
  const auto ops = build_operators(space);
  const State psi = tmss_state(space, 0.3);
  const SparseOp h = quadratic_hamiltonian(space, Matrix::Identity(4, 4));
  const SparseOp l = SparseOp(cd(0.2) * (ops[0].q + ops[1].q));
  lindblad_propagate(psi * psi.adjoint(), [&](int) { return h; }, l, TimeGrid(2.0, 400),
                     [&](int k, const Density& rho) {
                       if (k % 50 == 0) {
                         EXPECT_TRUE(is_valid_density(rho)) << "node " << k;
                       }
                     });
}

TEST(BuresFidelity, Examples) {
  const FockSpace space(2, 12);
  const State psi = tmss_state(space, 0.4);
  const Density rho = psi * psi.adjoint();
  EXPECT_NEAR(bures_fidelity(rho, rho), 1.0, 1e-7);
  EXPECT_NEAR(bures_fidelity(psi, psi), 1.0, 1e-14);
  const State phi = basis_state(space, {1, 0});
  EXPECT_NEAR(bures_fidelity(psi, phi), 0.0, 1e-14);
  const State mix = (psi + 0.3 * vacuum(space)).normalized();
  const double overlap = std::abs(psi.dot(mix));
  EXPECT_NEAR(bures_fidelity(psi, mix), overlap, 1e-14);
  EXPECT_NEAR(bures_fidelity(psi, Density(mix * mix.adjoint())), overlap, 1e-10);
  EXPECT_NEAR(bures_fidelity(rho, Density(mix * mix.adjoint())), overlap, 1e-6);
}

TEST(BuresFidelity, RejectsNegativeDensity) {
  Density bad = Density::Identity(2, 2);
  bad(1, 1) = -0.1;
  EXPECT_THROW(bures_fidelity(bad, Density::Identity(2, 2)), std::exception);
}

TEST(LogNegativityFock, ProductStateIsZero) {
  const FockSpace space(2, 12);
  const State psi = apply_exponential(squeeze_generator(space, 0, 0.5), vacuum(space));
  EXPECT_NEAR(log_negativity_fock(space, psi), 0.0, 1e-10);
  EXPECT_NEAR(log_negativity_fock(space, Density(psi * psi.adjoint())), 0.0, 1e-10);
}

TEST(LogNegativityFock, BellPairIsOne) {
  const FockSpace space(2, 2);
  const State bell = (basis_state(space, {0, 0}) + basis_state(space, {1, 1})) / std::sqrt(2.0);
  EXPECT_NEAR(log_negativity_fock(space, bell), 1.0, 1e-14);
  EXPECT_NEAR(log_negativity_fock(space, Density(bell * bell.adjoint())), 1.0, 1e-12);
}

TEST(LogNegativityFock, TmssValue) {
  const FockSpace space(2, 60);
  const State psi = tmss_state(space, 1.2);
  ASSERT_LT(edge_population(space, psi, 5), 1e-8);
  EXPECT_NEAR(log_negativity_fock(space, psi), 2 * 1.2 / std::log(2.0), 1e-3);
}

TEST(LogNegativityFock, DenseAndSparseRoutesAgree) {
  const FockSpace space(2, 16);
  const State psi = tmss_state(space, 0.5);
  EXPECT_NEAR(log_negativity_fock(space, psi), log_negativity_fock(space, Density(psi * psi.adjoint())), 1e-9);
}

TEST(DensityValidity, Checks) {
  Density rho = Density::Zero(3, 3);
  rho(0, 0) = 0.5;
  rho(1, 1) = 0.5;
  EXPECT_TRUE(is_valid_density(rho));
  rho(0, 1) = 0.1;
  EXPECT_FALSE(is_valid_density(rho));
  rho(1, 0) = 0.1;
  EXPECT_TRUE(is_valid_density(rho));
  rho(2, 2) = 0.1;
  EXPECT_FALSE(is_valid_density(rho));
}

}  // namespace
}  // namespace cvk::fock
