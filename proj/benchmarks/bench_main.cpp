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

#include <optional>
#include <span>

#include <benchmark/benchmark.h>

#include "cvkrotov/chain.hpp"
#include "cvkrotov/fock.hpp"
#include "cvkrotov/gaussian.hpp"
#include "cvkrotov/krotov.hpp"
#include "cvkrotov/measures.hpp"
#include "cvkrotov/open_system.hpp"

namespace {

using namespace cvk;

ChainSpec chain_of(int n) {
  ChainSpec c;
  c.n_sites = n;
  return c;
}

void BM_GaussianFidelity(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const CovarianceMatrix a = tmss_cm(n, 1, 2, 1.2);
  const CovarianceMatrix b = tmss_cm(n, n - 1, n, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_fidelity(a, b));
}
BENCHMARK(BM_GaussianFidelity)->Arg(2)->Arg(5)->Arg(7);

void BM_LogNegativity(benchmark::State& state) {
  const CovarianceMatrix g = tmss_cm(2, 1, 2, 1.2);
  for (auto _ : state) benchmark::DoNotOptimize(log_negativity(g));
}
BENCHMARK(BM_LogNegativity);

void BM_SimulateClosed(benchmark::State& state) {
  const ChainSpec chain = chain_of(static_cast<int>(state.range(0)));
  const TimeGrid grid(15.0, 2000);
  const ControlProblem p = ControlProblem::for_chain(chain, grid);
  const ControlGrid c = initial_guess(chain, grid);
  const CovarianceMatrix g0 = tmss_cm(chain.n_sites, 1, 2, 1.2);
  for (auto _ : state) benchmark::DoNotOptimize(p.simulate(c, g0));
}
BENCHMARK(BM_SimulateClosed)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_OCoefficients(benchmark::State& state) {
  const ChainSpec chain = chain_of(5);
  const TimeGrid grid(15.0, 2000);
  const ControlProblem p = ControlProblem::for_chain(chain, grid, BathParams{});
  const ControlGrid c = initial_guess(chain, grid);
  for (auto _ : state) benchmark::DoNotOptimize(p.o_coefficients(c));
}
BENCHMARK(BM_OCoefficients)->Unit(benchmark::kMillisecond);

void BM_KrotovIteration(benchmark::State& state) {
  const ChainSpec chain = chain_of(5);
  const TimeGrid grid(15.0, 2000);
  std::optional<BathParams> bath;
  if (state.range(0) == 1) bath = BathParams{};
  const ControlProblem p = ControlProblem::for_chain(chain, grid, bath, 8.0);
  const TrajectoryPair pair = chain_transfer_pair(5, 1.2);
  KrotovConfig cfg;
  cfg.lambda_a = 4.0;
  cfg.max_iterations = 1;
  const ControlGrid guess = initial_guess(chain, grid);
  for (auto _ : state) benchmark::DoNotOptimize(krotov_optimize(p, {&pair, 1}, guess, cfg));
}
BENCHMARK(BM_KrotovIteration)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_FockTmss(benchmark::State& state) {
  const fock::FockSpace space(2, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fock::tmss_state(space, 1.0));
}
BENCHMARK(BM_FockTmss)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
