//
// Copyright 2026 The agedp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <cmath>
#include <cstdint>
#include <vector>

#include "Eigen/Dense"
#include "agedp/attack_sim.h"
#include "agedp/chain_models.h"
#include "agedp/guarantee_calculus.h"
#include "agedp/policy_optimizer.h"
#include "agedp/random.h"
#include "benchmark/benchmark.h"

namespace agedp {
namespace {

FiniteMarkovChain RandomChain(int n, uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd w(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) w(i, j) = w(j, i) = 0.05 + rng.Uniform();
  }
  for (int i = 0; i < n; ++i) w.row(i) /= w.row(i).sum();
  std::vector<ChainState> states(n);
  for (int i = 0; i < n; ++i) states[i].value = i;
  return FiniteMarkovChain::Create(states, w).value();
}

void BM_MaxTvDistanceCurve(benchmark::State& state) {
  const std::vector<FiniteMarkovChain> chains = {
      RandomChain(static_cast<int>(state.range(0)), 1)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(MaxTvDistanceCurve(chains, 50).value());
  }
}
BENCHMARK(BM_MaxTvDistanceCurve)->Arg(2)->Arg(12)->Arg(48);

void BM_SpectralBound(benchmark::State& state) {
  const std::vector<FiniteMarkovChain> chains = {
      RandomChain(static_cast<int>(state.range(0)), 2)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(TvBoundSpectral(chains, 10).value());
  }
}
BENCHMARK(BM_SpectralBound)->Arg(2)->Arg(12)->Arg(48);

void BM_ComposeRiskCurve(benchmark::State& state) {
  const GeometricDecayModel model = GeometricDecayModel::Create(1.0, 0.8).value();
  const DeltaFn delta = DeltaFromDecay(model);
  const PolicySchedule schedule =
      PolicySchedule::Uniform({2, 4, 0.5}, state.range(0)).value();
  const int64_t horizon = 4 * state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ComposeRiskCurve(schedule, delta, horizon).value());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ComposeRiskCurve)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

// Grid size K drives the optimizer cost linearly.
void BM_SolveGridSize(benchmark::State& state) {
  OptimizationProblem p;
  p.c = 1.0;
  p.rho = 0.8;
  p.f_bar = 0.09;
  p.penalty = PenaltyFunction::MseTwoState(0.1, 0.1, 20).value();
  p.K = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(Solve(p).value());
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveGridSize)->RangeMultiplier(2)->Range(125, 2000)->Complexity(benchmark::oN);

void BM_SolveTolerance(benchmark::State& state) {
  OptimizationProblem p;
  p.c = 1.0;
  p.rho = 0.8;
  p.f_bar = 0.09;
  p.penalty = PenaltyFunction::MseTwoState(0.1, 0.1, 20).value();
  p.K = 400;
  p.phi = std::pow(10.0, -static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Solve(p).value());
}
BENCHMARK(BM_SolveTolerance)->DenseRange(3, 12, 3);

void BM_ExpectedFailureRate(benchmark::State& state) {
  const int users = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ExpectedFailureRate(0.1, 0.1, 5.0, 1.0, users).value());
  }
}
BENCHMARK(BM_ExpectedFailureRate)->Arg(4)->Arg(20)->Arg(64);

void BM_FailureRateMonteCarlo(benchmark::State& state) {
  std::vector<double> x0(20, 1.0);
  for (size_t i = 0; i < x0.size(); i += 2) x0[i] = -1.0;
  FailureRateOptions opts;
  opts.samples = state.range(0);
  for (auto _ : state) {
    Rng rng(42);
    benchmark::DoNotOptimize(FailureRate(0.1, 0.1, 5, 1.0, x0, rng, opts).value());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FailureRateMonteCarlo)->Arg(10'000)->Arg(100'000);

}  // namespace
}  // namespace agedp

BENCHMARK_MAIN();
