// Copyright 2026 The shhlab Authors
// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "shhlab/bench_systems.hpp"
#include "shhlab/integrate.hpp"

namespace {

using namespace shhlab;

void BM_HoldInterval(benchmark::State& state) {
  const auto bench = ou_benchmark(static_cast<int>(state.range(0)), 1.0, 0.3, 0.5);
  RngStream rng(1);
  const Vec x0 = bench.default_x0;
  const Vec u = bench.policy.map(x0);
  for (auto _ : state) {
    Vec end = integrate_hold_interval(bench.system, x0, u, 0.01, 0.01 / 16, rng);
    benchmark::DoNotOptimize(end);
  }
  state.SetItemsProcessed(state.iterations() * 16);
}
BENCHMARK(BM_HoldInterval)->Arg(1)->Arg(3);

void BM_AugmentedSubsteps(benchmark::State& state) {
  auto bench = nonholonomic_benchmark(NoiseModel::tsb(1.0, 0.0), 0.1);
  AugmentedSde aug = bench.augmented();
  MarkovPolicy constant;
  constant.map = [](const Vec&) { return Vec::Constant(2, 0.5); };
  SampleHoldConfig cfg = SampleHoldConfig::with_substeps(0.01, 16, 0.5, bench.default_x0);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    RngStream rng(seed++);
    Trajectory traj = simulate_augmented(aug, constant, cfg, rng);
    benchmark::DoNotOptimize(traj.states.back());
  }
  state.SetItemsProcessed(state.iterations() * 16 * 50);
}
BENCHMARK(BM_AugmentedSubsteps);

}  // namespace
