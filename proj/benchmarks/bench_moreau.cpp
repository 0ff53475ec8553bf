// Copyright 2026 The shhlab Authors
// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "shhlab/bench_systems.hpp"
#include "shhlab/moreau.hpp"

namespace {

using namespace shhlab;

void BM_InfConvValue(benchmark::State& state) {
  const auto bench = nonholonomic_benchmark(NoiseModel::tsb(1.0, 0.0), 0.1, 0.1);
  const InfConvolution& ic = *bench.inf_conv;
  Vec x(3);
  x << 1.0, 1.0, 0.5;
  for (auto _ : state) {
    auto res = inf_conv_value(ic, x);
    benchmark::DoNotOptimize(res.value);
  }
}
BENCHMARK(BM_InfConvValue);

void BM_ControlUpdate(benchmark::State& state) {
  const auto bench = nonholonomic_benchmark(NoiseModel::tsb(1.0, 0.0), 0.1, 0.1,
                                            static_cast<int>(state.range(0)));
  Vec x(3);
  x << 1.0, 1.0, 0.5;
  for (auto _ : state) {
    Vec u = bench.policy.map(x);
    benchmark::DoNotOptimize(u);
  }
}
BENCHMARK(BM_ControlUpdate)->Arg(21)->Arg(41);

}  // namespace
