// Copyright 2026 The shhlab Authors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "shhlab/noise.hpp"

using namespace shhlab;

TEST_CASE("parameter domains are enforced at construction") {
  CHECK_THROWS_AS(NoiseModel::sine_wiener(0.0), std::invalid_argument);
  CHECK_THROWS_AS(NoiseModel::dcl(-1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(NoiseModel::dcl(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(NoiseModel::tsb(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(NoiseModel::tsb(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(NoiseModel::ks(1.0, -0.1), std::invalid_argument);
}

TEST_CASE("brownian increments: rejection, moments") {
  RngStream rng(1);
  CHECK_THROWS_AS(brownian_increment(1, 0.0, rng), std::invalid_argument);

  const double h = 0.01;
  const int n = 1'000'000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dw = brownian_increment(1, h, rng)[0];
    sum += dw;
    sum_sq += dw * dw;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  // |mean| < 4 standard errors = 4 sqrt(h/N); variance within 1%
  CHECK(std::abs(mean) < 4.0 * std::sqrt(h / n));
  CHECK(var == doctest::Approx(h).epsilon(0.01));
}

TEST_CASE("sine-Wiener values") {
  CHECK(sine_wiener_value(0.0, 1.0) == 0.0);
  CHECK(sine_wiener_value(M_PI / 2.0, 2.0) == doctest::Approx(1.0));  // sqrt(2/tau)=1
  RngStream rng(3);
  for (int i = 0; i < 1000; ++i) {
    CHECK(std::abs(sine_wiener_value(10.0 * rng.gaussian(), 0.7)) <= 1.0);
  }
}

TEST_CASE("drift and diffusion coefficients at z = 0") {
  const auto dcl = NoiseModel::dcl(0.0, 1.0);
  CHECK(dcl.drift(0.0) == 0.0);
  CHECK(dcl.diffusion(0.0) == doctest::Approx(1.0));  // sqrt(1/(theta (gamma+1)))

  const auto dcl2 = NoiseModel::dcl(3.0, 2.0);
  CHECK(dcl2.diffusion(0.0) == doctest::Approx(std::sqrt(1.0 / 8.0)));

  const auto tsb = NoiseModel::tsb(1.0, 0.0);
  CHECK(tsb.drift(0.0) == 0.0);
  CHECK(tsb.diffusion(0.0) == doctest::Approx(1.0));
  // z = 0.9, theta = 1: drift = -0.9 / (1 - 0.81)
  CHECK(tsb.drift(0.9) == doctest::Approx(-0.9 / 0.19));

  const auto ks = NoiseModel::ks(1.0, 0.0);
  CHECK(ks.drift(0.0) == 0.0);
  CHECK(ks.vartheta() == doctest::Approx(1.0));
  CHECK(NoiseModel::ks(1.0, 1.0).vartheta() == doctest::Approx(1.5));
  CHECK(ks.diffusion(0.0) == doctest::Approx(2.0 / M_PI));
}

TEST_CASE("steps reject states outside (-1,1)") {
  RngStream rng(5);
  CHECK_THROWS_AS(dcl_step(1.0, 1e-3, 0.0, 1.0, rng), std::domain_error);
  CHECK_THROWS_AS(tsb_step(-1.5, 1e-3, 1.0, 0.0, rng), std::domain_error);
  CHECK_THROWS_AS(ks_step(2.0, 1e-3, 1.0, 0.0, rng), std::domain_error);
}

namespace {

// million-step single-path run; returns max |Z| and the safeguard stats
template <typename StepFn>
std::pair<double, SafeguardStats> long_run(StepFn step, double h, int steps,
                                           std::uint64_t seed) {
  RngStream rng(seed);
  SafeguardStats stats;
  double z = 0.0;
  double max_abs = 0.0;
  for (int i = 0; i < steps; ++i) {
    z = step(z, h, rng, &stats);
    max_abs = std::max(max_abs, std::abs(z));
  }
  return {max_abs, stats};
}

}  // namespace

TEST_CASE("bounded models stay inside (-1,1) over a million steps") {
  const double h = 1e-3;
  const int steps = 1'000'000;

  auto check = [&](auto step, std::uint64_t seed) {
    const auto [max_abs, stats] = long_run(step, h, steps, seed);
    CHECK(max_abs < 1.0);
    CHECK(stats.steps == steps);
    CHECK(stats.rate() < 1e-3);  // < 0.1% reflections at the default substep
  };
  check([](double z, double hh, RngStream& r, SafeguardStats* s) {
    return dcl_step(z, hh, 1.0, 0.5, r, s);
  }, 11);
  check([](double z, double hh, RngStream& r, SafeguardStats* s) {
    return tsb_step(z, hh, 1.0, 0.0, r, s);
  }, 12);
  check([](double z, double hh, RngStream& r, SafeguardStats* s) {
    return ks_step(z, hh, 1.0, 0.0, r, s);
  }, 13);
}

TEST_CASE("sine-Wiener path through BoundedNoiseState stays inside") {
  BoundedNoiseState state(NoiseModel::sine_wiener(1.0), 2);
  RngStream rng(17);
  SafeguardStats stats;
  double max_abs = 0.0;
  for (int i = 0; i < 500'000; ++i) {
    state.step(1e-3, rng, stats);
    max_abs = std::max(max_abs, state.value().cwiseAbs().maxCoeff());
  }
  CHECK(max_abs < 1.0);
  CHECK(stats.rate() < 1e-3);
}

TEST_CASE("odd symmetry: negating the draws flips the path") {
  // record the draws, then replay them negated from the negated start
  const int steps = 2000;
  std::vector<double> draws(steps);
  {
    RngStream rng(23);
    for (double& d : draws) d = rng.gaussian();
  }
  auto run = [&](auto step_xi, double z0, double sign) {
    double z = z0;
    std::vector<double> path(steps);
    for (int i = 0; i < steps; ++i) {
      z = step_xi(z, 1e-3, sign * draws[i]);
      path[i] = z;
    }
    return path;
  };

  auto check_odd = [&](auto step_xi) {
    const auto plus = run(step_xi, 0.3, 1.0);
    const auto minus = run(step_xi, -0.3, -1.0);
    for (int i = 0; i < steps; ++i) {
      CHECK(plus[i] == doctest::Approx(-minus[i]).epsilon(1e-12));
    }
  };
  check_odd([](double z, double h, double xi) { return dcl_step_xi(z, h, 1.0, 0.5, xi); });
  check_odd([](double z, double h, double xi) { return tsb_step_xi(z, h, 1.0, 0.0, xi); });
  check_odd([](double z, double h, double xi) { return ks_step_xi(z, h, 1.0, 0.0, xi); });
}

TEST_CASE("zero is a fixed point of the ensemble mean") {
  // gamma = 0, theta = 1 DCL: mean over paths starting at 0 stays ~0
  const int n_paths = 2000;
  const int steps = 200;
  double sum = 0.0, sum_sq = 0.0;
  for (int p = 0; p < n_paths; ++p) {
    RngStream rng(RngStream::derive_seed(29, p));
    double z = 0.0;
    for (int i = 0; i < steps; ++i) z = dcl_step(z, 1e-2, 0.0, 1.0, rng);
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / n_paths;
  const double se = std::sqrt((sum_sq / n_paths - mean * mean) / n_paths);
  CHECK(std::abs(mean) < 4.0 * se + 1e-12);
}

TEST_CASE("frozen model keeps the state at zero") {
  BoundedNoiseState state(NoiseModel::frozen(), 3);
  RngStream rng(31);
  SafeguardStats stats;
  for (int i = 0; i < 100; ++i) state.step(0.01, rng, stats);
  CHECK(state.value().norm() == 0.0);
}
