// Copyright 2026 The shhlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "shhlab/bench_systems.hpp"

#include <cmath>
#include <stdexcept>

namespace shhlab {

AugmentedSde Benchmark::augmented() const {
  if (!bounded_noise) {
    throw std::logic_error("benchmark '" + name + "' has no bounded noise model");
  }
  return AugmentedSde{system, *bounded_noise};
}

SdeVariant Benchmark::sde_variant() const {
  if (bounded_noise) return augmented();
  return system;
}

Benchmark ou_benchmark(int n, double a, double sigma0, double k) {
  if (n < 1) throw std::invalid_argument("ou_benchmark: n must be >= 1");
  if (!(a + k > 0.0)) throw std::invalid_argument("ou_benchmark: need a + k > 0");
  Benchmark b;
  b.name = "ou";
  b.system.state_dim = n;
  b.system.control_dim = n;
  b.system.noise_dim = n;
  b.system.drift = [a](const Vec& x, const Vec& u) -> Vec { return -a * x + u; };
  b.system.diffusion = [n, sigma0](const Vec&, const Vec&) -> Mat {
    return sigma0 * Mat::Identity(n, n);
  };
  b.policy.map = [k](const Vec& x) -> Vec { return -k * x; };

  const double c = a + k;
  SmoothLyapunovPair pair;
  pair.state_dim = n;
  pair.value = [](const Vec& x) { return x.squaredNorm(); };
  pair.gradient = [](const Vec& x) -> Vec { return 2.0 * x; };
  pair.hessian = [n](const Vec&) -> Mat { return 2.0 * Mat::Identity(n, n); };
  pair.alpha1 = KInfFunction::power(1.0, 2.0);
  pair.alpha2 = KInfFunction::power(1.0, 2.0);
  pair.alpha3 = KInfFunction::power(2.0 * c, 2.0);
  pair.sigma_bar = n * sigma0 * sigma0;
  pair.policy = b.policy;
  b.pair = pair;

  MomentOracle oracle;
  oracle.mean_state = [c](const Vec& x0, double t) -> Vec { return std::exp(-c * t) * x0; };
  oracle.mean_sq = [c, sigma0, n](const Vec& x0, double t) {
    const double decay = std::exp(-2.0 * c * t);
    const double var_per_coord = sigma0 * sigma0 * (1.0 - decay) / (2.0 * c);
    return x0.squaredNorm() * decay + n * var_per_coord;
  };
  b.oracle = oracle;

  b.default_x0 = Vec::Ones(n) / std::sqrt(static_cast<double>(n));
  b.default_r = 0.2;
  b.default_R = 2.0;
  return b;
}

double nonholonomic_clf(const Vec& x) {
  const double r12 = std::sqrt(x[0] * x[0] + x[1] * x[1]);
  return x[0] * x[0] + x[1] * x[1] + 2.0 * x[2] * x[2] - 2.0 * std::abs(x[2]) * r12;
}

namespace {

// Decay rate of the inf-convolution controller on the parking benchmark,
// alpha3(s) = c3 * s^2/(1+s): quadratic near the origin (prox smoothing
// dominates there), linear at range (box-limited controls). The worst
// grid-measured decay ratio -<v_beta(x), f(x, mu(x))> / (s^2/(1+s)) over the
// annulus 0.02 <= ||x|| <= 4 is 1.11 for beta in {0.05, 0.1}; c3 keeps a 2x
// margin under that.
constexpr double kNonholonomicAlpha3Coeff = 0.5;

KInfFunction nonholonomic_alpha3() {
  const double c = kNonholonomicAlpha3Coeff;
  return KInfFunction{
      [c](double s) { return c * s * s / (1.0 + s); },
      [c](double y) { return (y + std::sqrt(y * y + 4.0 * c * y)) / (2.0 * c); }};
}

}  // namespace

Benchmark nonholonomic_benchmark(const NoiseModel& noise, double sigma0, double beta,
                                 int control_grid, double solver_tol,
                                 bool pivot_at_state) {
  if (!noise.bounded()) {
    throw std::invalid_argument("nonholonomic_benchmark needs a bounded noise model");
  }
  Benchmark b;
  b.name = "nonholonomic";
  b.system.state_dim = 3;
  b.system.control_dim = 2;
  b.system.noise_dim = 3;
  b.system.drift = [](const Vec& x, const Vec& u) -> Vec {
    Vec f(3);
    f << u[0], u[1], x[0] * u[1] - x[1] * u[0];
    return f;
  };
  b.system.diffusion = [sigma0](const Vec&, const Vec&) -> Mat {
    return sigma0 * Mat::Identity(3, 3);
  };
  b.bounded_noise = noise;

  NonsmoothClf clf;
  clf.state_dim = 3;
  clf.value = nonholonomic_clf;
  clf.alpha3 = nonholonomic_alpha3();
  clf.control_lo = Vec::Constant(2, -1.0);
  clf.control_hi = Vec::Constant(2, 1.0);
  b.clf = clf;

  InfConvolution ic;
  ic.base = clf;
  ic.beta = beta;
  ic.solver.tol = solver_tol;
  b.inf_conv = ic;

  ControlLawConfig law;
  law.grid_points_per_dim = control_grid;
  law.pivot_at_state = pivot_at_state;
  b.policy = make_inf_conv_policy(ic, b.system, law);

  b.default_x0 = Vec(3);
  b.default_x0 << 1.0, 1.0, 0.5;  // ||x0|| = 1.5
  b.default_r = 0.3;
  b.default_R = 1.5;
  b.default_delta_bar = 0.01;
  return b;
}

}  // namespace shhlab
