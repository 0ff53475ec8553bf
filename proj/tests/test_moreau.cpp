// Copyright 2026 The shhlab Authors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "shhlab/bench_systems.hpp"
#include "shhlab/integrate.hpp"
#include "shhlab/moreau.hpp"
#include "support.hpp"

using namespace shhlab;
using namespace shhlab::testing;

namespace {

Vec vec1(double v) {
  Vec x(1);
  x[0] = v;
  return x;
}

Vec vec3(double a, double b, double c) {
  Vec x(3);
  x << a, b, c;
  return x;
}

InfConvolution quadratic_ic(double beta, double tol = 1e-12) {
  NonsmoothClf clf;
  clf.state_dim = 1;
  clf.value = [](const Vec& x) { return x.squaredNorm(); };
  clf.alpha3 = KInfFunction::power(1.0, 2.0);
  clf.control_lo = vec1(-1.0);
  clf.control_hi = vec1(1.0);
  InfConvolution ic;
  ic.base = clf;
  ic.beta = beta;
  ic.solver.tol = tol;
  ic.solver.max_iter = 50000;
  return ic;
}

InfConvolution robot_ic(double beta, double tol = 1e-10) {
  const auto bench = nonholonomic_benchmark(NoiseModel::tsb(1.0, 0.0), 0.1, beta);
  InfConvolution ic = *bench.inf_conv;
  ic.solver.tol = tol;
  ic.solver.max_iter = 50000;
  return ic;
}

// analytic gradient of the robot CLF away from {x3 = 0} and {x1 = x2 = 0}
Vec robot_clf_gradient(const Vec& x) {
  const double r12 = std::sqrt(x[0] * x[0] + x[1] * x[1]);
  const double s3 = x[2] > 0 ? 1.0 : -1.0;
  Vec g(3);
  g[0] = 2.0 * x[0] - 2.0 * std::abs(x[2]) * x[0] / r12;
  g[1] = 2.0 * x[1] - 2.0 * std::abs(x[2]) * x[1] / r12;
  g[2] = 4.0 * x[2] - 2.0 * s3 * r12;
  return g;
}

}  // namespace

TEST_CASE("quadratic closed form: value, minimizer, subgradient") {
  // L = y^2: L_beta(x) = x^2/(1+2b^2), y_beta = x/(1+2b^2), v = 2x/(1+2b^2)
  for (double beta : {0.5, 0.1}) {
    const auto ic = quadratic_ic(beta);
    const double denom = 1.0 + 2.0 * beta * beta;
    for (double x : {-4.2, -1.0, 0.3, 2.5}) {
      const auto res = inf_conv_value(ic, vec1(x));
      CHECK(res.value == doctest::Approx(x * x / denom).epsilon(1e-10));
      CHECK(res.minimizer[0] == doctest::Approx(x / denom).epsilon(1e-9));
      const Vec v = proximal_subgradient_from(ic, vec1(x), res.minimizer);
      CHECK(v[0] == doctest::Approx(2.0 * x / denom).epsilon(1e-8));
    }
  }
}

TEST_CASE("the origin is a fixed point for coercive L with L(0) = 0") {
  const auto ic = quadratic_ic(0.3);
  const auto res = inf_conv_value(ic, vec1(0.0));
  CHECK(res.value == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::abs(res.minimizer[0]) < 1e-9);
  CHECK(proximal_subgradient(ic, vec1(0.0)).norm() < 1e-6);
}

TEST_CASE("envelope property and monotonicity in beta") {
  const auto ic_large = robot_ic(0.5);
  const auto ic_mid = robot_ic(0.25);
  const auto ic_small = robot_ic(0.125);
  RngStream rng(3);
  for (int i = 0; i < 12; ++i) {
    const Vec x = rng.gaussian_vector(3, 1.0);
    const double l = nonholonomic_clf(x);
    const double l_large = inf_conv_value(ic_large, x).value;
    const double l_mid = inf_conv_value(ic_mid, x).value;
    const double l_small = inf_conv_value(ic_small, x).value;
    CHECK(l_large <= l + 1e-9);
    CHECK(l_mid <= l + 1e-9);
    CHECK(l_small <= l + 1e-9);
    // larger beta penalizes distance less: L_{b1}(x) >= L_{b2}(x) for b1 < b2
    CHECK(l_small >= l_mid - 1e-9);
    CHECK(l_mid >= l_large - 1e-9);
    // envelope converges up to L as beta -> 0
    CHECK(l - l_small <= (l - l_large) + 1e-9);
  }
}

TEST_CASE("proximal subgradient certificate on sampled points") {
  const auto ic = robot_ic(0.2);
  const double half_inv_b2 = 0.5 / (ic.beta * ic.beta);
  RngStream rng(5);
  for (int i = 0; i < 5; ++i) {
    const Vec x = rng.gaussian_vector(3, 1.2);
    const auto res = inf_conv_value(ic, x);
    const Vec v = proximal_subgradient_from(ic, x, res.minimizer);
    const double l_at_min = ic.base.value(res.minimizer);
    for (int k = 0; k < 1000; ++k) {
      const Vec y = rng.gaussian_vector(3, 1.5);
      const double lhs = ic.base.value(y);
      const double rhs = l_at_min + v.dot(y - res.minimizer) -
                         half_inv_b2 * (y - res.minimizer).squaredNorm();
      CHECK(lhs >= rhs - 1e-8);
    }
  }
}

TEST_CASE("subgradient matches the gradient at smooth points as beta -> 0") {
  RngStream rng(7);
  int checked = 0;
  for (int i = 0; i < 40 && checked < 20; ++i) {
    Vec x = rng.gaussian_vector(3, 1.0);
    const double r12 = std::sqrt(x[0] * x[0] + x[1] * x[1]);
    if (r12 < 0.4 || std::abs(x[2]) < 0.4) continue;  // stay off the singular sets
    ++checked;
    const Vec g = robot_clf_gradient(x);
    const Vec g_fd = fd_gradient(nonholonomic_clf, x);
    CHECK((g - g_fd).norm() < 1e-6 * std::max(1.0, g.norm()));

    const double err_big = (proximal_subgradient(robot_ic(0.2), x) - g).norm();
    const double err_small = (proximal_subgradient(robot_ic(0.05), x) - g).norm();
    CHECK(err_small <= err_big + 1e-9);
    CHECK(err_small < 0.05 * std::max(1.0, g.norm()));
  }
  CHECK(checked == 20);
}

TEST_CASE("control argmin on a box: vertex solutions and ties") {
  ControlledSde integrator;
  integrator.state_dim = 2;
  integrator.control_dim = 2;
  integrator.noise_dim = 2;
  integrator.drift = [](const Vec&, const Vec& u) -> Vec { return u; };
  integrator.diffusion = [](const Vec&, const Vec&) -> Mat { return Mat::Zero(2, 2); };

  Vec lo = Vec::Constant(2, -1.0), hi = Vec::Constant(2, 1.0);
  Vec v(2);
  v << 2.0, 0.0;
  Vec pivot = Vec::Zero(2);
  const Vec u = control_argmin(integrator, v, pivot, lo, hi, 41);
  CHECK(u[0] == doctest::Approx(-1.0));
  CHECK(u[1] == doctest::Approx(-1.0));  // tied coordinate resolves lexicographically

  // positive scaling of the objective leaves the argmin unchanged
  for (double c : {0.5, 3.0, 117.0}) {
    const Vec u_scaled = control_argmin(integrator, c * v, pivot, lo, hi, 41);
    CHECK(u_scaled == u);
  }
}

TEST_CASE("control law matches an exhaustive 201x201 oracle on the robot") {
  const auto bench = nonholonomic_benchmark(NoiseModel::tsb(1.0, 0.0), 0.1, 0.1, 201);
  const auto& sys = bench.system;
  InfConvolution ic = *bench.inf_conv;
  ControlLawConfig law;
  law.grid_points_per_dim = 201;

  RngStream rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const Vec x = trial == 0 ? vec3(1.0, 0.0, 0.0) : Vec(rng.gaussian_vector(3, 1.0));
    const Vec v = proximal_subgradient(ic, x);

    // independent oracle: raw double loop over the same grid
    auto oracle = [&](const Vec& pivot) {
      double best = std::numeric_limits<double>::infinity();
      Vec bu(2);
      for (int i = 0; i < 201; ++i) {
        for (int j = 0; j < 201; ++j) {
          Vec uu(2);
          uu << -1.0 + 2.0 * i / 200.0, -1.0 + 2.0 * j / 200.0;
          const double val = v.dot(sys.drift(pivot, uu));
          if (val < best) {
            best = val;
            bu = uu;
          }
        }
      }
      return bu;
    };

    law.pivot_at_state = false;  // literal pivot at v_beta
    CHECK(inf_conv_control(ic, sys, x, law) == oracle(v));
    law.pivot_at_state = true;  // state pivot
    CHECK(inf_conv_control(ic, sys, x, law) == oracle(x));
  }
}

TEST_CASE("non-smooth Taylor inequality") {
  SUBCASE("eps = 0 gives a zero residual exactly") {
    const auto ic = quadratic_ic(0.3, 1e-10);
    CHECK(nonsmooth_taylor_residual(ic, vec1(1.3), vec1(0.7), 0.0) == 0.0);
  }
  SUBCASE("quadratic case is nonnegative to high precision") {
    const auto ic = quadratic_ic(0.25);
    RngStream rng(11);
    for (int i = 0; i < 50; ++i) {
      const double x = 3.0 * rng.gaussian();
      const double y = 2.0 * rng.gaussian();
      const double eps = 0.5 * std::abs(rng.gaussian());
      CHECK(nonsmooth_taylor_residual(ic, vec1(x), vec1(y), eps) >= -1e-9);
    }
  }
  SUBCASE("robot CLF residuals are nonnegative at solver tolerance") {
    const auto ic = robot_ic(0.15);
    RngStream rng(13);
    for (int i = 0; i < 200; ++i) {
      const Vec x = rng.gaussian_vector(3, 1.0);
      const Vec y = rng.gaussian_vector(3, 0.7);
      const double eps = 0.4 * std::abs(rng.gaussian());
      CHECK(nonsmooth_taylor_residual(ic, x, y, eps) >= -1e-6);
    }
  }
}

TEST_CASE("solver failure carries the best iterate") {
  auto ic = quadratic_ic(0.3);
  ic.solver.max_iter = 0;  // cannot contract the mesh at all
  try {
    inf_conv_value(ic, vec1(2.0));
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(e.best.size() == 1);
    CHECK(e.residual > ic.solver.tol);
  }
}

TEST_CASE("sampled decay decomposition") {
  const auto bench = nonholonomic_benchmark(NoiseModel::tsb(1.0, 0.0), 0.1, 0.1);
  const InfConvolution& ic = *bench.inf_conv;

  SUBCASE("quadrature reconstructs the realized increment exactly") {
    AugmentedSde aug = bench.augmented();
    SampleHoldConfig cfg = SampleHoldConfig::with_substeps(0.05, 16, 0.5, vec3(1, 1, 0.5));
    RngStream rng(17);
    const Trajectory traj = simulate_augmented(aug, bench.policy, cfg, rng);
    for (int k : {0, 3, 7}) {
      const auto d = sampled_decay_decomposition(ic, aug, traj, k);
      const Vec inc = traj.states[(k + 1) * 16] - traj.states[k * 16];
      CHECK((d.phi + d.sigma - inc).norm() < 1e-12);
      // pathwise envelope inequality
      CHECK(d.lhs <= d.rhs_total() + 1e-8);
    }
  }

  SUBCASE("frozen noise zeroes the noise term exactly") {
    AugmentedSde aug = bench.augmented();
    aug.noise = NoiseModel::frozen();
    SampleHoldConfig cfg = SampleHoldConfig::with_substeps(0.05, 16, 0.2, vec3(1, 1, 0.5));
    RngStream rng(19);
    const Trajectory traj = simulate_augmented(aug, bench.policy, cfg, rng);
    const auto d = sampled_decay_decomposition(ic, aug, traj, 1);
    CHECK(d.sigma.norm() == 0.0);
    CHECK(d.noise_term == 0.0);
  }

  SUBCASE("drift remainder shrinks at second order in the hold length") {
    // frozen noise: deterministic path, remainder = O(delta^2)
    AugmentedSde aug = bench.augmented();
    aug.noise = NoiseModel::frozen();
    auto remainder_at = [&](double delta) {
      SampleHoldConfig cfg =
          SampleHoldConfig::with_substeps(delta, 16, delta, vec3(1, 1, 0.5));
      RngStream rng(23);
      const Trajectory traj = simulate_augmented(aug, bench.policy, cfg, rng);
      return sampled_decay_decomposition(ic, aug, traj, 0).phi_remainder_norm;
    };
    const double r1 = remainder_at(0.2);
    const double r2 = remainder_at(0.1);
    const double r4 = remainder_at(0.05);
    CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.3));
    CHECK(r2 / r4 == doctest::Approx(4.0).epsilon(0.3));
  }
}
