// Copyright 2026 The shhlab Authors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "shhlab/bench_systems.hpp"
#include "shhlab/halton.hpp"
#include "shhlab/settings.hpp"
#include "support.hpp"

using namespace shhlab;
using namespace shhlab::testing;

TEST_CASE("closed-form ledger for the quadratic pair") {
  // a = k = 0.5 gives the closed loop -x with alpha3 = 2 s^2
  const auto bench = ou_benchmark(1, 0.5, 0.0, 0.5);
  const auto p = compute_settings(*bench.pair, bench.system, 1.0, 2.0);

  CHECK(p.L_bar == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(p.R_star == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(p.l_star == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.r_star == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(p.u_bar == doctest::Approx(1.0).epsilon(1e-12));   // |0.5 x| on B_2
  CHECK(p.f_bar == doctest::Approx(2.0).epsilon(1e-12));   // |-x/2| + |u| at extremes
  CHECK(p.sigma_sup == 0.0);
  CHECK(p.L_grad_bar == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(p.L_hess_bar == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(p.Sigma_bar == 0.0);
  CHECK(p.r_tilde == 0.0);
  CHECK(p.branch == CoreBranch::tilde_below_core);
  CHECK(p.rho == 0.0);
  // noiseless degenerate: alpha3 infimum sits at the core radius
  CHECK(p.alpha3_bar_net == doctest::Approx(2.0 * 0.5).epsilon(1e-9));
  CHECK(p.alpha3_bar_paper == p.alpha3_bar_net);  // Sigma_bar = 0
  CHECK(p.delta_bar > 0.0);
  CHECK(p.delta_bar == std::min(p.delta1, p.delta2));
}

TEST_CASE("noise floor branch: r_tilde at or above the core radius") {
  // sigma0 = 1 in 1D: Sigma_bar = 1; alpha3 = 2 s^2 so r_tilde = 1/sqrt(2) = r*
  const auto bench = ou_benchmark(1, 0.5, 1.0, 0.5);
  const auto p = compute_settings(*bench.pair, bench.system, 1.0, 2.0);
  const double expected_r_tilde = std::sqrt(0.5);
  CHECK(p.r_tilde == doctest::Approx(expected_r_tilde).epsilon(1e-9));
  CHECK(p.branch == CoreBranch::tilde_at_least_core);
  CHECK(p.core_radius == doctest::Approx(expected_r_tilde + 0.1).epsilon(1e-9));
  CHECK(p.rho == doctest::Approx(expected_r_tilde).epsilon(1e-9));
  CHECK(p.target_radius() == doctest::Approx(std::max(1.0, p.rho)));
  CHECK(p.alpha3_bar_net > 0.0);  // the inflated core restores a positive rate
}

TEST_CASE("infeasible settings carry a witness") {
  // decay passes (huge offset) but the annulus is empty: r_tilde >> R*
  const auto bench = ou_benchmark(1, 0.5, 1.0, 0.5);
  auto pair = *bench.pair;
  pair.alpha3 = KInfFunction::power(1e-3, 2.0);
  try {
    compute_settings(pair, bench.system, 1.0, 2.0);
    FAIL("expected InfeasibleSettingsError");
  } catch (const InfeasibleSettingsError& e) {
    CHECK(e.witness.size() == 1);
    CHECK(e.witness[0] > 2.0);  // the offending core radius is outside B_R*
  }
}

TEST_CASE("precondition failures are rejected") {
  const auto bench = ou_benchmark(1, 0.5, 0.0, 0.5);
  auto pair = *bench.pair;
  pair.alpha1 = KInfFunction::power(2.0, 2.0);  // violates PD
  CHECK_THROWS_AS(compute_settings(pair, bench.system, 1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(compute_settings(*bench.pair, bench.system, 2.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("delta bound arithmetic") {
  StabilizationParameters p;
  p.alpha3_bar_net = 1.0;
  p.f_bar = 1.0;
  p.bracket_C = 1.0;
  p.core_level = 0.5;  // l* = 1
  p.lip_L = 4.0;
  const auto db = delta_bound(p);
  CHECK(db.delta1 == doctest::Approx(0.5));
  CHECK(db.delta2 == doctest::Approx(1.0 / 16.0));
  CHECK(db.delta_bar == doctest::Approx(1.0 / 16.0));

  p.f_bar = 0.0;
  CHECK(std::isinf(delta_bound(p).delta_bar));
}

TEST_CASE("reaching time bound arithmetic") {
  StabilizationParameters p;
  p.L_bar = 4.0;
  p.core_level = 0.5;  // l* = 1
  p.alpha3_bar_net = 0.5;
  CHECK(reaching_time_bound(p) == doctest::Approx(13.0));
  p.L_bar = 1.0;
  CHECK(reaching_time_bound(p) == doctest::Approx(1.0));
  p.alpha3_bar_net = 0.0;
  CHECK_THROWS_AS(reaching_time_bound(p), std::invalid_argument);
}

TEST_CASE("doob confidence bound") {
  StabilizationParameters p;
  p.R_star = 2.0;
  CHECK(doob_confidence(p, 20.0).probability == doctest::Approx(0.9));
  CHECK_FALSE(doob_confidence(p, 20.0).vacuous);
  CHECK(doob_confidence(p, 4.0).probability == doctest::Approx(0.5));
  const auto vac = doob_confidence(p, 1.0);
  CHECK(vac.vacuous);
  CHECK(vac.probability <= 0.0);
}

TEST_CASE("monotonicity in the starting radius") {
  const auto bench = ou_benchmark(1, 1.0, 0.1, 1.0);
  const auto p2 = compute_settings(*bench.pair, bench.system, 0.5, 2.0);
  const auto p3 = compute_settings(*bench.pair, bench.system, 0.5, 3.0);
  CHECK(p3.L_bar >= p2.L_bar);
  CHECK(p3.R_star >= p2.R_star);
  CHECK(p3.f_bar >= p2.f_bar);
  CHECK(p3.sigma_sup >= p2.sigma_sup);
  CHECK(p3.delta_bar <= p2.delta_bar);
}

TEST_CASE("level-set implication chains") {
  const auto bench = ou_benchmark(2, 1.0, 0.1, 0.5);
  const auto p = compute_settings(*bench.pair, bench.system, 0.5, 2.0);
  const auto& pair = *bench.pair;
  int checked_in = 0, checked_out = 0;
  for (const Vec& x : ball_grid(2, 1.5 * p.R_star, 10000)) {
    if (pair.value(x) <= p.L_bar) {
      CHECK(x.norm() <= p.R_star + 1e-9);
      ++checked_in;
    }
    if (pair.value(x) >= 0.5 * p.l_star) {
      CHECK(x.norm() >= p.r_star - 1e-9);
      ++checked_out;
    }
  }
  CHECK(checked_in > 1000);
  CHECK(checked_out > 1000);
}

TEST_CASE("ledger report lists every constant") {
  const auto bench = ou_benchmark(1, 0.5, 0.1, 0.5);
  const auto p = compute_settings(*bench.pair, bench.system, 0.5, 2.0);
  const std::string report = p.report();
  for (const char* key : {"L_bar", "R_star", "delta_bar", "T_bound", "alpha3_bar_net",
                          "branch", "r_tilde", "bracket_C"}) {
    CHECK(report.find(key) != std::string::npos);
  }
}
