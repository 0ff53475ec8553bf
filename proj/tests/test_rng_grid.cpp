// Copyright 2026 The shhlab Authors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "shhlab/halton.hpp"
#include "shhlab/linalg.hpp"
#include "shhlab/rng.hpp"

using namespace shhlab;

TEST_CASE("rng streams are deterministic and decorrelated") {
  RngStream a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const double va = a.gaussian();
    CHECK(va == b.gaussian());
  }
  CHECK(a.gaussian() != c.gaussian());
  CHECK(RngStream::derive_seed(1, 0) != RngStream::derive_seed(1, 1));
  CHECK(RngStream::derive_seed(1, 0) != RngStream::derive_seed(2, 0));
}

TEST_CASE("gaussian draws have the right moments") {
  // mean within 4 standard errors, variance within 1%
  RngStream rng(7);
  const int n = 1'000'000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.gaussian();
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(var == doctest::Approx(1.0).epsilon(0.01));
  CHECK(rng.gaussians_drawn() == n);
}

TEST_CASE("ball grid stays inside and touches the boundary") {
  for (int dim : {1, 2, 3}) {
    const double radius = 2.5;
    const auto pts = ball_grid(dim, radius, 512);
    CHECK(pts.size() >= 512);
    double max_norm = 0.0;
    for (const Vec& p : pts) {
      CHECK(p.size() == dim);
      CHECK(p.norm() <= radius * (1.0 + 1e-12));
      max_norm = std::max(max_norm, p.norm());
    }
    CHECK(max_norm == doctest::Approx(radius));  // shell points present
  }
}

TEST_CASE("annulus grid covers both shells") {
  const auto pts = annulus_grid(3, 1.0, 2.0, 256);
  double lo = 1e9, hi = 0.0;
  for (const Vec& p : pts) {
    CHECK(p.norm() >= 1.0 - 1e-12);
    CHECK(p.norm() <= 2.0 + 1e-12);
    lo = std::min(lo, p.norm());
    hi = std::max(hi, p.norm());
  }
  CHECK(lo == doctest::Approx(1.0));
  CHECK(hi == doctest::Approx(2.0));
}

TEST_CASE("box grid contains all corners") {
  Vec lo(2), hi(2);
  lo << -1.0, -2.0;
  hi << 3.0, 4.0;
  const auto pts = box_grid(lo, hi, 64);
  int corners = 0;
  for (const Vec& p : pts) {
    CHECK(p[0] >= lo[0] - 1e-12);
    CHECK(p[1] <= hi[1] + 1e-12);
    const bool c0 = p[0] == lo[0] || p[0] == hi[0];
    const bool c1 = p[1] == lo[1] || p[1] == hi[1];
    if (c0 && c1) ++corners;
  }
  CHECK(corners >= 4);
}

TEST_CASE("spectral norm matches hand-computed values") {
  Mat m(2, 2);
  m << 3.0, 0.0, 0.0, -5.0;  // indefinite: plain power iteration would stall
  CHECK(spectral_norm(m) == doctest::Approx(5.0).epsilon(1e-10));

  Mat r(2, 3);
  r << 1.0, 0.0, 0.0, 0.0, 2.0, 0.0;
  CHECK(spectral_norm(r) == doctest::Approx(2.0).epsilon(1e-10));

  CHECK(spectral_norm(Mat::Zero(3, 3)) == 0.0);
}

TEST_CASE("scrambled radical inverse is equidistributed enough") {
  // crude star-discrepancy proxy: bin counts over 16 bins within 20%
  for (std::uint32_t base : {2u, 3u, 5u}) {
    int bins[16] = {0};
    const int n = 4096;
    for (int i = 0; i < n; ++i) {
      const double u = scrambled_radical_inverse(base, i);
      CHECK(u >= 0.0);
      CHECK(u < 1.0);
      ++bins[static_cast<int>(u * 16)];
    }
    for (int b : bins) CHECK(std::abs(b - n / 16) < n / 16 * 0.2);
  }
}
