// Copyright 2026 The shhlab Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace shhlab {

/// Class-K-infinity comparison function with its inverse.
struct KInfFunction {
  std::function<double(double)> forward;
  std::function<double(double)> inverse;

  double operator()(double s) const { return forward(s); }
  double inv(double y) const { return inverse(y); }

  /// c * s^p with the closed-form inverse.
  static KInfFunction power(double c, double p) {
    if (!(c > 0.0) || !(p > 0.0)) {
      throw std::invalid_argument("KInfFunction::power needs c > 0, p > 0");
    }
    return KInfFunction{
        [c, p](double s) { return c * std::pow(s, p); },
        [c, p](double y) { return std::pow(y / c, 1.0 / p); }};
  }

  /// Wraps a forward map with a bisection inverse on [0, upper-expansion).
  static KInfFunction from_forward(std::function<double(double)> f) {
    auto inv = [f](double y) {
      if (y <= 0.0) return 0.0;
      double hi = 1.0;
      while (f(hi) < y && hi < 1e18) hi *= 2.0;
      double lo = 0.0;
      for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < y ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    };
    return KInfFunction{std::move(f), std::move(inv)};
  }

  /// Checks f(0)=0, strict increase on a sampled grid, and f(inv(y))=y.
  void validate(double s_max, int samples = 64, double tol = 1e-9) const {
    if (std::abs(forward(0.0)) > tol) {
      throw std::invalid_argument("comparison function: forward(0) != 0");
    }
    double prev = 0.0;
    for (int i = 1; i <= samples; ++i) {
      const double s = s_max * i / samples;
      const double v = forward(s);
      if (!(v > prev)) {
        throw std::invalid_argument("comparison function not strictly increasing near s=" +
                                    std::to_string(s));
      }
      prev = v;
      const double roundtrip = forward(inverse(v));
      if (std::abs(roundtrip - v) > tol * std::max(1.0, std::abs(v))) {
        throw std::invalid_argument("comparison function inverse mismatch at s=" +
                                    std::to_string(s));
      }
    }
  }
};

}  // namespace shhlab
