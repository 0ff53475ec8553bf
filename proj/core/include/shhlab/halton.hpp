// Copyright 2026 The shhlab Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "shhlab/linalg.hpp"

namespace shhlab {

/// Radical inverse in the given prime base with a deterministic digit
/// scramble (multiplicative permutation), the usual fix for the diagonal
/// correlation of plain Halton points in higher bases.
inline double scrambled_radical_inverse(std::uint32_t base, std::uint64_t index) {
  // digit -> (a * digit) mod base; the bases are prime, so any nonzero a is a
  // permutation that fixes 0 and keeps the van der Corput structure intact
  const std::uint64_t mult = (base <= 3) ? 1 : (base + 1) / 2;
  double inv_base = 1.0 / base;
  double factor = inv_base;
  double value = 0.0;
  std::uint64_t i = index + 1;  // skip the all-zero point
  while (i > 0) {
    const std::uint64_t digit = i % base;
    value += (mult * digit) % base * factor;
    i /= base;
    factor *= inv_base;
  }
  return value < 1.0 ? value : std::nextafter(1.0, 0.0);
}

namespace detail {

constexpr std::uint32_t kHaltonBases[8] = {2, 3, 5, 7, 11, 13, 17, 19};

/// Acklam's rational approximation of the standard normal quantile.
inline double inverse_normal_cdf(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  if (p <= 0.0) return -37.0;
  if (p >= 1.0) return 37.0;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

/// Unit direction in R^dim from Halton coordinates offset..offset+dim-1.
inline Vec halton_direction(int dim, std::uint64_t index, int offset) {
  Vec g(dim);
  for (int j = 0; j < dim; ++j) {
    const double u = scrambled_radical_inverse(kHaltonBases[(offset + j) % 8], index);
    g[j] = inverse_normal_cdf(u);
  }
  const double n = g.norm();
  if (n < 1e-12) {
    g.setZero();
    g[0] = 1.0;
    return g;
  }
  return g / n;
}

}  // namespace detail

/// Low-discrepancy points covering the closed ball B_radius.
///
/// Every fourth point sits exactly on the boundary sphere and the 2*dim
/// axis extremes are always included, so radially monotone suprema (the
/// common case for the Theorem-1 constants) are attained exactly.
inline std::vector<Vec> ball_grid(int dim, double radius, int count) {
  std::vector<Vec> pts;
  pts.reserve(static_cast<std::size_t>(count) + 2 * dim + 1);
  pts.push_back(Vec::Zero(dim));
  for (int i = 0; i < dim; ++i) {
    Vec e = Vec::Zero(dim);
    e[i] = radius;
    pts.push_back(e);
    pts.push_back(-e);
  }
  for (std::uint64_t k = 0; pts.size() < static_cast<std::size_t>(count) + 2 * dim + 1; ++k) {
    const double u = scrambled_radical_inverse(2, k);
    const bool shell = (k % 4 == 0);
    const double rho = shell ? radius : radius * std::pow(u, 1.0 / dim);
    if (dim == 1) {
      Vec x(1);
      x[0] = shell ? (k % 8 == 0 ? radius : -radius) : radius * (2.0 * u - 1.0);
      pts.push_back(x);
    } else {
      pts.push_back(rho * detail::halton_direction(dim, k, 1));
    }
  }
  return pts;
}

/// Points on the sphere of the given radius, axis extremes included.
inline std::vector<Vec> sphere_grid(int dim, double radius, int count) {
  std::vector<Vec> pts;
  pts.reserve(static_cast<std::size_t>(count) + 2 * dim);
  for (int i = 0; i < dim; ++i) {
    Vec e = Vec::Zero(dim);
    e[i] = radius;
    pts.push_back(e);
    pts.push_back(-e);
  }
  if (dim == 1) return pts;
  for (std::uint64_t k = 0; pts.size() < static_cast<std::size_t>(count) + 2 * dim; ++k) {
    pts.push_back(radius * detail::halton_direction(dim, k, 0));
  }
  return pts;
}

/// Points covering the closed annulus r_in <= ||x|| <= r_out, shells included.
inline std::vector<Vec> annulus_grid(int dim, double r_in, double r_out, int count) {
  std::vector<Vec> pts;
  pts.reserve(static_cast<std::size_t>(count) + 4 * dim);
  for (int i = 0; i < dim; ++i) {
    for (double rr : {r_in, r_out}) {
      Vec e = Vec::Zero(dim);
      e[i] = rr;
      pts.push_back(e);
      pts.push_back(-e);
    }
  }
  for (std::uint64_t k = 0; pts.size() < static_cast<std::size_t>(count) + 4 * dim; ++k) {
    const double u = scrambled_radical_inverse(2, k);
    double rho = r_in + u * (r_out - r_in);
    if (k % 8 == 0) rho = r_in;
    if (k % 8 == 4) rho = r_out;
    if (dim == 1) {
      Vec x(1);
      x[0] = (k % 2 == 0) ? rho : -rho;
      pts.push_back(x);
    } else {
      pts.push_back(rho * detail::halton_direction(dim, k, 1));
    }
  }
  return pts;
}

/// Points covering an axis-aligned box, corners and center included.
inline std::vector<Vec> box_grid(const Vec& lo, const Vec& hi, int count) {
  const int dim = static_cast<int>(lo.size());
  std::vector<Vec> pts;
  pts.push_back(0.5 * (lo + hi));
  if (dim <= 16) {
    for (std::uint64_t mask = 0; mask < (1ULL << dim); ++mask) {
      Vec c(dim);
      for (int i = 0; i < dim; ++i) c[i] = (mask >> i) & 1 ? hi[i] : lo[i];
      pts.push_back(c);
    }
  }
  for (std::uint64_t k = 0; pts.size() < static_cast<std::size_t>(count); ++k) {
    Vec x(dim);
    for (int i = 0; i < dim; ++i) {
      const double u = scrambled_radical_inverse(detail::kHaltonBases[i % 8], k);
      x[i] = lo[i] + u * (hi[i] - lo[i]);
    }
    pts.push_back(x);
  }
  return pts;
}

}  // namespace shhlab
