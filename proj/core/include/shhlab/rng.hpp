// Copyright 2026 The shhlab Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace shhlab {

/// Deterministic per-path random stream.
///
/// Gaussians come from an explicit Box-Muller transform on top of
/// std::mt19937_64 so the draw sequence is fully pinned by the seed and
/// does not depend on the standard library's distribution internals.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() {
    return (engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal draw.
  double gaussian() {
    ++gaussians_drawn_;
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log() finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// Vector of dim independent N(0, stddev^2) draws.
  Eigen::VectorXd gaussian_vector(int dim, double stddev = 1.0) {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = stddev * gaussian();
    return v;
  }

  std::uint64_t gaussians_drawn() const { return gaussians_drawn_; }

  /// splitmix64 mix of (master, index); decorrelates per-path streams.
  static std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
  std::uint64_t gaussians_drawn_ = 0;
};

}  // namespace shhlab
