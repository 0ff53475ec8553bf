// Copyright 2026 The shhlab Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include "shhlab/linalg.hpp"
#include "shhlab/rng.hpp"

namespace shhlab {

enum class NoiseTag { brownian, sine_wiener, dcl, tsb, ks, frozen };

std::string to_string(NoiseTag tag);
NoiseTag noise_tag_from_string(const std::string& name);

/// Width of the reflection band at the +-1 boundaries.
inline constexpr double kBoundaryEps = 1e-9;

/// Counts how often the post-step reflection into (-1, 1) fired.
struct SafeguardStats {
  long long reflections = 0;
  long long steps = 0;
  double rate() const { return steps > 0 ? static_cast<double>(reflections) / steps : 0.0; }
};

/// Tagged description of the driving process.
///
/// The SDE-based bounded models (DCL, TSB, KS) expose their component-wise
/// drift/diffusion coefficients; sine-Wiener is a memoryless transform of a
/// Brownian path and is stepped through BoundedNoiseState instead.
struct NoiseModel {
  NoiseTag tag = NoiseTag::brownian;
  double tau_a = 1.0;  // sine_wiener
  double gamma = 0.0;  // dcl (> -1), ks (>= 0)
  double theta = 1.0;  // dcl, tsb, ks (> 0)
  double q = 0.0;      // tsb (< 1)

  static NoiseModel brownian();
  static NoiseModel sine_wiener(double tau_a);
  static NoiseModel dcl(double gamma, double theta);
  static NoiseModel tsb(double theta, double q);
  static NoiseModel ks(double theta, double gamma);
  /// zeta = eta = 0: the noise state stays at Z0 = 0 (noiseless plant limit).
  static NoiseModel frozen();

  bool bounded() const { return tag != NoiseTag::brownian; }
  /// KS exponent (2*gamma + 1) / (gamma + 1).
  double vartheta() const;

  /// Component-wise drift of the internal SDE (DCL/TSB/KS only).
  double drift(double z) const;
  /// Component-wise diffusion of the internal SDE (DCL/TSB/KS only).
  double diffusion(double z) const;
};

/// d independent Gaussian increments, mean 0, variance h.
Vec brownian_increment(int dim, double h, RngStream& rng);

/// Z = sin(sqrt(2/tau_a) * b), always in [-1, 1].
double sine_wiener_value(double b, double tau_a);

// One Euler step of the scalar bounded models. The _xi variants take the
// standard normal draw explicitly (used by replay/symmetry tests); the
// RngStream variants draw it. Post-step state is reflected into
// (-1 + kBoundaryEps, 1 - kBoundaryEps) and reflections are counted.
double dcl_step(double z, double h, double gamma, double theta, RngStream& rng,
                SafeguardStats* stats = nullptr);
double dcl_step_xi(double z, double h, double gamma, double theta, double xi,
                   SafeguardStats* stats = nullptr);
double tsb_step(double z, double h, double theta, double q, RngStream& rng,
                SafeguardStats* stats = nullptr);
double tsb_step_xi(double z, double h, double theta, double q, double xi,
                   SafeguardStats* stats = nullptr);
double ks_step(double z, double h, double theta, double gamma, RngStream& rng,
               SafeguardStats* stats = nullptr);
double ks_step_xi(double z, double h, double theta, double gamma, double xi,
                  SafeguardStats* stats = nullptr);

/// Multi-component bounded noise path state; d independent scalar copies.
class BoundedNoiseState {
 public:
  BoundedNoiseState(const NoiseModel& model, int dim);

  /// Current Z value, component-wise in (-1, 1).
  const Vec& value() const { return value_; }

  /// Advance by one substep of length h.
  void step(double h, RngStream& rng, SafeguardStats& stats);

 private:
  NoiseModel model_;
  Vec state_;  // the SDE state, or the underlying Brownian path for sine-Wiener
  Vec value_;
};

}  // namespace shhlab
