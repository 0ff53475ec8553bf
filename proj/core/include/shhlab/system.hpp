// Copyright 2026 The shhlab Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "shhlab/linalg.hpp"
#include "shhlab/noise.hpp"

namespace shhlab {

/// The plant: dX = f(X,U) dt + sigma(X,U) dB.
struct ControlledSde {
  int state_dim = 0;
  int control_dim = 0;
  int noise_dim = 0;
  std::function<Vec(const Vec&, const Vec&)> drift;      // R^n x R^m -> R^n
  std::function<Mat(const Vec&, const Vec&)> diffusion;  // R^n x R^m -> R^{n x d}
};

/// Plant driven multiplicatively by a bounded noise state:
///   dX = f(X,U) dt + sigma(X,U) Z dt,   dZ = zeta(Z) dt + eta(Z) dB.
/// zeta/eta live on the NoiseModel (component-wise scalar SDE).
struct AugmentedSde {
  ControlledSde plant;
  NoiseModel noise;
};

/// State feedback law, applied at sampling instants only.
struct MarkovPolicy {
  std::function<Vec(const Vec&)> map;
  std::optional<double> control_bound;  // ||mu(x)|| <= bound on a stated ball
};

/// Sample-and-hold run geometry. The hold interval delta must be an integer
/// number of integrator substeps h; the horizon is rounded up to whole holds.
struct SampleHoldConfig {
  double delta = 0.1;
  double substep = 0.1 / 16;
  double horizon = 1.0;
  Vec initial_state;

  int substeps_per_hold() const;
  int hold_count() const;  // ceil(horizon / delta)
  void validate() const;

  static SampleHoldConfig with_substeps(double delta, int n_sub, double horizon, Vec x0);
};

/// Sample path recorded at every substep; control per hold interval.
struct Trajectory {
  double delta = 0.0;
  double substep = 0.0;
  int substeps_per_hold = 0;
  std::vector<double> times;   // size S+1
  std::vector<Vec> states;     // size S+1
  std::vector<Vec> controls;   // size K (one per hold)
  std::vector<Vec> noise_states;  // size S+1 for augmented runs, empty otherwise
  SafeguardStats safeguard;

  int hold_of_time_index(int j) const;
  const Vec& control_at_time_index(int j) const;
};

/// Thrown when a path blows up; carries the time of the first bad state.
class IntegrationDivergedError : public std::runtime_error {
 public:
  IntegrationDivergedError(double t, double norm)
      : std::runtime_error("integration diverged at t=" + std::to_string(t) +
                           " (||x||=" + std::to_string(norm) + ")"),
        time(t),
        state_norm(norm) {}
  double time;
  double state_norm;
};

/// Default blow-up threshold relative to the start state.
inline double divergence_guard(const Vec& x0) {
  return 1e6 * std::max(1.0, x0.norm());
}

}  // namespace shhlab
