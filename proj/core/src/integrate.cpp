// Copyright 2026 The shhlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "shhlab/integrate.hpp"

#include <cmath>
#include <stdexcept>

#include "shhlab/detail/stepper.hpp"

namespace shhlab {

int SampleHoldConfig::substeps_per_hold() const {
  const double ratio = delta / substep;
  const int n = static_cast<int>(std::lround(ratio));
  if (n < 1 || std::abs(ratio - n) > 1e-9 * ratio) {
    throw std::invalid_argument("delta/substep must be a positive integer");
  }
  return n;
}

int SampleHoldConfig::hold_count() const {
  return static_cast<int>(std::ceil(horizon / delta - 1e-9));
}

void SampleHoldConfig::validate() const {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be > 0");
  if (!(substep > 0.0) || substep > delta * (1.0 + 1e-12)) {
    throw std::invalid_argument("substep must satisfy 0 < h <= delta");
  }
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");
  if (initial_state.size() == 0 || !initial_state.allFinite()) {
    throw std::invalid_argument("initial_state must be set and finite");
  }
  (void)substeps_per_hold();
}

SampleHoldConfig SampleHoldConfig::with_substeps(double delta, int n_sub, double horizon,
                                                 Vec x0) {
  SampleHoldConfig cfg;
  cfg.delta = delta;
  cfg.substep = delta / n_sub;
  cfg.horizon = horizon;
  cfg.initial_state = std::move(x0);
  return cfg;
}

int Trajectory::hold_of_time_index(int j) const {
  if (j <= 0) return 0;
  const int k = (j - 1) / substeps_per_hold;
  return k < static_cast<int>(controls.size()) ? k : static_cast<int>(controls.size()) - 1;
}

const Vec& Trajectory::control_at_time_index(int j) const {
  return controls.at(hold_of_time_index(j));
}

namespace {

struct TrajectoryRecorder {
  Trajectory& out;
  void on_state(int, double t, const Vec& x, const Vec* z) {
    out.times.push_back(t);
    out.states.push_back(x);
    if (z) out.noise_states.push_back(*z);
  }
  void on_control(int, const Vec& u) { out.controls.push_back(u); }
};

}  // namespace

Vec integrate_hold_interval(const ControlledSde& system, const Vec& x_start,
                            const Vec& u_held, double delta, double substep,
                            RngStream& rng, double guard, double t_offset) {
  if (!u_held.allFinite()) throw std::invalid_argument("u_held must be finite");
  SampleHoldConfig cfg;
  cfg.delta = delta;
  cfg.substep = substep;
  cfg.horizon = delta;
  cfg.initial_state = x_start;
  cfg.validate();
  const int n_sub = cfg.substeps_per_hold();
  if (guard < 0.0) guard = divergence_guard(x_start);

  Vec x = x_start;
  for (int s = 0; s < n_sub; ++s) {
    const Vec dw = rng.gaussian_vector(system.noise_dim, std::sqrt(substep));
    x += system.drift(x, u_held) * substep + system.diffusion(x, u_held) * dw;
    detail::check_state(x, t_offset + (s + 1) * substep, guard);
  }
  return x;
}

Trajectory simulate_sample_hold(const ControlledSde& system, const MarkovPolicy& policy,
                                const SampleHoldConfig& config, RngStream& rng) {
  Trajectory traj;
  traj.delta = config.delta;
  traj.substep = config.substep;
  traj.substeps_per_hold = config.substeps_per_hold();
  const std::size_t total = static_cast<std::size_t>(config.hold_count()) *
                                traj.substeps_per_hold + 1;
  traj.times.reserve(total);
  traj.states.reserve(total);
  TrajectoryRecorder rec{traj};
  detail::run_sample_hold(system, policy, config, rng, rec);
  return traj;
}

Trajectory simulate_augmented(const AugmentedSde& system, const MarkovPolicy& policy,
                              const SampleHoldConfig& config, RngStream& rng) {
  Trajectory traj;
  traj.delta = config.delta;
  traj.substep = config.substep;
  traj.substeps_per_hold = config.substeps_per_hold();
  const std::size_t total = static_cast<std::size_t>(config.hold_count()) *
                                traj.substeps_per_hold + 1;
  traj.times.reserve(total);
  traj.states.reserve(total);
  traj.noise_states.reserve(total);
  TrajectoryRecorder rec{traj};
  detail::run_augmented(system, policy, config, rng, rec, traj.safeguard);
  return traj;
}

}  // namespace shhlab
