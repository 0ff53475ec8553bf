// Copyright 2026 The shhlab Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>

#include "shhlab/rng.hpp"
#include "shhlab/system.hpp"

namespace shhlab::detail {

// Shared stepping core. A Recorder receives every substep state (and, for
// augmented runs, the noise state) plus each held control; the trajectory
// builder and the streaming ensemble statistics both sit on top of it.
//
// Recorder interface:
//   void on_state(int j, double t, const Vec& x, const Vec* z);  // j = 0..S
//   void on_control(int k, const Vec& u);                        // k = 0..K-1

inline void check_state(const Vec& x, double t, double guard) {
  if (!x.allFinite() || x.norm() > guard) {
    throw IntegrationDivergedError(t, x.allFinite() ? x.norm() : std::nan(""));
  }
}

inline Vec eval_policy(const MarkovPolicy& policy, const Vec& x, int control_dim) {
  Vec u = policy.map(x);
  if (u.size() != control_dim) {
    throw std::invalid_argument("policy returned control of wrong dimension");
  }
  if (!u.allFinite()) {
    throw std::invalid_argument("policy returned non-finite control");
  }
  return u;
}

template <class Recorder>
void run_sample_hold(const ControlledSde& sys, const MarkovPolicy& policy,
                     const SampleHoldConfig& cfg, RngStream& rng, Recorder& rec) {
  cfg.validate();
  const int n_sub = cfg.substeps_per_hold();
  const int holds = cfg.hold_count();
  const double h = cfg.substep;
  const double guard = divergence_guard(cfg.initial_state);

  Vec x = cfg.initial_state;
  rec.on_state(0, 0.0, x, nullptr);
  int j = 0;
  for (int k = 0; k < holds; ++k) {
    const Vec u = eval_policy(policy, x, sys.control_dim);
    rec.on_control(k, u);
    for (int s = 0; s < n_sub; ++s) {
      const Vec dw = rng.gaussian_vector(sys.noise_dim, std::sqrt(h));
      x += sys.drift(x, u) * h + sys.diffusion(x, u) * dw;
      ++j;
      const double t = j * h;
      check_state(x, t, guard);
      rec.on_state(j, t, x, nullptr);
    }
  }
}

template <class Recorder>
void run_augmented(const AugmentedSde& sys, const MarkovPolicy& policy,
                   const SampleHoldConfig& cfg, RngStream& rng, Recorder& rec,
                   SafeguardStats& stats) {
  cfg.validate();
  if (!sys.noise.bounded()) {
    throw std::invalid_argument("simulate_augmented requires a bounded noise model");
  }
  const int n_sub = cfg.substeps_per_hold();
  const int holds = cfg.hold_count();
  const double h = cfg.substep;
  const double guard = divergence_guard(cfg.initial_state);

  Vec x = cfg.initial_state;
  BoundedNoiseState z(sys.noise, sys.plant.noise_dim);
  rec.on_state(0, 0.0, x, &z.value());
  int j = 0;
  for (int k = 0; k < holds; ++k) {
    const Vec u = eval_policy(policy, x, sys.plant.control_dim);
    rec.on_control(k, u);
    for (int s = 0; s < n_sub; ++s) {
      // Lebesgue-only plant update with the pre-step noise value
      x += (sys.plant.drift(x, u) + sys.plant.diffusion(x, u) * z.value()) * h;
      z.step(h, rng, stats);
      ++j;
      const double t = j * h;
      check_state(x, t, guard);
      rec.on_state(j, t, x, &z.value());
    }
  }
}

}  // namespace shhlab::detail
