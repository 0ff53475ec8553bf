// Copyright 2026 The shhlab Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "shhlab/rng.hpp"
#include "shhlab/system.hpp"

namespace shhlab {

/// Euler-Maruyama over one hold interval with the control frozen at u_held.
/// Draws exactly delta/substep d-dimensional Gaussian increments of
/// variance substep from rng, regardless of the diffusion.
Vec integrate_hold_interval(const ControlledSde& system, const Vec& x_start,
                            const Vec& u_held, double delta, double substep,
                            RngStream& rng,
                            double guard = -1.0,  // <0: derive from x_start
                            double t_offset = 0.0);

/// Full sample-and-hold run: control recomputed only at times k*delta.
Trajectory simulate_sample_hold(const ControlledSde& system, const MarkovPolicy& policy,
                                const SampleHoldConfig& config, RngStream& rng);

/// Sample-and-hold run of the bounded-noise augmented dynamics. The plant
/// sees only Lebesgue integrals; the Ito integral lives in the noise state.
Trajectory simulate_augmented(const AugmentedSde& system, const MarkovPolicy& policy,
                              const SampleHoldConfig& config, RngStream& rng);

}  // namespace shhlab
