// Copyright 2026 The shhlab Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "shhlab/comparison.hpp"
#include "shhlab/system.hpp"

namespace shhlab {

/// Smooth stochastic Lyapunov pair (L, mu) with comparison functions and
/// the noise offset Sigma_bar of the decay condition
///   A^mu L(x) <= -alpha3(||x||) + Sigma_bar.
struct SmoothLyapunovPair {
  int state_dim = 0;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  std::function<Mat(const Vec&)> hessian;
  KInfFunction alpha1, alpha2, alpha3;
  double sigma_bar = 0.0;  // Sigma_bar
  MarkovPolicy policy;
};

/// Generator of the closed loop at x:
///   A^mu L(x) = grad L . f(x, mu(x)) + 1/2 tr(sigma^T hess L sigma).
double generator(const SmoothLyapunovPair& pair, const ControlledSde& system, const Vec& x);

struct MarginEntry {
  Vec x;
  double value;
  double bound;
  double margin;  // >= 0 means the inequality holds at x
};

struct MarginReport {
  std::vector<MarginEntry> entries;
  double min_margin = 0.0;
  Vec worst_point;
  bool pass = false;
};

/// alpha1(||x||) <= L(x) <= alpha2(||x||) on a low-discrepancy grid over B_radius.
MarginReport check_positive_definiteness(const SmoothLyapunovPair& pair, double radius,
                                         int grid_density);

/// A^mu L(x) <= -alpha3(||x||) + Sigma_bar on a grid over B_radius.
MarginReport check_decay(const SmoothLyapunovPair& pair, const ControlledSde& system,
                         double radius, int grid_density);

/// CSV rows (x..., value, bound, margin).
void write_margin_csv(const MarginReport& report, std::ostream& os);

/// Thrown when the Corollary-2 growth condition fails on the grid.
class GrowthConditionError : public std::runtime_error {
 public:
  GrowthConditionError(Vec witness, double alpha3_val, double noise_val)
      : std::runtime_error("growth condition alpha3 >= 1/2 ||sigma^T hess L sigma|| "
                           "violated on verification grid"),
        witness(std::move(witness)),
        alpha3_value(alpha3_val),
        noise_value(noise_val) {}
  Vec witness;
  double alpha3_value;
  double noise_value;
};

struct LiftOptions {
  double verify_radius = 0.0;  // outer radius of the growth-condition grid (required > r_tilde)
  int grid_density = 4096;
  int radial_samples = 256;    // resolution of the rebuilt decay rate
  int power_iterations = 50;
};

/// Corollary-2 transfer: from a noiseless pair (grad L . f <= -alpha3) to a
/// stochastic pair. Sets Sigma_bar = 1/2 sup_{B_r_tilde} ||sigma^T hess L sigma||
/// and rebuilds the decay rate as the monotone envelope of
/// alpha3(s) - sup_{||x||=s} 1/2 tr(sigma^T hess L sigma) outside B_r_tilde.
SmoothLyapunovPair lift_noiseless_pair(const SmoothLyapunovPair& noiseless,
                                       const ControlledSde& system, double r_tilde,
                                       const LiftOptions& opts);

}  // namespace shhlab
