// Copyright 2026 The shhlab Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>

#include "shhlab/ensemble.hpp"
#include "shhlab/lyapunov.hpp"
#include "shhlab/moreau.hpp"

namespace shhlab {

/// Closed-form moments, where the model admits them.
struct MomentOracle {
  std::function<Vec(const Vec& x0, double t)> mean_state;  // E X_t
  std::function<double(const Vec& x0, double t)> mean_sq;  // E ||X_t||^2
};

/// A benchmark system bundled with its certificate machinery and defaults.
struct Benchmark {
  std::string name;
  ControlledSde system;
  std::optional<NoiseModel> bounded_noise;
  std::optional<SmoothLyapunovPair> pair;
  std::optional<NonsmoothClf> clf;
  std::optional<InfConvolution> inf_conv;
  MarkovPolicy policy;
  std::optional<MomentOracle> oracle;
  double default_r = 0.0;
  double default_R = 0.0;
  double default_delta_bar = 0.0;  // for the non-smooth benchmark: sweep-validated default
  Vec default_x0;

  AugmentedSde augmented() const;
  SdeVariant sde_variant() const;  // augmented when a bounded noise model is attached
};

/// n-dimensional Ornstein-Uhlenbeck closed loop:
///   f(x,u) = -a x + u,  sigma = sigma0 I,  mu(x) = -k x,
/// with L = ||x||^2, alpha1 = alpha2 = s^2, alpha3 = 2(a+k) s^2 and
/// Sigma_bar = n sigma0^2 (exact decay margin zero).
Benchmark ou_benchmark(int n, double a, double sigma0, double k = 0.0);

/// Exact constants of the nonholonomic CLF
///   L = x1^2 + x2^2 + 2 x3^2 - 2 |x3| sqrt(x1^2 + x2^2)
///     = (sqrt(x1^2+x2^2) - |x3|)^2 + x3^2,
/// positively homogeneous of degree 2: min/max of L on the unit sphere.
/// The minimum sits on the cone sqrt(x1^2+x2^2)/|x3| = 2 (value (3-sqrt5)/2),
/// the maximum on the x3 axis (value 2).
double nonholonomic_clf(const Vec& x);
inline constexpr double kNonholonomicSphereMin = 0.38196601125010515;  // (3 - sqrt 5)/2
inline constexpr double kNonholonomicSphereMax = 2.0;

/// Nonholonomic-integrator parking benchmark:
///   dx = (u1, u2, x1 u2 - x2 u1) dt + sigma0 I Z dt
/// with the non-smooth CLF above, inf-convolution control on [-1,1]^2 and a
/// bounded noise model on Z. The control law pivots f at the measured state
/// by default; pass pivot_at_state = false for the literal subgradient pivot
/// (which stalls on the valley cone of this CLF, see the benchmark tests).
Benchmark nonholonomic_benchmark(const NoiseModel& noise, double sigma0, double beta = 0.1,
                                 int control_grid = 41, double solver_tol = 1e-8,
                                 bool pivot_at_state = true);

}  // namespace shhlab
