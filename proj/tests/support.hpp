// Copyright 2026 The shhlab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Shared test fixtures: small systems and the independent oracles
// (finite differences, short-time Monte Carlo generator estimates).
#pragma once

#include <cmath>
#include <functional>

#include "shhlab/bench_systems.hpp"
#include "shhlab/integrate.hpp"
#include "shhlab/lyapunov.hpp"

namespace shhlab::testing {

/// Scalar system dX = f(x,u) dt + sigma(x,u) dB from plain doubles.
inline ControlledSde scalar_sde(std::function<double(double, double)> f,
                                std::function<double(double, double)> sigma) {
  ControlledSde sys;
  sys.state_dim = 1;
  sys.control_dim = 1;
  sys.noise_dim = 1;
  sys.drift = [f = std::move(f)](const Vec& x, const Vec& u) -> Vec {
    Vec out(1);
    out[0] = f(x[0], u[0]);
    return out;
  };
  sys.diffusion = [sigma = std::move(sigma)](const Vec& x, const Vec& u) -> Mat {
    Mat out(1, 1);
    out(0, 0) = sigma(x[0], u[0]);
    return out;
  };
  return sys;
}

inline MarkovPolicy scalar_policy(std::function<double(double)> mu) {
  MarkovPolicy p;
  p.map = [mu = std::move(mu)](const Vec& x) -> Vec {
    Vec u(1);
    u[0] = mu(x[0]);
    return u;
  };
  return p;
}

inline MarkovPolicy zero_policy(int m) {
  MarkovPolicy p;
  p.map = [m](const Vec&) -> Vec { return Vec::Zero(m); };
  p.control_bound = 0.0;
  return p;
}

/// Central finite-difference gradient.
inline Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x,
                       double step = 1e-4) {
  Vec g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    Vec hi = x, lo = x;
    hi[i] += step;
    lo[i] -= step;
    g[i] = (f(hi) - f(lo)) / (2.0 * step);
  }
  return g;
}

/// Central finite-difference Jacobian of a vector field (used as a Hessian
/// oracle when applied to a gradient).
inline Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x,
                       double step = 1e-4) {
  const Vec f0 = f(x);
  Mat j(f0.size(), x.size());
  for (int i = 0; i < x.size(); ++i) {
    Vec hi = x, lo = x;
    hi[i] += step;
    lo[i] -= step;
    j.col(i) = (f(hi) - f(lo)) / (2.0 * step);
  }
  return j;
}

struct DynkinEstimate {
  double slope;  // (E L(X_h) - L(x)) / h
  double se;     // standard error of the slope
};

/// Short-time Monte Carlo estimate of the generator: simulate N one-hold
/// paths to time h (with substeps) and difference the Lyapunov values.
inline DynkinEstimate mc_generator_estimate(const ControlledSde& sys,
                                            const MarkovPolicy& policy,
                                            const std::function<double(const Vec&)>& L,
                                            const Vec& x, double h, int substeps, int n_paths,
                                            std::uint64_t seed) {
  const Vec u = policy.map(x);
  const double l0 = L(x);
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n_paths; ++i) {
    RngStream rng(RngStream::derive_seed(seed, i));
    const Vec xh = integrate_hold_interval(sys, x, u, h, h / substeps, rng);
    const double v = (L(xh) - l0) / h;
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / n_paths;
  const double var = std::max(0.0, (sum_sq / n_paths - mean * mean) * n_paths / (n_paths - 1.0));
  return {mean, std::sqrt(var / n_paths)};
}

}  // namespace shhlab::testing
