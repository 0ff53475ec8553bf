// Copyright 2026 The shhlab Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <stdexcept>

#include "shhlab/comparison.hpp"
#include "shhlab/system.hpp"

namespace shhlab {

/// Continuous, possibly non-differentiable CLF with its decay rate and the
/// compact control box the policy searches over.
struct NonsmoothClf {
  int state_dim = 0;
  std::function<double(const Vec&)> value;
  KInfFunction alpha3;
  Vec control_lo, control_hi;  // compact box U
};

/// Derivative-free inner minimizer configuration for the prox subproblem.
struct InnerSolverConfig {
  int n_starts = 8;
  double start_radius_scale = 3.0;  // start ball radius = scale * beta * (1 + ||x||)
  double tol = 1e-8;                // terminal mesh size
  int max_iter = 10000;             // poll budget per start
};

/// Inf-convolution L_beta(x) = min_y L(y) + ||y - x||^2 / (2 beta^2).
struct InfConvolution {
  NonsmoothClf base;
  double beta = 0.1;  // in (0, 1)
  InnerSolverConfig solver;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(std::string what, Vec best_iterate, double res)
      : std::runtime_error(std::move(what)), best(std::move(best_iterate)), residual(res) {}
  Vec best;
  double residual;  // final mesh size
};

struct ProxResult {
  double value;   // L_beta(x), evaluated at the minimizer
  Vec minimizer;  // y_beta(x)
  int evals;
};

/// Multi-start compass search on y -> L(y) + ||y - x||^2/(2 beta^2).
/// Throws SolverError (carrying the best iterate) if the mesh never
/// contracts below the tolerance within the poll budget.
ProxResult inf_conv_value(const InfConvolution& ic, const Vec& x);

/// v_beta(x) = (x - y_beta(x)) / beta^2.
Vec proximal_subgradient(const InfConvolution& ic, const Vec& x);
Vec proximal_subgradient_from(const InfConvolution& ic, const Vec& x, const Vec& y_beta);

struct ControlLawConfig {
  int grid_points_per_dim = 41;
  bool pivot_at_state = false;  // evaluate f at (x, u) instead of (v_beta, u)
};

/// Exhaustive lexicographic grid argmin of u -> <v, f(pivot, u)> over the
/// box [lo, hi]; ties resolve to the lexicographically smallest u.
Vec control_argmin(const ControlledSde& system, const Vec& v, const Vec& pivot,
                   const Vec& lo, const Vec& hi, int grid_points_per_dim);

/// mu(x) = argmin over the control grid of <v_beta(x), f(v_beta(x), u)>,
/// ties broken toward the lexicographically smallest u.
Vec inf_conv_control(const InfConvolution& ic, const ControlledSde& system, const Vec& x,
                     const ControlLawConfig& cfg = {});

/// Wraps the control law as a Markov policy.
MarkovPolicy make_inf_conv_policy(InfConvolution ic, ControlledSde system,
                                  ControlLawConfig cfg = {});

/// rhs - lhs of the non-smooth Taylor inequality
///   L_beta(x + eps y) <= L_beta(x) + eps <v_beta(x), y> + eps^2 ||y||^2/(2 beta^2);
/// nonnegative up to solver tolerance.
double nonsmooth_taylor_residual(const InfConvolution& ic, const Vec& x, const Vec& y,
                                 double eps);

/// Terms of the sampled decay decomposition over one hold interval.
struct DecayDecomposition {
  double lhs;          // L_beta(X_{k+1}) - L_beta(X_k)
  double drift_pivot;  // dt <v_beta(X_k), f(X_k, u_k)>
  double remainder;    // <v_beta(X_k), Phi_k - dt f(X_k, u_k)>
  double noise_term;   // <v_beta(X_k), Sigma_k>
  double quadratic;    // ||F_k||^2 / (2 beta^2)
  Vec phi;             // Phi_k  (substep quadrature of f)
  Vec sigma;           // Sigma_k (substep quadrature of sigma * Z)
  double phi_remainder_norm;  // ||Phi_k - dt f(X_k, u_k)||

  double rhs_total() const { return drift_pivot + remainder + noise_term + quadratic; }
};

/// Evaluates the decomposition on the hold interval `hold_index` of a
/// recorded trajectory. Left-endpoint quadrature matches the integrator, so
/// Phi_k + Sigma_k equals the realized increment exactly. A trajectory
/// without recorded noise states is treated as Z = 0.
DecayDecomposition sampled_decay_decomposition(const InfConvolution& ic,
                                               const AugmentedSde& system,
                                               const Trajectory& traj, int hold_index);

}  // namespace shhlab
