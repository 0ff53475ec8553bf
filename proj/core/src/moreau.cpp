// Copyright 2026 The shhlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "shhlab/moreau.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shhlab/halton.hpp"

namespace shhlab {

namespace {

struct SearchState {
  Vec point;
  double value;
  int evals = 0;
  double final_step = 0.0;
  bool converged = false;
};

// Best-of-poll compass search; polls the 2n axis neighbours, moves to the
// best strict improvement, halves the mesh otherwise.
template <typename F>
SearchState compass_minimize(const F& phi, Vec start, double step, double tol,
                             int max_iter) {
  SearchState s;
  s.point = std::move(start);
  s.value = phi(s.point);
  s.evals = 1;
  const int n = static_cast<int>(s.point.size());
  int polls = 0;
  while (step > tol && polls < max_iter) {
    ++polls;
    double best_val = s.value;
    int best_i = -1;
    double best_sign = 0.0;
    for (int i = 0; i < n; ++i) {
      for (double sign : {1.0, -1.0}) {
        Vec cand = s.point;
        cand[i] += sign * step;
        const double v = phi(cand);
        ++s.evals;
        if (v < best_val) {
          best_val = v;
          best_i = i;
          best_sign = sign;
        }
      }
    }
    if (best_i >= 0) {
      s.point[best_i] += best_sign * step;
      s.value = best_val;
    } else {
      step *= 0.5;
    }
  }
  s.final_step = step;
  s.converged = step <= tol;
  return s;
}

}  // namespace

ProxResult inf_conv_value(const InfConvolution& ic, const Vec& x) {
  if (!(ic.beta > 0.0 && ic.beta < 1.0)) {
    throw std::invalid_argument("inf_conv_value: beta must lie in (0,1)");
  }
  const double half_inv_b2 = 0.5 / (ic.beta * ic.beta);
  auto phi = [&](const Vec& y) {
    return ic.base.value(y) + half_inv_b2 * (y - x).squaredNorm();
  };
  const int n = static_cast<int>(x.size());
  const double rho = ic.solver.start_radius_scale * ic.beta * (1.0 + x.norm());

  std::vector<Vec> starts;
  starts.push_back(x);
  for (int i = 0; i < n && static_cast<int>(starts.size()) < ic.solver.n_starts; ++i) {
    for (double sign : {1.0, -1.0}) {
      Vec s = x;
      s[i] += sign * rho;
      starts.push_back(s);
      if (static_cast<int>(starts.size()) >= ic.solver.n_starts) break;
    }
  }
  for (std::uint64_t k = 0; static_cast<int>(starts.size()) < ic.solver.n_starts; ++k) {
    starts.push_back(x + rho * detail::halton_direction(n, k, 3));
  }

  SearchState best;
  best.value = std::numeric_limits<double>::infinity();
  int total_evals = 0;
  for (const Vec& s0 : starts) {
    SearchState s = compass_minimize(phi, s0, 0.5 * rho, ic.solver.tol, ic.solver.max_iter);
    total_evals += s.evals;
    if (s.value < best.value) best = s;
  }
  if (!best.converged) {
    throw SolverError("inf-convolution inner solve did not reach tolerance", best.point,
                      best.final_step);
  }
  return ProxResult{best.value, best.point, total_evals};
}

Vec proximal_subgradient_from(const InfConvolution& ic, const Vec& x, const Vec& y_beta) {
  return (x - y_beta) / (ic.beta * ic.beta);
}

Vec proximal_subgradient(const InfConvolution& ic, const Vec& x) {
  return proximal_subgradient_from(ic, x, inf_conv_value(ic, x).minimizer);
}

Vec control_argmin(const ControlledSde& system, const Vec& v, const Vec& pivot,
                   const Vec& lo, const Vec& hi, int grid_points_per_dim) {
  const int m = static_cast<int>(lo.size());
  const int g = std::max(2, grid_points_per_dim);

  Vec best_u = lo;
  double best_val = std::numeric_limits<double>::infinity();
  Vec u(m);
  std::vector<int> idx(m, 0);
  // lexicographic sweep; strict improvement keeps the smallest tied u
  while (true) {
    for (int i = 0; i < m; ++i) u[i] = lo[i] + idx[i] * (hi[i] - lo[i]) / (g - 1);
    const double val = v.dot(system.drift(pivot, u));
    if (val < best_val) {
      best_val = val;
      best_u = u;
    }
    int i = m - 1;
    while (i >= 0 && ++idx[i] == g) idx[i--] = 0;
    if (i < 0) break;
  }
  return best_u;
}

Vec inf_conv_control(const InfConvolution& ic, const ControlledSde& system, const Vec& x,
                     const ControlLawConfig& cfg) {
  const Vec v = proximal_subgradient(ic, x);
  const Vec& pivot = cfg.pivot_at_state ? x : v;
  return control_argmin(system, v, pivot, ic.base.control_lo, ic.base.control_hi,
                        cfg.grid_points_per_dim);
}

MarkovPolicy make_inf_conv_policy(InfConvolution ic, ControlledSde system,
                                  ControlLawConfig cfg) {
  double bound = std::max(ic.base.control_lo.norm(), ic.base.control_hi.norm());
  MarkovPolicy policy;
  policy.control_bound = bound;
  policy.map = [ic = std::move(ic), system = std::move(system), cfg](const Vec& x) {
    return inf_conv_control(ic, system, x, cfg);
  };
  return policy;
}

double nonsmooth_taylor_residual(const InfConvolution& ic, const Vec& x, const Vec& y,
                                 double eps) {
  const ProxResult at_x = inf_conv_value(ic, x);
  const Vec v = proximal_subgradient_from(ic, x, at_x.minimizer);
  const ProxResult shifted = inf_conv_value(ic, x + eps * y);
  const double rhs = at_x.value + eps * v.dot(y) +
                     eps * eps * y.squaredNorm() / (2.0 * ic.beta * ic.beta);
  return rhs - shifted.value;
}

DecayDecomposition sampled_decay_decomposition(const InfConvolution& ic,
                                               const AugmentedSde& system,
                                               const Trajectory& traj, int hold_index) {
  const int n_sub = traj.substeps_per_hold;
  const int j0 = hold_index * n_sub;
  const int j1 = j0 + n_sub;
  if (hold_index < 0 || j1 >= static_cast<int>(traj.states.size()) ||
      hold_index >= static_cast<int>(traj.controls.size())) {
    throw std::invalid_argument("sampled_decay_decomposition: hold_index out of range");
  }
  const double h = traj.substep;
  const double dt = traj.delta;
  const Vec& u = traj.controls[hold_index];
  const Vec& x_k = traj.states[j0];
  const bool has_noise = !traj.noise_states.empty();

  DecayDecomposition d;
  d.phi = Vec::Zero(x_k.size());
  d.sigma = Vec::Zero(x_k.size());
  for (int j = j0; j < j1; ++j) {
    const Vec& xj = traj.states[j];
    d.phi += system.plant.drift(xj, u) * h;
    if (has_noise) {
      d.sigma += system.plant.diffusion(xj, u) * traj.noise_states[j] * h;
    }
  }

  const ProxResult at_k = inf_conv_value(ic, x_k);
  const Vec v = proximal_subgradient_from(ic, x_k, at_k.minimizer);
  const ProxResult at_next = inf_conv_value(ic, traj.states[j1]);
  const Vec f_pivot = system.plant.drift(x_k, u);
  const Vec f_k = d.phi + d.sigma;

  d.lhs = at_next.value - at_k.value;
  d.drift_pivot = dt * v.dot(f_pivot);
  d.remainder = v.dot(d.phi - dt * f_pivot);
  d.noise_term = v.dot(d.sigma);
  d.quadratic = f_k.squaredNorm() / (2.0 * ic.beta * ic.beta);
  d.phi_remainder_norm = (d.phi - dt * f_pivot).norm();
  return d;
}

}  // namespace shhlab
