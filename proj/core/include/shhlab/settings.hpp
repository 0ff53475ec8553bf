// Copyright 2026 The shhlab Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

#include "shhlab/lyapunov.hpp"

namespace shhlab {

/// Grid-search knobs for the constant estimation.
struct GridSpec {
  int density = 1 << 14;
  int lipschitz_pairs = 4096;
  double lipschitz_safety = 1.25;  // applied to Lipschitz estimates only
  double core_inflation = 0.1;     // r' = core_inflation * r in the r_tilde >= r* branch
};

enum class CoreBranch { tilde_below_core, tilde_at_least_core };

/// The full constructive ledger from the proof of the practical-stabilization
/// theorem, plus the admissible sampling time and reaching-time bound.
struct StabilizationParameters {
  double r = 0.0, R = 0.0;
  double L_bar = 0.0;      // sup_{B_R} L
  double R_star = 0.0;     // overshoot radius, alpha1(R*) >= L_bar
  double u_bar = 0.0;      // sup_{B_R*} ||mu||
  double f_bar = 0.0;      // sup ||f|| over B_R* x U*
  double sigma_sup = 0.0;  // sup ||sigma||_2 over B_R* x U*
  double L_grad_bar = 0.0;
  double L_hess_bar = 0.0;
  double l_star = 0.0;  // alpha1(r)
  double r_star = 0.0;  // alpha2^{-1}(l*/2)
  double Sigma_bar = 0.0;
  double r_tilde = 0.0;  // smallest radius containing {alpha3(||x||) <= Sigma_bar}
  CoreBranch branch = CoreBranch::tilde_below_core;
  double core_radius = 0.0;  // r* or r_tilde + r'
  double core_level = 0.0;   // Lyapunov level matching the effective core radius
  double rho = 0.0;          // convergence floor: 0, or r_tilde in the second branch
  double alpha3_bar_paper = 0.0;  // inf over annulus of alpha3 + Sigma_bar
  double alpha3_bar_net = 0.0;    // inf over annulus of alpha3 - Sigma_bar (used below)
  double lip_L = 0.0, lip_f = 0.0, lip_sigma = 0.0, lip_gradL = 0.0, lip_hessL = 0.0;
  double bracket_C = 0.0;  // lip(gradL) f_bar + L_grad lip(f) + sigma L_hess lip(sigma)
                           // + 1/2 sigma^2 lip(hessL)
  double delta1 = 0.0, delta2 = 0.0, delta_bar = 0.0;
  double T_bound = 0.0;        // (4 L_bar - 3 l*) / (2 alpha3_net)
  double T_bound_paper = 0.0;  // same with the as-written alpha3_bar

  double target_radius() const { return std::max(r, rho); }
  std::string report() const;  // flat key=value text
};

/// Thrown when the annulus decay rate is not positive (or the annulus is
/// empty); carries the violating point.
class InfeasibleSettingsError : public std::runtime_error {
 public:
  InfeasibleSettingsError(std::string what, Vec witness_point)
      : std::runtime_error(std::move(what)), witness(std::move(witness_point)) {}
  Vec witness;
};

/// Computes the whole ledger from the pair and the radii 0 < r < R.
/// Suprema come from boundary-inclusive low-discrepancy grids; Lipschitz
/// estimates from sampled difference quotients times the safety factor.
StabilizationParameters compute_settings(const SmoothLyapunovPair& pair,
                                         const ControlledSde& system, double r, double R,
                                         const GridSpec& grid = {});

struct DeltaBound {
  double delta1;
  double delta2;
  double delta_bar;
};

/// Admissible sampling time: delta1 keeps the second-order Ito remainder
/// below half the decay rate, delta2 keeps the level from jumping across
/// l*/4 within one hold interval. Returns +inf sentinels when f_bar = 0.
DeltaBound delta_bound(const StabilizationParameters& p);

/// (4 L_bar - 3 l*) / (2 alpha3_bar_net).
double reaching_time_bound(const StabilizationParameters& p);

struct DoobBound {
  double probability;  // 1 - R*/c
  bool vacuous;        // c <= R*, bound <= 0
};

/// Doob lower bound P(sup ||X|| <= c) >= 1 - R*/c.
DoobBound doob_confidence(const StabilizationParameters& p, double c);

}  // namespace shhlab
