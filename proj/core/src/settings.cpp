// Copyright 2026 The shhlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "shhlab/settings.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "shhlab/csv.hpp"
#include "shhlab/halton.hpp"

namespace shhlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Max difference quotient over sampled pairs at three separation scales.
template <typename G, typename NormOfDiff>
double lipschitz_estimate(const G& g, const NormOfDiff& norm_of_diff, int dim,
                          double radius, int n_pairs, double safety) {
  const double scales[3] = {0.01, 0.1, 1.0};
  const auto bases = ball_grid(dim, radius, n_pairs);
  double lip = 0.0;
  std::size_t k = 0;
  for (const Vec& x : bases) {
    const Vec dir = detail::halton_direction(dim, k, 2);
    const double scale = scales[k % 3] * radius;
    ++k;
    Vec y = x + scale * dir;
    if (y.norm() > radius) y = x - scale * dir;  // stay inside the ball
    if (y.norm() > radius) continue;
    const double dist = (y - x).norm();
    if (dist < 1e-12) continue;
    lip = std::max(lip, norm_of_diff(g(x), g(y)) / dist);
  }
  return lip * safety;
}

double vec_diff_norm(const Vec& a, const Vec& b) { return (a - b).norm(); }
double mat_diff_norm(const Mat& a, const Mat& b) { return spectral_norm(a - b); }
double scalar_diff_norm(double a, double b) { return std::abs(a - b); }

}  // namespace

StabilizationParameters compute_settings(const SmoothLyapunovPair& pair,
                                         const ControlledSde& system, double r, double R,
                                         const GridSpec& grid) {
  if (!(0.0 < r && r < R)) throw std::invalid_argument("need 0 < r < R");
  const int n = system.state_dim;
  const int m = system.control_dim;

  StabilizationParameters p;
  p.r = r;
  p.R = R;
  p.Sigma_bar = pair.sigma_bar;

  // PD / decay preconditions at a reduced density.
  {
    const int density = std::min(grid.density, 2048);
    const auto pd = check_positive_definiteness(pair, R, density);
    if (!pd.pass) {
      throw std::invalid_argument("pair fails positive definiteness on B_R (margin " +
                                  format_full(pd.min_margin) + ")");
    }
    const auto dec = check_decay(pair, system, R, density);
    if (!dec.pass) {
      throw std::invalid_argument("pair fails decay condition on B_R (margin " +
                                  format_full(dec.min_margin) + ")");
    }
  }

  for (const Vec& x : ball_grid(n, R, grid.density)) {
    p.L_bar = std::max(p.L_bar, pair.value(x));
  }
  p.R_star = std::max(R, pair.alpha1.inv(p.L_bar));

  const auto xs = ball_grid(n, p.R_star, grid.density);
  for (const Vec& x : xs) {
    p.u_bar = std::max(p.u_bar, pair.policy.map(x).norm());
    p.L_grad_bar = std::max(p.L_grad_bar, pair.gradient(x).norm());
    p.L_hess_bar = std::max(p.L_hess_bar, spectral_norm(pair.hessian(x)));
  }

  // sup of ||f|| and ||sigma|| over B_R* x U*: a coarse true product (which
  // contains all axis-extreme combinations) plus a diagonal sweep.
  const auto us = ball_grid(m, p.u_bar, 64);
  const std::size_t x_product = std::min<std::size_t>(xs.size(), 256);
  for (std::size_t i = 0; i < x_product; ++i) {
    for (const Vec& u : us) {
      p.f_bar = std::max(p.f_bar, system.drift(xs[i], u).norm());
      p.sigma_sup = std::max(p.sigma_sup, spectral_norm(system.diffusion(xs[i], u)));
    }
  }
  for (std::size_t i = x_product; i < xs.size(); ++i) {
    const Vec& u = us[i % us.size()];
    p.f_bar = std::max(p.f_bar, system.drift(xs[i], u).norm());
    p.sigma_sup = std::max(p.sigma_sup, spectral_norm(system.diffusion(xs[i], u)));
  }

  p.l_star = pair.alpha1(r);
  p.r_star = pair.alpha2.inv(0.5 * p.l_star);
  p.r_tilde = pair.sigma_bar > 0.0 ? pair.alpha3.inv(pair.sigma_bar) : 0.0;

  if (p.r_tilde < p.r_star) {
    p.branch = CoreBranch::tilde_below_core;
    p.core_radius = p.r_star;
    p.rho = 0.0;
  } else {
    p.branch = CoreBranch::tilde_at_least_core;
    p.core_radius = p.r_tilde + grid.core_inflation * r;
    p.rho = p.r_tilde;
  }
  p.core_level = pair.alpha2(p.core_radius);
  if (p.branch == CoreBranch::tilde_below_core) p.core_level = 0.5 * p.l_star;

  if (!(p.core_radius < p.R_star)) {
    Vec witness = Vec::Zero(n);
    witness[0] = p.core_radius;
    throw InfeasibleSettingsError(
        "empty decay annulus: core radius " + format_full(p.core_radius) +
            " reaches the overshoot radius " + format_full(p.R_star),
        witness);
  }

  // Decay-rate infimum over the annulus; alpha3 is radial so a 1-D scan with
  // both endpoints suffices.
  double alpha3_min = kInf;
  double worst_s = p.core_radius;
  const int scan = 2048;
  for (int i = 0; i <= scan; ++i) {
    const double s = p.core_radius + (p.R_star - p.core_radius) * i / scan;
    const double v = pair.alpha3(s);
    if (v < alpha3_min) {
      alpha3_min = v;
      worst_s = s;
    }
  }
  p.alpha3_bar_paper = alpha3_min + pair.sigma_bar;
  p.alpha3_bar_net = alpha3_min - pair.sigma_bar;
  if (!(p.alpha3_bar_net > 0.0)) {
    Vec witness = Vec::Zero(n);
    witness[0] = worst_s;
    throw InfeasibleSettingsError(
        "nonpositive net decay rate " + format_full(p.alpha3_bar_net) +
            " on the annulus at ||x|| = " + format_full(worst_s),
        witness);
  }

  const int pairs = grid.lipschitz_pairs;
  const double safety = grid.lipschitz_safety;
  p.lip_L = lipschitz_estimate(pair.value, scalar_diff_norm, n, p.R_star, pairs, safety);
  p.lip_gradL = lipschitz_estimate(pair.gradient, vec_diff_norm, n, p.R_star, pairs, safety);
  p.lip_hessL = lipschitz_estimate(pair.hessian, mat_diff_norm, n, p.R_star, pairs, safety);
  // f and sigma: Lipschitz in the state, worst case over sampled controls.
  for (const Vec& u : ball_grid(m, p.u_bar, 8)) {
    auto f_u = [&](const Vec& x) { return system.drift(x, u); };
    auto s_u = [&](const Vec& x) { return system.diffusion(x, u); };
    p.lip_f = std::max(p.lip_f, lipschitz_estimate(f_u, vec_diff_norm, n, p.R_star,
                                                   pairs / 8, safety));
    p.lip_sigma = std::max(p.lip_sigma, lipschitz_estimate(s_u, mat_diff_norm, n, p.R_star,
                                                           pairs / 8, safety));
  }

  p.bracket_C = p.lip_gradL * p.f_bar + p.L_grad_bar * p.lip_f +
                p.sigma_sup * p.L_hess_bar * p.lip_sigma +
                0.5 * p.sigma_sup * p.sigma_sup * p.lip_hessL;

  const DeltaBound db = delta_bound(p);
  p.delta1 = db.delta1;
  p.delta2 = db.delta2;
  p.delta_bar = db.delta_bar;
  p.T_bound = reaching_time_bound(p);
  p.T_bound_paper = (4.0 * p.L_bar - 3.0 * 2.0 * p.core_level) / (2.0 * p.alpha3_bar_paper);
  return p;
}

DeltaBound delta_bound(const StabilizationParameters& p) {
  if (p.f_bar == 0.0) return {kInf, kInf, kInf};
  const double l_eff = 2.0 * p.core_level;
  const double d1 =
      p.bracket_C > 0.0 ? 0.5 * p.alpha3_bar_net / (p.f_bar * p.bracket_C) : kInf;
  const double d2 = p.lip_L > 0.0 ? l_eff / (4.0 * p.lip_L * p.f_bar) : kInf;
  return {d1, d2, std::min(d1, d2)};
}

double reaching_time_bound(const StabilizationParameters& p) {
  if (!(p.alpha3_bar_net > 0.0)) {
    throw std::invalid_argument("reaching_time_bound requires a positive decay rate");
  }
  const double l_eff = 2.0 * p.core_level;
  return (4.0 * p.L_bar - 3.0 * l_eff) / (2.0 * p.alpha3_bar_net);
}

DoobBound doob_confidence(const StabilizationParameters& p, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("doob_confidence: c must be > 0");
  const double prob = 1.0 - p.R_star / c;
  return {prob, c <= p.R_star};
}

std::string StabilizationParameters::report() const {
  std::ostringstream os;
  auto line = [&](const char* key, double v) { os << key << " = " << format_full(v) << "\n"; };
  line("r", r);
  line("R", R);
  line("L_bar", L_bar);
  line("R_star", R_star);
  line("u_bar", u_bar);
  line("f_bar", f_bar);
  line("sigma_sup", sigma_sup);
  line("L_grad_bar", L_grad_bar);
  line("L_hess_bar", L_hess_bar);
  line("l_star", l_star);
  line("r_star", r_star);
  line("Sigma_bar", Sigma_bar);
  line("r_tilde", r_tilde);
  os << "branch = "
     << (branch == CoreBranch::tilde_below_core ? "tilde_below_core" : "tilde_at_least_core")
     << "\n";
  line("core_radius", core_radius);
  line("core_level", core_level);
  line("rho", rho);
  line("target_radius", target_radius());
  line("alpha3_bar_paper", alpha3_bar_paper);
  line("alpha3_bar_net", alpha3_bar_net);
  line("lip_L", lip_L);
  line("lip_f", lip_f);
  line("lip_sigma", lip_sigma);
  line("lip_gradL", lip_gradL);
  line("lip_hessL", lip_hessL);
  line("bracket_C", bracket_C);
  line("delta1", delta1);
  line("delta2", delta2);
  line("delta_bar", delta_bar);
  line("T_bound", T_bound);
  line("T_bound_paper", T_bound_paper);
  return os.str();
}

}  // namespace shhlab
