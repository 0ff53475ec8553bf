// Copyright 2026 The shhlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "shhlab/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <ostream>

#include "shhlab/csv.hpp"
#include "shhlab/halton.hpp"

namespace shhlab {

namespace {
// Tolerance absorbing round-off in equality-case margins.
constexpr double kMarginEps = 1e-10;
}  // namespace

double generator(const SmoothLyapunovPair& pair, const ControlledSde& system, const Vec& x) {
  const Vec u = pair.policy.map(x);
  const Vec g = pair.gradient(x);
  const Mat h = pair.hessian(x);
  const Mat s = system.diffusion(x, u);
  const double drift_term = g.dot(system.drift(x, u));
  const double noise_term = 0.5 * (s.transpose() * h * s).trace();
  return drift_term + noise_term;
}

MarginReport check_positive_definiteness(const SmoothLyapunovPair& pair, double radius,
                                         int grid_density) {
  if (!(radius > 0.0)) throw std::invalid_argument("check_positive_definiteness: radius <= 0");
  if (pair.state_dim <= 0) {
    throw std::invalid_argument("check_positive_definiteness: pair.state_dim unset");
  }
  MarginReport report;
  report.min_margin = std::numeric_limits<double>::infinity();
  for (const Vec& x : ball_grid(pair.state_dim, radius, grid_density)) {
    const double l = pair.value(x);
    const double s = x.norm();
    const double lo = pair.alpha1(s);
    const double hi = pair.alpha2(s);
    report.entries.push_back({x, l, lo, l - lo});
    report.entries.push_back({x, l, hi, hi - l});
    const double worst = std::min(l - lo, hi - l);
    if (worst < report.min_margin) {
      report.min_margin = worst;
      report.worst_point = x;
    }
  }
  report.pass = report.min_margin >= -kMarginEps;
  return report;
}

MarginReport check_decay(const SmoothLyapunovPair& pair, const ControlledSde& system,
                         double radius, int grid_density) {
  if (!(radius > 0.0)) throw std::invalid_argument("check_decay: radius <= 0");
  MarginReport report;
  report.min_margin = std::numeric_limits<double>::infinity();
  for (const Vec& x : ball_grid(system.state_dim, radius, grid_density)) {
    const double gen = generator(pair, system, x);
    const double bound = -pair.alpha3(x.norm()) + pair.sigma_bar;
    const double margin = bound - gen;
    report.entries.push_back({x, gen, bound, margin});
    if (margin < report.min_margin) {
      report.min_margin = margin;
      report.worst_point = x;
    }
  }
  report.pass = report.min_margin >= -kMarginEps;
  return report;
}

void write_margin_csv(const MarginReport& report, std::ostream& os) {
  if (report.entries.empty()) return;
  const int n = static_cast<int>(report.entries.front().x.size());
  for (int i = 0; i < n; ++i) os << "x" << i << ",";
  os << "value,bound,margin\n";
  for (const auto& e : report.entries) {
    for (int i = 0; i < n; ++i) os << format_full(e.x[i]) << ",";
    os << format_full(e.value) << "," << format_full(e.bound) << ","
       << format_full(e.margin) << "\n";
  }
}

SmoothLyapunovPair lift_noiseless_pair(const SmoothLyapunovPair& noiseless,
                                       const ControlledSde& system, double r_tilde,
                                       const LiftOptions& opts) {
  if (!(r_tilde >= 0.0)) throw std::invalid_argument("lift: r_tilde must be >= 0");
  if (!(opts.verify_radius > r_tilde)) {
    throw std::invalid_argument("lift: verify_radius must exceed r_tilde");
  }
  const int n = system.state_dim;
  auto noise_matrix = [&](const Vec& x) -> Mat {
    const Vec u = noiseless.policy.map(x);
    const Mat s = system.diffusion(x, u);
    return s.transpose() * noiseless.hessian(x) * s;
  };

  // Sigma_bar = 1/2 sup over B_r_tilde of the spectral norm.
  double sigma_bar = 0.0;
  if (r_tilde > 0.0) {
    for (const Vec& x : ball_grid(n, r_tilde, opts.grid_density)) {
      sigma_bar = std::max(sigma_bar,
                           0.5 * spectral_norm(noise_matrix(x), opts.power_iterations));
    }
  } else {
    sigma_bar = 0.5 * spectral_norm(noise_matrix(Vec::Zero(n)), opts.power_iterations);
  }

  // Growth condition outside B_r_tilde, with the violating point on failure.
  double max_noise_seen = 0.0;
  for (const Vec& x : annulus_grid(n, std::max(r_tilde, 1e-12), opts.verify_radius,
                                   opts.grid_density)) {
    const double half_norm = 0.5 * spectral_norm(noise_matrix(x), opts.power_iterations);
    max_noise_seen = std::max(max_noise_seen, half_norm);
    const double a3 = noiseless.alpha3(x.norm());
    if (a3 < half_norm - kMarginEps) {
      throw GrowthConditionError(x, a3, half_norm);
    }
  }

  SmoothLyapunovPair lifted = noiseless;
  lifted.sigma_bar = sigma_bar;
  if (sigma_bar == 0.0 && max_noise_seen == 0.0) {
    return lifted;  // zero diffusion: pair carries over unchanged
  }

  // Rebuild the decay rate: target(s) = alpha3(s) minus the worst half-trace
  // on the sphere of radius s (outside r_tilde), then take the monotone
  // envelope so the result is again class-K-infinity.
  const int nr = std::max(8, opts.radial_samples);
  const double s_max = opts.verify_radius;
  const int sphere_samples = std::max(16, opts.grid_density / nr);
  auto values = std::make_shared<std::vector<double>>(nr + 1, 0.0);
  std::vector<double> target(nr + 1, 0.0);
  for (int j = 1; j <= nr; ++j) {
    const double s = s_max * j / nr;
    double q_hat = 0.0;
    if (s >= r_tilde) {
      for (const Vec& x : sphere_grid(n, s, sphere_samples)) {
        q_hat = std::max(q_hat, 0.5 * (noise_matrix(x)).trace());
      }
    }
    target[j] = noiseless.alpha3(s) - q_hat;
  }
  double suffix = std::numeric_limits<double>::infinity();
  for (int j = nr; j >= 1; --j) {
    suffix = std::min(suffix, target[j]);
    (*values)[j] = suffix;
  }
  for (int j = 1; j <= nr; ++j) {
    if (!((*values)[j] > 0.0)) {
      Vec witness = Vec::Zero(n);
      witness[0] = s_max * j / nr;
      throw GrowthConditionError(witness, noiseless.alpha3(witness[0]), target[j]);
    }
    // tiny graded shrink keeps the envelope strictly increasing across flats
    (*values)[j] *= 1.0 - 1e-9 * (1.0 - static_cast<double>(j) / nr);
  }

  auto forward = [values, s_max, nr](double s) -> double {
    if (s <= 0.0) return 0.0;
    const double pos = s / s_max * nr;
    if (pos >= nr) {
      const double slope = ((*values)[nr] - (*values)[nr - 1]) / (s_max / nr);
      return (*values)[nr] + slope * (s - s_max);
    }
    const int j = static_cast<int>(pos);
    const double frac = pos - j;
    const double left = j == 0 ? 0.0 : (*values)[j];
    return left + frac * ((*values)[j + 1] - left);
  };
  lifted.alpha3 = KInfFunction::from_forward(forward);
  return lifted;
}

}  // namespace shhlab
