// Copyright 2026 The shhlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "shhlab/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace shhlab {

std::string to_string(NoiseTag tag) {
  switch (tag) {
    case NoiseTag::brownian: return "brownian";
    case NoiseTag::sine_wiener: return "sine_wiener";
    case NoiseTag::dcl: return "dcl";
    case NoiseTag::tsb: return "tsb";
    case NoiseTag::ks: return "ks";
    case NoiseTag::frozen: return "frozen";
  }
  return "?";
}

NoiseTag noise_tag_from_string(const std::string& name) {
  if (name == "brownian") return NoiseTag::brownian;
  if (name == "sine_wiener") return NoiseTag::sine_wiener;
  if (name == "dcl") return NoiseTag::dcl;
  if (name == "tsb") return NoiseTag::tsb;
  if (name == "ks") return NoiseTag::ks;
  throw std::invalid_argument("unknown noise model: " + name);
}

NoiseModel NoiseModel::brownian() {
  NoiseModel m;
  m.tag = NoiseTag::brownian;
  return m;
}

NoiseModel NoiseModel::sine_wiener(double tau_a) {
  if (!(tau_a > 0.0)) throw std::invalid_argument("sine_wiener: tau_a must be > 0");
  NoiseModel m;
  m.tag = NoiseTag::sine_wiener;
  m.tau_a = tau_a;
  return m;
}

NoiseModel NoiseModel::dcl(double gamma, double theta) {
  if (!(gamma > -1.0)) throw std::invalid_argument("dcl: gamma must be > -1");
  if (!(theta > 0.0)) throw std::invalid_argument("dcl: theta must be > 0");
  NoiseModel m;
  m.tag = NoiseTag::dcl;
  m.gamma = gamma;
  m.theta = theta;
  return m;
}

NoiseModel NoiseModel::tsb(double theta, double q) {
  if (!(theta > 0.0)) throw std::invalid_argument("tsb: theta must be > 0");
  if (!(q < 1.0)) throw std::invalid_argument("tsb: q must be < 1");
  NoiseModel m;
  m.tag = NoiseTag::tsb;
  m.theta = theta;
  m.q = q;
  return m;
}

NoiseModel NoiseModel::frozen() {
  NoiseModel m;
  m.tag = NoiseTag::frozen;
  return m;
}

NoiseModel NoiseModel::ks(double theta, double gamma) {
  if (!(theta > 0.0)) throw std::invalid_argument("ks: theta must be > 0");
  if (!(gamma >= 0.0)) throw std::invalid_argument("ks: gamma must be >= 0");
  NoiseModel m;
  m.tag = NoiseTag::ks;
  m.theta = theta;
  m.gamma = gamma;
  return m;
}

double NoiseModel::vartheta() const { return (2.0 * gamma + 1.0) / (gamma + 1.0); }

double NoiseModel::drift(double z) const {
  switch (tag) {
    case NoiseTag::frozen:
      return 0.0;
    case NoiseTag::dcl:
      return -z / theta;
    case NoiseTag::tsb: {
      const double denom = 1.0 - z * z;
      double d = -z / (theta * denom);
      const double cap = 1.0 / (theta * kBoundaryEps);
      if (d > cap) d = cap;
      if (d < -cap) d = -cap;
      return d;
    }
    case NoiseTag::ks: {
      double d = -vartheta() / (M_PI * theta) * std::tan(0.5 * M_PI * z);
      // same overshoot guard as TSB: magnitude at most the value on the
      // reflected boundary |z| = 1 - kBoundaryEps
      const double cap =
          vartheta() / (M_PI * theta) * std::tan(0.5 * M_PI * (1.0 - kBoundaryEps));
      if (d > cap) d = cap;
      if (d < -cap) d = -cap;
      return d;
    }
    default:
      throw std::logic_error("drift(): not an SDE noise model");
  }
}

double NoiseModel::diffusion(double z) const {
  switch (tag) {
    case NoiseTag::frozen:
      return 0.0;
    case NoiseTag::dcl: {
      const double arg = (1.0 - z * z) / (theta * (gamma + 1.0));
      return std::sqrt(arg > 0.0 ? arg : 0.0);
    }
    case NoiseTag::tsb:
      return std::sqrt((1.0 - q) / theta);
    case NoiseTag::ks:
      return 2.0 / (M_PI * std::sqrt(theta * (gamma + 1.0)));
    default:
      throw std::logic_error("diffusion(): not an SDE noise model");
  }
}

Vec brownian_increment(int dim, double h, RngStream& rng) {
  if (!(h > 0.0)) throw std::invalid_argument("brownian_increment: h must be > 0");
  return rng.gaussian_vector(dim, std::sqrt(h));
}

double sine_wiener_value(double b, double tau_a) {
  if (!(tau_a > 0.0)) throw std::invalid_argument("sine_wiener_value: tau_a must be > 0");
  return std::sin(std::sqrt(2.0 / tau_a) * b);
}

namespace {

double reflect_into_domain(double z, SafeguardStats* stats) {
  const double lim = 1.0 - kBoundaryEps;
  if (z > lim) {
    z = 2.0 * lim - z;
    if (stats) ++stats->reflections;
  } else if (z < -lim) {
    z = -2.0 * lim - z;
    if (stats) ++stats->reflections;
  }
  if (z > lim || z < -lim) {
    throw std::runtime_error("bounded noise left (-1,1) even after reflection");
  }
  return z;
}

double euler_step(const NoiseModel& m, double z, double h, double xi, SafeguardStats* stats) {
  if (!(z > -1.0 && z < 1.0)) {
    throw std::domain_error("bounded noise step: state outside (-1,1)");
  }
  if (stats) ++stats->steps;
  double drift = m.drift(z);
  if (m.tag == NoiseTag::tsb || m.tag == NoiseTag::ks) {
    // taming: the singular restoring drift would otherwise catapult a state
    // that a reflection just placed near the boundary across the domain
    drift /= 1.0 + h * std::abs(drift);
  }
  const double znew = z + drift * h + m.diffusion(z) * std::sqrt(h) * xi;
  return reflect_into_domain(znew, stats);
}

}  // namespace

double dcl_step_xi(double z, double h, double gamma, double theta, double xi,
                   SafeguardStats* stats) {
  return euler_step(NoiseModel::dcl(gamma, theta), z, h, xi, stats);
}
double dcl_step(double z, double h, double gamma, double theta, RngStream& rng,
                SafeguardStats* stats) {
  return dcl_step_xi(z, h, gamma, theta, rng.gaussian(), stats);
}

double tsb_step_xi(double z, double h, double theta, double q, double xi,
                   SafeguardStats* stats) {
  return euler_step(NoiseModel::tsb(theta, q), z, h, xi, stats);
}
double tsb_step(double z, double h, double theta, double q, RngStream& rng,
                SafeguardStats* stats) {
  return tsb_step_xi(z, h, theta, q, rng.gaussian(), stats);
}

double ks_step_xi(double z, double h, double theta, double gamma, double xi,
                  SafeguardStats* stats) {
  return euler_step(NoiseModel::ks(theta, gamma), z, h, xi, stats);
}
double ks_step(double z, double h, double theta, double gamma, RngStream& rng,
               SafeguardStats* stats) {
  return ks_step_xi(z, h, theta, gamma, rng.gaussian(), stats);
}

BoundedNoiseState::BoundedNoiseState(const NoiseModel& model, int dim)
    : model_(model), state_(Vec::Zero(dim)), value_(Vec::Zero(dim)) {
  if (!model.bounded()) {
    throw std::invalid_argument("BoundedNoiseState requires a bounded noise model");
  }
}

void BoundedNoiseState::step(double h, RngStream& rng, SafeguardStats& stats) {
  const int d = static_cast<int>(state_.size());
  if (model_.tag == NoiseTag::sine_wiener) {
    const double lim = 1.0 - kBoundaryEps;
    for (int i = 0; i < d; ++i) {
      ++stats.steps;
      state_[i] += std::sqrt(h) * rng.gaussian();
      double z = sine_wiener_value(state_[i], model_.tau_a);
      if (z > lim) {
        z = lim;
        ++stats.reflections;
      } else if (z < -lim) {
        z = -lim;
        ++stats.reflections;
      }
      value_[i] = z;
    }
    return;
  }
  for (int i = 0; i < d; ++i) {
    state_[i] = euler_step(model_, state_[i], h, rng.gaussian(), &stats);
    value_[i] = state_[i];
  }
}

}  // namespace shhlab
