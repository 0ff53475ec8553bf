// Copyright 2026 The shhlab Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "shhlab/integrate.hpp"

namespace shhlab {

using SdeVariant = std::variant<ControlledSde, AugmentedSde>;

struct EnsembleConfig {
  int n_paths = 4096;
  std::uint64_t master_seed = 0;
  int threads = 0;  // 0 = hardware concurrency
  std::vector<double> sup_thresholds;
  double window_fraction = 0.2;  // final fraction of the horizon used for verdicts
  int max_stored_paths = 4;
  double max_divergent_fraction = 0.01;
};

/// Thrown when more than the allowed fraction of paths diverges.
class EnsembleDivergenceError : public std::runtime_error {
 public:
  EnsembleDivergenceError(int diverged, int total)
      : std::runtime_error("ensemble failed: " + std::to_string(diverged) + " of " +
                           std::to_string(total) + " paths diverged"),
        n_diverged(diverged),
        n_paths(total) {}
  int n_diverged;
  int n_paths;
};

/// Per-substep statistics over a seeded family of sample paths. Divergent
/// paths are excluded from every statistic and counted in n_diverged.
struct TrajectoryEnsemble {
  std::vector<double> times;
  std::vector<double> mean_norm, se_norm;  // E||X_t|| and its standard error
  std::vector<double> mean_sq, se_sq;      // E||X_t||^2
  std::vector<Vec> mean_state, se_state;   // component-wise mean of X_t
  std::vector<double> sup_thresholds;
  // fraction of paths whose running sup of ||X|| exceeded the threshold by time t
  std::vector<std::vector<double>> sup_exceed_frac;  // [threshold][time]
  int n_paths = 0;
  int n_valid = 0;
  int n_diverged = 0;
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> path_seeds;
  std::vector<Trajectory> sample_paths;

  // windowed statistics: per-path time averages over the final window,
  // then mean / standard error across paths
  double window_fraction = 0.2;
  double window_start_time = 0.0;
  double windowed_mean_norm = 0.0, windowed_se_norm = 0.0;
  double windowed_mean_sq = 0.0, windowed_se_sq = 0.0;

  double horizon() const { return times.empty() ? 0.0 : times.back(); }
  void write_csv(std::ostream& os) const;
};

TrajectoryEnsemble run_ensemble(const SdeVariant& system, const MarkovPolicy& policy,
                                const SampleHoldConfig& config, const EnsembleConfig& ens);

enum class VerdictState { pass, fail, inconclusive };
std::string to_string(VerdictState s);

struct Verdict {
  std::string name;
  VerdictState state = VerdictState::inconclusive;
  double observed = 0.0;
  double target = 0.0;
  double tolerance = 0.0;  // the 3-standard-error allowance actually applied
  double reach_time = -1.0;  // first time the mean statistic entered the target (-1: never)
  std::string detail;
};

/// limsup E||X_t|| <= r v rho, decided on the final window:
/// pass if the windowed mean is at or below the target, inconclusive if it
/// exceeds the target by at most 3 standard errors, fail beyond that.
Verdict verdict_convergence_in_mean(const TrajectoryEnsemble& ens, double r, double rho);

/// Mean-square variant; targets are squared radii.
Verdict verdict_mean_square(const TrajectoryEnsemble& ens, double r_sq, double rho_sq);

/// Fraction of paths with running sup <= c_threshold must reach 1 - eps
/// (minus 3 binomial standard errors before it counts as a failure).
Verdict verdict_stability_in_probability(const TrajectoryEnsemble& ens, double eps,
                                         double c_threshold);

/// First time the mean-norm curve enters the target ball (-1 if never).
double reach_time(const TrajectoryEnsemble& ens, double target);

struct ContainmentCheck {
  bool holds = true;
  double first_violation_time = -1.0;
};

/// Once the mean-norm curve enters the target it must never exit by more
/// than 3 standard errors for the rest of the horizon.
ContainmentCheck monotone_containment(const TrajectoryEnsemble& ens, double target);

struct SweepRow {
  double delta = 0.0;
  double substep = 0.0;
  double windowed_mean_norm = 0.0;
  double windowed_se_norm = 0.0;
  double reach_time = -1.0;
  VerdictState verdict = VerdictState::inconclusive;
};

struct SweepTable {
  std::vector<SweepRow> rows;  // sorted by decreasing delta
  bool plateau = false;
  double plateau_improvement = 0.0;  // relative gain from the second-smallest to smallest delta
  double plateau_level = 0.0;        // windowed mean at the smallest delta
  void write_csv(std::ostream& os) const;
};

/// Runs one ensemble per delta (substeps per hold kept fixed) and flags a
/// plateau when halving the smallest delta improves the final windowed mean
/// norm by less than 20%.
SweepTable delta_sweep(const SdeVariant& system, const MarkovPolicy& policy,
                       const SampleHoldConfig& base, const EnsembleConfig& ens,
                       const std::vector<double>& deltas, int substeps_per_hold, double r,
                       double rho);

}  // namespace shhlab
