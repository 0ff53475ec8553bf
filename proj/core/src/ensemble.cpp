// Copyright 2026 The shhlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "shhlab/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <ostream>
#include <thread>

#include "shhlab/csv.hpp"
#include "shhlab/detail/stepper.hpp"

namespace shhlab {

namespace {

constexpr int kChunkSize = 32;  // fixed so results do not depend on thread count

// Reference statistics of one designated path; all accumulation happens in
// deviations from it, so a deterministic ensemble reports exactly zero
// standard errors instead of cancellation noise.
struct ShiftPath {
  std::vector<double> norm, sq;
  Mat state;  // n x times
  double win_a = 0.0, win_b = 0.0;
  bool valid = false;
};

struct ChunkAccum {
  std::vector<double> n1, n2;           // centered sums: d, d^2 for d = ||x|| - shift
  std::vector<double> q1, q2;           // centered sums for ||x||^2 - shift
  Mat sx, sx2;                          // centered component sums (n x times)
  std::vector<std::vector<double>> exceed;  // [threshold][time]
  double win_a = 0, win_a2 = 0, win_b = 0, win_b2 = 0;  // windowed per-path aggregates
  int diverged = 0;
  int valid = 0;

  void init(int n, int times, int thresholds) {
    n1.assign(times, 0.0);
    n2.assign(times, 0.0);
    q1.assign(times, 0.0);
    q2.assign(times, 0.0);
    sx = Mat::Zero(n, times);
    sx2 = Mat::Zero(n, times);
    exceed.assign(thresholds, std::vector<double>(times, 0.0));
  }
};

// Fills flat per-path buffers; the chunk worker folds them into sums so a
// diverged path never contaminates the accumulators.
struct BufferRecorder {
  Mat* states;  // n x times
  void on_state(int j, double, const Vec& x, const Vec*) { states->col(j) = x; }
  void on_control(int, const Vec&) {}
};

struct PathRunner {
  const SdeVariant* system;
  const MarkovPolicy* policy;
  const SampleHoldConfig* config;

  void run(std::uint64_t seed, BufferRecorder& rec) const {
    RngStream rng(seed);
    if (std::holds_alternative<ControlledSde>(*system)) {
      detail::run_sample_hold(std::get<ControlledSde>(*system), *policy, *config, rng, rec);
    } else {
      SafeguardStats stats;
      detail::run_augmented(std::get<AugmentedSde>(*system), *policy, *config, rng, rec,
                            stats);
    }
  }
};

}  // namespace

TrajectoryEnsemble run_ensemble(const SdeVariant& system, const MarkovPolicy& policy,
                                const SampleHoldConfig& config, const EnsembleConfig& ens) {
  if (ens.n_paths < 2) throw std::invalid_argument("run_ensemble: need at least 2 paths");
  config.validate();
  const int n = std::holds_alternative<ControlledSde>(system)
                    ? std::get<ControlledSde>(system).state_dim
                    : std::get<AugmentedSde>(system).plant.state_dim;
  const int n_times = config.hold_count() * config.substeps_per_hold() + 1;
  const int n_thr = static_cast<int>(ens.sup_thresholds.size());
  const int n_chunks = (ens.n_paths + kChunkSize - 1) / kChunkSize;
  const int win_start =
      std::max(0, n_times - 1 - static_cast<int>(std::floor(
                                    ens.window_fraction * (n_times - 1) + 0.5)));

  TrajectoryEnsemble out;
  out.n_paths = ens.n_paths;
  out.master_seed = ens.master_seed;
  out.sup_thresholds = ens.sup_thresholds;
  out.window_fraction = ens.window_fraction;
  out.times.resize(n_times);
  for (int j = 0; j < n_times; ++j) out.times[j] = j * config.substep;
  out.window_start_time = out.times[win_start];
  out.path_seeds.resize(ens.n_paths);
  for (int i = 0; i < ens.n_paths; ++i) {
    out.path_seeds[i] = RngStream::derive_seed(ens.master_seed, i);
  }

  PathRunner runner{&system, &policy, &config};

  // Reference pass: path 0 defines the centering shift.
  ShiftPath shift;
  shift.norm.assign(n_times, 0.0);
  shift.sq.assign(n_times, 0.0);
  shift.state = Mat::Zero(n, n_times);
  {
    Mat buf(n, n_times);
    BufferRecorder rec{&buf};
    try {
      runner.run(out.path_seeds[0], rec);
      double win_sum = 0.0, win_sum_sq = 0.0;
      for (int j = 0; j < n_times; ++j) {
        shift.norm[j] = buf.col(j).norm();
        shift.sq[j] = shift.norm[j] * shift.norm[j];
        shift.state.col(j) = buf.col(j);
        if (j >= win_start) {
          win_sum += shift.norm[j];
          win_sum_sq += shift.sq[j];
        }
      }
      const double w = n_times - win_start;
      shift.win_a = win_sum / w;
      shift.win_b = win_sum_sq / w;
      shift.valid = true;
    } catch (const IntegrationDivergedError&) {
      // keep zero shifts; the divergence is counted in the main pass
    }
  }

  std::vector<ChunkAccum> chunks(n_chunks);
  std::atomic<int> next_chunk{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    Mat buf(n, n_times);
    BufferRecorder rec{&buf};
    try {
      for (;;) {
        const int c = next_chunk.fetch_add(1);
        if (c >= n_chunks) break;
        ChunkAccum& acc = chunks[c];
        acc.init(n, n_times, n_thr);
        const int begin = c * kChunkSize;
        const int end = std::min(ens.n_paths, begin + kChunkSize);
        for (int i = begin; i < end; ++i) {
          try {
            runner.run(out.path_seeds[i], rec);
          } catch (const IntegrationDivergedError&) {
            ++acc.diverged;
            continue;
          }
          ++acc.valid;
          double win_sum = 0.0, win_sum_sq = 0.0;
          double run_sup = 0.0;
          for (int j = 0; j < n_times; ++j) {
            const double norm = buf.col(j).norm();
            const double sq = norm * norm;
            const double dn = norm - shift.norm[j];
            const double dq = sq - shift.sq[j];
            acc.n1[j] += dn;
            acc.n2[j] += dn * dn;
            acc.q1[j] += dq;
            acc.q2[j] += dq * dq;
            acc.sx.col(j) += buf.col(j) - shift.state.col(j);
            acc.sx2.col(j) += (buf.col(j) - shift.state.col(j)).cwiseAbs2();
            run_sup = std::max(run_sup, norm);
            for (int t = 0; t < n_thr; ++t) {
              if (run_sup > ens.sup_thresholds[t]) acc.exceed[t][j] += 1.0;
            }
            if (j >= win_start) {
              win_sum += norm;
              win_sum_sq += sq;
            }
          }
          const double w = n_times - win_start;
          const double a = win_sum / w - shift.win_a;
          const double b = win_sum_sq / w - shift.win_b;
          acc.win_a += a;
          acc.win_a2 += a * a;
          acc.win_b += b;
          acc.win_b2 += b * b;
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  };

  int threads = ens.threads > 0 ? ens.threads
                                : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, n_chunks));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  // Deterministic merge in chunk order.
  ChunkAccum total;
  total.init(n, n_times, n_thr);
  for (const ChunkAccum& c : chunks) {
    for (int j = 0; j < n_times; ++j) {
      total.n1[j] += c.n1[j];
      total.n2[j] += c.n2[j];
      total.q1[j] += c.q1[j];
      total.q2[j] += c.q2[j];
    }
    total.sx += c.sx;
    total.sx2 += c.sx2;
    for (int t = 0; t < n_thr; ++t) {
      for (int j = 0; j < n_times; ++j) total.exceed[t][j] += c.exceed[t][j];
    }
    total.win_a += c.win_a;
    total.win_a2 += c.win_a2;
    total.win_b += c.win_b;
    total.win_b2 += c.win_b2;
    total.diverged += c.diverged;
    total.valid += c.valid;
  }

  out.n_diverged = total.diverged;
  out.n_valid = total.valid;
  if (total.diverged > ens.max_divergent_fraction * ens.n_paths || total.valid < 2) {
    throw EnsembleDivergenceError(total.diverged, ens.n_paths);
  }
  const double nv = total.valid;
  // centered moments: mean(x) = shift + mean(d), var(x) = var(d)
  auto se_from = [&](double sum_d, double sum_d2) {
    const double mean_d = sum_d / nv;
    const double var = std::max(0.0, (sum_d2 / nv - mean_d * mean_d) * nv / (nv - 1.0));
    return std::sqrt(var / nv);
  };
  out.mean_norm.resize(n_times);
  out.se_norm.resize(n_times);
  out.mean_sq.resize(n_times);
  out.se_sq.resize(n_times);
  out.mean_state.resize(n_times);
  out.se_state.resize(n_times);
  out.sup_exceed_frac.assign(n_thr, std::vector<double>(n_times, 0.0));
  for (int j = 0; j < n_times; ++j) {
    out.mean_norm[j] = shift.norm[j] + total.n1[j] / nv;
    out.se_norm[j] = se_from(total.n1[j], total.n2[j]);
    out.mean_sq[j] = shift.sq[j] + total.q1[j] / nv;
    out.se_sq[j] = se_from(total.q1[j], total.q2[j]);
    out.mean_state[j] = shift.state.col(j) + total.sx.col(j) / nv;
    Vec se(n);
    for (int i = 0; i < n; ++i) {
      se[i] = se_from(total.sx(i, j), total.sx2(i, j));
    }
    out.se_state[j] = se;
    for (int t = 0; t < n_thr; ++t) out.sup_exceed_frac[t][j] = total.exceed[t][j] / nv;
  }
  out.windowed_mean_norm = shift.win_a + total.win_a / nv;
  out.windowed_se_norm = se_from(total.win_a, total.win_a2);
  out.windowed_mean_sq = shift.win_b + total.win_b / nv;
  out.windowed_se_sq = se_from(total.win_b, total.win_b2);

  // Keep a few full sample paths for inspection (re-simulated, same seeds).
  const int stored = std::min(ens.max_stored_paths, ens.n_paths);
  for (int i = 0; i < stored; ++i) {
    RngStream rng(out.path_seeds[i]);
    try {
      if (std::holds_alternative<ControlledSde>(system)) {
        out.sample_paths.push_back(
            simulate_sample_hold(std::get<ControlledSde>(system), policy, config, rng));
      } else {
        out.sample_paths.push_back(
            simulate_augmented(std::get<AugmentedSde>(system), policy, config, rng));
      }
    } catch (const IntegrationDivergedError&) {
      break;  // already counted in the statistics pass
    }
  }
  return out;
}

void TrajectoryEnsemble::write_csv(std::ostream& os) const {
  os << "t,mean_norm,se_norm,mean_sq,se_sq";
  for (double c : sup_thresholds) os << ",sup_exceed_frac@" << format_full(c);
  os << "\n";
  for (std::size_t j = 0; j < times.size(); ++j) {
    os << format_full(times[j]) << "," << format_full(mean_norm[j]) << ","
       << format_full(se_norm[j]) << "," << format_full(mean_sq[j]) << ","
       << format_full(se_sq[j]);
    for (std::size_t t = 0; t < sup_thresholds.size(); ++t) {
      os << "," << format_full(sup_exceed_frac[t][j]);
    }
    os << "\n";
  }
}

std::string to_string(VerdictState s) {
  switch (s) {
    case VerdictState::pass: return "pass";
    case VerdictState::fail: return "fail";
    case VerdictState::inconclusive: return "inconclusive";
  }
  return "?";
}

double reach_time(const TrajectoryEnsemble& ens, double target) {
  for (std::size_t j = 0; j < ens.times.size(); ++j) {
    if (ens.mean_norm[j] <= target) return ens.times[j];
  }
  return -1.0;
}

namespace {

Verdict windowed_verdict(std::string name, double observed, double target, double se,
                         double reach) {
  Verdict v;
  v.name = std::move(name);
  v.observed = observed;
  v.target = target;
  v.tolerance = 3.0 * se;
  v.reach_time = reach;
  if (observed <= target) {
    v.state = VerdictState::pass;
  } else if (observed <= target + v.tolerance) {
    v.state = VerdictState::inconclusive;
    v.detail = "within 3 standard errors of the target";
  } else {
    v.state = VerdictState::fail;
  }
  return v;
}

}  // namespace

Verdict verdict_convergence_in_mean(const TrajectoryEnsemble& ens, double r, double rho) {
  const double target = std::max(r, rho);
  return windowed_verdict("convergence_in_mean", ens.windowed_mean_norm, target,
                          ens.windowed_se_norm, reach_time(ens, target));
}

Verdict verdict_mean_square(const TrajectoryEnsemble& ens, double r_sq, double rho_sq) {
  const double target = std::max(r_sq, rho_sq);
  double reach = -1.0;
  for (std::size_t j = 0; j < ens.times.size(); ++j) {
    if (ens.mean_sq[j] <= target) {
      reach = ens.times[j];
      break;
    }
  }
  return windowed_verdict("mean_square", ens.windowed_mean_sq, target, ens.windowed_se_sq,
                          reach);
}

Verdict verdict_stability_in_probability(const TrajectoryEnsemble& ens, double eps,
                                         double c_threshold) {
  int idx = -1;
  for (std::size_t t = 0; t < ens.sup_thresholds.size(); ++t) {
    if (std::abs(ens.sup_thresholds[t] - c_threshold) <= 1e-12 * std::max(1.0, c_threshold)) {
      idx = static_cast<int>(t);
    }
  }
  if (idx < 0) {
    throw std::invalid_argument("verdict_stability_in_probability: threshold not tracked");
  }
  const double frac_below = 1.0 - ens.sup_exceed_frac[idx].back();
  const double target = 1.0 - eps;
  const double se = std::sqrt(std::max(frac_below * (1.0 - frac_below), 0.0) / ens.n_valid);
  Verdict v;
  v.name = "stability_in_probability";
  v.observed = frac_below;
  v.target = target;
  v.tolerance = 3.0 * se;
  if (frac_below >= target) {
    v.state = VerdictState::pass;
  } else if (frac_below >= target - v.tolerance) {
    v.state = VerdictState::inconclusive;
    v.detail = "within 3 binomial standard errors of the bound";
  } else {
    v.state = VerdictState::fail;
  }
  return v;
}

ContainmentCheck monotone_containment(const TrajectoryEnsemble& ens, double target) {
  ContainmentCheck c;
  std::size_t j0 = ens.times.size();
  for (std::size_t j = 0; j < ens.times.size(); ++j) {
    if (ens.mean_norm[j] <= target) {
      j0 = j;
      break;
    }
  }
  for (std::size_t j = j0; j < ens.times.size(); ++j) {
    if (ens.mean_norm[j] > target + 3.0 * ens.se_norm[j]) {
      c.holds = false;
      c.first_violation_time = ens.times[j];
      break;
    }
  }
  return c;
}

SweepTable delta_sweep(const SdeVariant& system, const MarkovPolicy& policy,
                       const SampleHoldConfig& base, const EnsembleConfig& ens,
                       const std::vector<double>& deltas, int substeps_per_hold, double r,
                       double rho) {
  if (deltas.empty()) throw std::invalid_argument("delta_sweep: empty delta list");
  std::vector<double> sorted = deltas;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());

  SweepTable table;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    SampleHoldConfig cfg = base;
    cfg.delta = sorted[i];
    cfg.substep = sorted[i] / substeps_per_hold;
    EnsembleConfig e = ens;
    e.master_seed = RngStream::derive_seed(ens.master_seed, 0x5eed0000ULL + i);
    const TrajectoryEnsemble run = run_ensemble(system, policy, cfg, e);
    const Verdict v = verdict_convergence_in_mean(run, r, rho);
    table.rows.push_back({cfg.delta, cfg.substep, run.windowed_mean_norm,
                          run.windowed_se_norm, v.reach_time, v.state});
  }
  if (table.rows.size() >= 2) {
    const SweepRow& smallest = table.rows.back();
    const SweepRow& second = table.rows[table.rows.size() - 2];
    const double denom = std::max(std::abs(second.windowed_mean_norm), 1e-300);
    table.plateau_improvement =
        (second.windowed_mean_norm - smallest.windowed_mean_norm) / denom;
    table.plateau = table.plateau_improvement < 0.2;
    table.plateau_level = smallest.windowed_mean_norm;
  }
  return table;
}

void SweepTable::write_csv(std::ostream& os) const {
  os << "delta,substep,windowed_mean_norm,windowed_se_norm,reach_time,verdict\n";
  for (const SweepRow& row : rows) {
    os << format_full(row.delta) << "," << format_full(row.substep) << ","
       << format_full(row.windowed_mean_norm) << "," << format_full(row.windowed_se_norm)
       << "," << format_full(row.reach_time) << "," << to_string(row.verdict) << "\n";
  }
}

}  // namespace shhlab
