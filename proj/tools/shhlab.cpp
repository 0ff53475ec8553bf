// Copyright 2026 The shhlab Authors
// SPDX-License-Identifier: Apache-2.0
//
// shhlab: sample-and-hold stochastic stabilization laboratory.
//
// Subcommands:
//   params    compute the Theorem-1 constant ledger for a benchmark
//   simulate  integrate one seeded sample path
//   ensemble  Monte Carlo ensemble with convergence/stability verdicts
//   sweep     sampling-time sweep with plateau detection
//
// Exit codes: 0 all verdicts pass, 2 verdict failure, 3 inconclusive,
//             4 config error, 5 numerical divergence.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "shhlab/config.hpp"
#include "shhlab/csv.hpp"

namespace {

using namespace shhlab;

constexpr int kExitPass = 0;
constexpr int kExitInternal = 1;
constexpr int kExitVerdictFail = 2;
constexpr int kExitInconclusive = 3;
constexpr int kExitConfig = 4;
constexpr int kExitDiverged = 5;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;  // overrides config
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
};

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

RunConfig load_config(const CommonArgs& args) {
  RunConfig cfg = RunConfig::from_file(args.config_path);
  if (args.seed_set) cfg.master_seed = args.seed;
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  return cfg;
}

void emit(RunManifest& manifest, const std::string& out_dir, const std::string& name,
          const std::string& content) {
  const std::string path = (std::filesystem::path(out_dir) / name).string();
  write_file(path, content);
  manifest.outputs.push_back({path, content.size(), fnv1a64_hex(content)});
}

void finish(RunManifest& manifest, const std::string& out_dir, const Timer& timer) {
  manifest.wall_seconds = timer.seconds();
  const std::string path = (std::filesystem::path(out_dir) / "manifest.json").string();
  write_file(path, manifest.to_json_text());
}

int exit_code_from(const std::vector<Verdict>& verdicts) {
  bool inconclusive = false;
  for (const Verdict& v : verdicts) {
    if (v.state == VerdictState::fail) return kExitVerdictFail;
    if (v.state == VerdictState::inconclusive) inconclusive = true;
  }
  return inconclusive ? kExitInconclusive : kExitPass;
}

int cmd_params(const CommonArgs& args) {
  Timer timer;
  RunConfig cfg = load_config(args);
  ResolvedRun run = resolve(cfg);
  if (!run.bench.pair) {
    std::cerr << "params: benchmark '" << run.bench.name
              << "' has no smooth Lyapunov pair\n";
    return kExitConfig;
  }
  RunManifest manifest;
  manifest.command = "params";
  manifest.seed = cfg.master_seed;
  manifest.threads = args.threads;
  manifest.config = cfg;
  try {
    const StabilizationParameters p =
        compute_settings(*run.bench.pair, run.bench.system, run.r, run.R, cfg.grid);
    manifest.parameters = p;
    emit(manifest, cfg.out_dir, "params.txt", p.report());
    finish(manifest, cfg.out_dir, timer);
    std::cout << p.report();
    return kExitPass;
  } catch (const InfeasibleSettingsError& e) {
    std::cerr << "params: infeasible settings: " << e.what() << "\n  witness: [";
    for (int i = 0; i < e.witness.size(); ++i) {
      std::cerr << (i ? ", " : "") << format_full(e.witness[i]);
    }
    std::cerr << "]\n";
    finish(manifest, cfg.out_dir, timer);
    return kExitVerdictFail;
  }
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream os;
  const int n = static_cast<int>(traj.states.front().size());
  const int m = traj.controls.empty() ? 0 : static_cast<int>(traj.controls.front().size());
  const int d = traj.noise_states.empty()
                    ? 0
                    : static_cast<int>(traj.noise_states.front().size());
  os << "t";
  for (int i = 0; i < n; ++i) os << ",x" << i;
  for (int i = 0; i < m; ++i) os << ",u" << i;
  for (int i = 0; i < d; ++i) os << ",z" << i;
  os << "\n";
  for (std::size_t j = 0; j < traj.times.size(); ++j) {
    os << format_full(traj.times[j]);
    for (int i = 0; i < n; ++i) os << "," << format_full(traj.states[j][i]);
    const Vec& u = traj.control_at_time_index(static_cast<int>(j));
    for (int i = 0; i < m; ++i) os << "," << format_full(u[i]);
    if (d > 0) {
      for (int i = 0; i < d; ++i) os << "," << format_full(traj.noise_states[j][i]);
    }
    os << "\n";
  }
  return os.str();
}

int cmd_simulate(const CommonArgs& args) {
  Timer timer;
  RunConfig cfg = load_config(args);
  ResolvedRun run = resolve(cfg);
  RunManifest manifest;
  manifest.command = "simulate";
  manifest.seed = cfg.master_seed;
  manifest.threads = args.threads;
  manifest.config = cfg;
  RngStream rng(cfg.master_seed);
  Trajectory traj;
  if (std::holds_alternative<ControlledSde>(run.system)) {
    traj = simulate_sample_hold(std::get<ControlledSde>(run.system), run.policy, run.hold,
                                rng);
  } else {
    traj = simulate_augmented(std::get<AugmentedSde>(run.system), run.policy, run.hold, rng);
  }
  emit(manifest, cfg.out_dir, "trajectory.csv", trajectory_csv(traj));
  finish(manifest, cfg.out_dir, timer);
  std::cout << "simulate: " << traj.times.size() << " substep states, "
            << traj.controls.size() << " hold intervals\n";
  return kExitPass;
}

int cmd_ensemble(const CommonArgs& args) {
  Timer timer;
  RunConfig cfg = load_config(args);
  ResolvedRun run = resolve(cfg);
  RunManifest manifest;
  manifest.command = "ensemble";
  manifest.seed = cfg.master_seed;
  manifest.threads = args.threads;

  double rho = 0.0;
  std::optional<StabilizationParameters> params;
  if (run.bench.pair) {
    params = compute_settings(*run.bench.pair, run.bench.system, run.r, run.R, cfg.grid);
    rho = params->rho;
    for (double eps : {0.1, 0.2}) {
      const double c = params->R_star / eps;
      bool present = false;
      for (double t : run.ensemble.sup_thresholds) {
        if (std::abs(t - c) <= 1e-12 * c) present = true;
      }
      if (!present) run.ensemble.sup_thresholds.push_back(c);
    }
    cfg.sup_thresholds = run.ensemble.sup_thresholds;  // echo resolved thresholds
  }
  manifest.config = cfg;
  manifest.parameters = params;

  run.ensemble.threads = args.threads;
  const TrajectoryEnsemble ens = run_ensemble(run.system, run.policy, run.hold, run.ensemble);

  manifest.verdicts.push_back(verdict_convergence_in_mean(ens, run.r, rho));
  const double target = std::max(run.r, rho);
  manifest.verdicts.push_back(verdict_mean_square(ens, run.r * run.r, target * target));
  if (params) {
    for (double eps : {0.1, 0.2}) {
      manifest.verdicts.push_back(
          verdict_stability_in_probability(ens, eps, params->R_star / eps));
    }
  }

  std::ostringstream stats;
  ens.write_csv(stats);
  emit(manifest, cfg.out_dir, "stats.csv", stats.str());
  finish(manifest, cfg.out_dir, timer);
  for (const Verdict& v : manifest.verdicts) {
    std::cout << v.name << ": " << to_string(v.state) << " (observed "
              << format_full(v.observed) << ", target " << format_full(v.target)
              << ", tolerance " << format_full(v.tolerance) << ")\n";
  }
  std::cout << "diverged paths: " << ens.n_diverged << " / " << ens.n_paths << "\n";
  return exit_code_from(manifest.verdicts);
}

int cmd_sweep(const CommonArgs& args, std::vector<double> deltas) {
  Timer timer;
  RunConfig cfg = load_config(args);
  if (!deltas.empty()) cfg.sweep_deltas = deltas;
  if (cfg.sweep_deltas.empty()) {
    std::cerr << "sweep: no deltas given (config sweep.deltas or --deltas)\n";
    return kExitConfig;
  }
  ResolvedRun run = resolve(cfg);
  RunManifest manifest;
  manifest.command = "sweep";
  manifest.seed = cfg.master_seed;
  manifest.threads = args.threads;
  manifest.config = cfg;

  double rho = 0.0;
  if (run.bench.pair) {
    const StabilizationParameters p =
        compute_settings(*run.bench.pair, run.bench.system, run.r, run.R, cfg.grid);
    manifest.parameters = p;
    rho = p.rho;
  }
  run.ensemble.threads = args.threads;
  const SweepTable table = delta_sweep(run.system, run.policy, run.hold, run.ensemble,
                                       cfg.sweep_deltas, cfg.substeps_per_hold, run.r, rho);
  std::ostringstream os;
  table.write_csv(os);
  emit(manifest, cfg.out_dir, "sweep.csv", os.str());
  Verdict plateau;
  plateau.name = "delta_plateau";
  plateau.state = table.plateau ? VerdictState::pass : VerdictState::fail;
  plateau.observed = table.plateau_improvement;
  plateau.target = 0.2;
  plateau.detail = "relative improvement from halving the smallest delta";
  manifest.verdicts.push_back(plateau);
  finish(manifest, cfg.out_dir, timer);
  std::cout << os.str();
  std::cout << "plateau: " << (table.plateau ? "yes" : "no") << " (improvement "
            << format_full(table.plateau_improvement) << ")\n";
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sample-and-hold stochastic stabilization laboratory"};
  app.require_subcommand(1);

  CommonArgs args;
  std::vector<double> sweep_deltas;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", args.config_path, "run configuration (JSON)")
        ->required();
    cmd->add_option("--out", args.out_dir, "output directory (overrides config)");
    cmd->add_option("--seed", args.seed, "master seed (overrides config)")
        ->each([&](const std::string&) { args.seed_set = true; });
    cmd->add_option("--threads", args.threads, "worker threads, 0 = auto")
        ->envname("SHHLAB_THREADS");
  };

  CLI::App* params = app.add_subcommand("params", "compute the stabilization ledger");
  add_common(params);
  CLI::App* simulate = app.add_subcommand("simulate", "integrate one sample path");
  add_common(simulate);
  CLI::App* ensemble = app.add_subcommand("ensemble", "Monte Carlo ensemble + verdicts");
  add_common(ensemble);
  CLI::App* sweep = app.add_subcommand("sweep", "sampling-time sweep");
  add_common(sweep);
  sweep->add_option("--deltas", sweep_deltas, "sampling times to sweep");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitPass : kExitConfig;
  }

  try {
    if (params->parsed()) return cmd_params(args);
    if (simulate->parsed()) return cmd_simulate(args);
    if (ensemble->parsed()) return cmd_ensemble(args);
    if (sweep->parsed()) return cmd_sweep(args, sweep_deltas);
  } catch (const shhlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const shhlab::EnsembleDivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return kExitDiverged;
  } catch (const shhlab::IntegrationDivergedError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return kExitDiverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitConfig;
}
