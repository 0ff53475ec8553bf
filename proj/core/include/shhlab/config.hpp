// Copyright 2026 The shhlab Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shhlab/bench_systems.hpp"
#include "shhlab/settings.hpp"

namespace shhlab {

inline constexpr const char* kVersion = "0.1.0";

/// Configuration problems carry exit code 4 at the CLI.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct OuSpec {
  int n = 1;
  double a = 1.0;
  double k = 0.0;
  double sigma0 = 0.1;
};

struct LinearSpec {  // inline system dX = (A x + B u) dt + sigma0 dB, builtin mu = 0
  Mat A, B;
  double sigma0 = 0.0;
};

struct RobotSpec {  // nonholonomic benchmark knobs
  double sigma0 = 0.05;
};

struct PolicySpec {
  enum class Type { builtin, inf_conv, zero };
  Type type = Type::builtin;
  double beta = 0.1;
  int control_grid = 41;
  // pivot f at the measured state; false selects the literal subgradient
  // pivot of the inf-convolution control law
  bool pivot_at_state = true;
  double solver_tol = 1e-8;
};

/// One run, schema-validated; unknown keys are rejected.
struct RunConfig {
  std::string benchmark = "ou";  // ou | nonholonomic | linear
  OuSpec ou;
  LinearSpec linear;
  RobotSpec robot;
  NoiseModel noise = NoiseModel::brownian();
  PolicySpec policy;
  double delta = 0.1;
  int substeps_per_hold = 16;
  std::optional<double> substep;  // overrides substeps_per_hold when set
  double horizon = 1.0;
  std::optional<Vec> x0;  // default: benchmark's default_x0
  double r = 0.0, R = 0.0;  // 0: benchmark defaults
  int n_paths = 4096;
  std::uint64_t master_seed = 0;
  double window_fraction = 0.2;
  std::vector<double> sup_thresholds;
  int max_stored_paths = 4;
  std::vector<double> sweep_deltas;
  GridSpec grid;
  std::string out_dir = "out";

  static RunConfig from_json_text(const std::string& text);
  static RunConfig from_file(const std::string& path);
  std::string to_json_text() const;  // resolved echo, embedded in manifests
};

/// Everything resolved and ready to simulate.
struct ResolvedRun {
  Benchmark bench;
  SdeVariant system;
  MarkovPolicy policy;
  SampleHoldConfig hold;
  EnsembleConfig ensemble;
  double r = 0.0, R = 0.0;
};

ResolvedRun resolve(const RunConfig& cfg);

struct OutputRecord {
  std::string path;
  std::size_t bytes = 0;
  std::string fnv1a64;
};

/// Run manifest: the config echo plus everything needed to audit the run.
/// Feeding a manifest back through --config reproduces the run bit-exactly.
struct RunManifest {
  std::string command;
  std::uint64_t seed = 0;
  int threads = 0;
  RunConfig config;
  std::optional<StabilizationParameters> parameters;
  std::vector<Verdict> verdicts;
  std::vector<OutputRecord> outputs;
  double wall_seconds = 0.0;

  std::string to_json_text() const;
};

std::string parameters_json_text(const StabilizationParameters& p);

}  // namespace shhlab
