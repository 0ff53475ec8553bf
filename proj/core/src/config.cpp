// Copyright 2026 The shhlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "shhlab/config.hpp"

#include <json.hpp>

#include "shhlab/csv.hpp"

namespace shhlab {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const char* context,
                    std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(std::string(context) + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + context);
  }
}

double need_number(const json& j, const char* key, const char* ctx) {
  if (!j.at(key).is_number()) {
    throw ConfigError(std::string(ctx) + "." + key + " must be a number");
  }
  return j.at(key).get<double>();
}

double opt_number(const json& j, const char* key, double def, const char* ctx) {
  if (!j.contains(key)) return def;
  return need_number(j, key, ctx);
}

double positive(double v, const char* what) {
  if (!(v > 0.0)) throw ConfigError(std::string(what) + " must be > 0");
  return v;
}

Mat parse_matrix(const json& j, const char* what) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw ConfigError(std::string(what) + " must be a non-empty array of rows");
  }
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j.front().size());
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j[i].size()) != cols) {
      throw ConfigError(std::string(what) + " rows have inconsistent lengths");
    }
    for (int c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

NoiseModel parse_noise(const json& j) {
  reject_unknown(j, "noise", {"model", "tau_a", "gamma", "theta", "q"});
  const std::string model = j.at("model").get<std::string>();
  try {
    switch (noise_tag_from_string(model)) {
      case NoiseTag::brownian:
        return NoiseModel::brownian();
      case NoiseTag::sine_wiener:
        return NoiseModel::sine_wiener(opt_number(j, "tau_a", 1.0, "noise"));
      case NoiseTag::dcl:
        return NoiseModel::dcl(opt_number(j, "gamma", 0.0, "noise"),
                               opt_number(j, "theta", 1.0, "noise"));
      case NoiseTag::tsb:
        return NoiseModel::tsb(opt_number(j, "theta", 1.0, "noise"),
                               opt_number(j, "q", 0.0, "noise"));
      case NoiseTag::ks:
        return NoiseModel::ks(opt_number(j, "theta", 1.0, "noise"),
                              opt_number(j, "gamma", 0.0, "noise"));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown noise model: " + model);
}

json noise_to_json(const NoiseModel& m) {
  json j;
  j["model"] = to_string(m.tag);
  switch (m.tag) {
    case NoiseTag::brownian: break;
    case NoiseTag::sine_wiener: j["tau_a"] = m.tau_a; break;
    case NoiseTag::dcl: j["gamma"] = m.gamma; j["theta"] = m.theta; break;
    case NoiseTag::tsb: j["theta"] = m.theta; j["q"] = m.q; break;
    case NoiseTag::ks: j["theta"] = m.theta; j["gamma"] = m.gamma; break;
  }
  return j;
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  // A manifest can be fed back in as the config for bit-exact reruns.
  if (j.is_object() && j.contains("config") && j.contains("version")) {
    j = j.at("config");
  }
  reject_unknown(j, "config",
                 {"benchmark", "ou", "linear", "nonholonomic", "noise", "policy", "delta",
                  "substeps_per_hold", "substep", "horizon", "x0", "radii", "ensemble",
                  "sweep", "grid", "out_dir"});
  RunConfig cfg;
  if (j.contains("benchmark")) cfg.benchmark = j.at("benchmark").get<std::string>();
  if (cfg.benchmark != "ou" && cfg.benchmark != "nonholonomic" && cfg.benchmark != "linear") {
    throw ConfigError("benchmark must be one of: ou, nonholonomic, linear");
  }
  if (j.contains("ou")) {
    const json& o = j.at("ou");
    reject_unknown(o, "ou", {"n", "a", "k", "sigma0"});
    cfg.ou.n = static_cast<int>(opt_number(o, "n", 1, "ou"));
    if (cfg.ou.n < 1) throw ConfigError("ou.n must be >= 1");
    cfg.ou.a = opt_number(o, "a", 1.0, "ou");
    cfg.ou.k = opt_number(o, "k", 0.0, "ou");
    cfg.ou.sigma0 = opt_number(o, "sigma0", 0.1, "ou");
    if (cfg.ou.sigma0 < 0.0) throw ConfigError("ou.sigma0 must be >= 0");
    if (!(cfg.ou.a + cfg.ou.k > 0.0)) throw ConfigError("ou requires a + k > 0");
  }
  if (j.contains("linear")) {
    const json& o = j.at("linear");
    reject_unknown(o, "linear", {"A", "B", "sigma0"});
    cfg.linear.A = parse_matrix(o.at("A"), "linear.A");
    cfg.linear.B = parse_matrix(o.at("B"), "linear.B");
    cfg.linear.sigma0 = opt_number(o, "sigma0", 0.0, "linear");
    if (cfg.linear.A.rows() != cfg.linear.A.cols()) throw ConfigError("linear.A must be square");
    if (cfg.linear.B.rows() != cfg.linear.A.rows()) {
      throw ConfigError("linear.B row count must match linear.A");
    }
  } else if (cfg.benchmark == "linear") {
    throw ConfigError("benchmark 'linear' requires a 'linear' section");
  }
  if (j.contains("nonholonomic")) {
    const json& o = j.at("nonholonomic");
    reject_unknown(o, "nonholonomic", {"sigma0"});
    cfg.robot.sigma0 = opt_number(o, "sigma0", 0.05, "nonholonomic");
    if (cfg.robot.sigma0 < 0.0) throw ConfigError("nonholonomic.sigma0 must be >= 0");
  }
  if (j.contains("noise")) cfg.noise = parse_noise(j.at("noise"));
  if (j.contains("policy")) {
    const json& o = j.at("policy");
    reject_unknown(o, "policy",
                   {"type", "beta", "control_grid", "pivot_at_state", "solver_tol"});
    const std::string type = o.contains("type") ? o.at("type").get<std::string>() : "builtin";
    if (type == "builtin") {
      cfg.policy.type = PolicySpec::Type::builtin;
    } else if (type == "inf_conv") {
      cfg.policy.type = PolicySpec::Type::inf_conv;
    } else if (type == "zero") {
      cfg.policy.type = PolicySpec::Type::zero;
    } else {
      throw ConfigError("policy.type must be builtin, inf_conv or zero");
    }
    cfg.policy.beta = opt_number(o, "beta", 0.1, "policy");
    if (!(cfg.policy.beta > 0.0 && cfg.policy.beta < 1.0)) {
      throw ConfigError("policy.beta must lie in (0,1)");
    }
    cfg.policy.control_grid = static_cast<int>(opt_number(o, "control_grid", 41, "policy"));
    if (cfg.policy.control_grid < 2) throw ConfigError("policy.control_grid must be >= 2");
    if (o.contains("pivot_at_state")) cfg.policy.pivot_at_state = o.at("pivot_at_state").get<bool>();
    cfg.policy.solver_tol = positive(opt_number(o, "solver_tol", 1e-8, "policy"),
                                     "policy.solver_tol");
  }
  cfg.delta = positive(opt_number(j, "delta", 0.1, "config"), "delta");
  cfg.substeps_per_hold =
      static_cast<int>(opt_number(j, "substeps_per_hold", 16, "config"));
  if (cfg.substeps_per_hold < 1) throw ConfigError("substeps_per_hold must be >= 1");
  if (j.contains("substep")) cfg.substep = positive(need_number(j, "substep", "config"), "substep");
  cfg.horizon = positive(opt_number(j, "horizon", 1.0, "config"), "horizon");
  if (j.contains("x0")) {
    const json& arr = j.at("x0");
    if (!arr.is_array() || arr.empty()) throw ConfigError("x0 must be a non-empty array");
    Vec x0(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) x0[static_cast<int>(i)] = arr[i].get<double>();
    cfg.x0 = x0;
  }
  if (j.contains("radii")) {
    const json& o = j.at("radii");
    reject_unknown(o, "radii", {"r", "R"});
    cfg.r = positive(need_number(o, "r", "radii"), "radii.r");
    cfg.R = positive(need_number(o, "R", "radii"), "radii.R");
    if (!(cfg.r < cfg.R)) throw ConfigError("radii must satisfy r < R");
  }
  if (j.contains("ensemble")) {
    const json& o = j.at("ensemble");
    reject_unknown(o, "ensemble",
                   {"n_paths", "master_seed", "window_fraction", "sup_thresholds",
                    "max_stored_paths"});
    cfg.n_paths = static_cast<int>(opt_number(o, "n_paths", 4096, "ensemble"));
    if (cfg.n_paths < 2) throw ConfigError("ensemble.n_paths must be >= 2");
    if (o.contains("master_seed")) cfg.master_seed = o.at("master_seed").get<std::uint64_t>();
    cfg.window_fraction = opt_number(o, "window_fraction", 0.2, "ensemble");
    if (!(cfg.window_fraction > 0.0 && cfg.window_fraction <= 1.0)) {
      throw ConfigError("ensemble.window_fraction must lie in (0,1]");
    }
    if (o.contains("sup_thresholds")) {
      for (const auto& v : o.at("sup_thresholds")) {
        cfg.sup_thresholds.push_back(positive(v.get<double>(), "sup_thresholds entry"));
      }
    }
    cfg.max_stored_paths =
        static_cast<int>(opt_number(o, "max_stored_paths", 4, "ensemble"));
  }
  if (j.contains("sweep")) {
    const json& o = j.at("sweep");
    reject_unknown(o, "sweep", {"deltas"});
    for (const auto& v : o.at("deltas")) {
      cfg.sweep_deltas.push_back(positive(v.get<double>(), "sweep delta"));
    }
  }
  if (j.contains("grid")) {
    const json& o = j.at("grid");
    reject_unknown(o, "grid", {"density", "lipschitz_pairs", "lipschitz_safety"});
    cfg.grid.density = static_cast<int>(opt_number(o, "density", 1 << 14, "grid"));
    cfg.grid.lipschitz_pairs =
        static_cast<int>(opt_number(o, "lipschitz_pairs", 4096, "grid"));
    cfg.grid.lipschitz_safety = opt_number(o, "lipschitz_safety", 1.25, "grid");
    if (cfg.grid.density < 16 || cfg.grid.lipschitz_pairs < 16) {
      throw ConfigError("grid densities must be >= 16");
    }
    if (!(cfg.grid.lipschitz_safety >= 1.0)) {
      throw ConfigError("grid.lipschitz_safety must be >= 1");
    }
  }
  if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  return from_json_text(read_file(path));
}

std::string RunConfig::to_json_text() const {
  json j;
  j["benchmark"] = benchmark;
  if (benchmark == "ou") {
    j["ou"] = {{"n", ou.n}, {"a", ou.a}, {"k", ou.k}, {"sigma0", ou.sigma0}};
  }
  if (benchmark == "linear") {
    json a = json::array(), b = json::array();
    for (int i = 0; i < linear.A.rows(); ++i) {
      json row = json::array();
      for (int c = 0; c < linear.A.cols(); ++c) row.push_back(linear.A(i, c));
      a.push_back(row);
    }
    for (int i = 0; i < linear.B.rows(); ++i) {
      json row = json::array();
      for (int c = 0; c < linear.B.cols(); ++c) row.push_back(linear.B(i, c));
      b.push_back(row);
    }
    j["linear"] = {{"A", a}, {"B", b}, {"sigma0", linear.sigma0}};
  }
  if (benchmark == "nonholonomic") {
    j["nonholonomic"] = {{"sigma0", robot.sigma0}};
  }
  j["noise"] = noise_to_json(noise);
  const char* ptype = policy.type == PolicySpec::Type::builtin
                          ? "builtin"
                          : policy.type == PolicySpec::Type::inf_conv ? "inf_conv" : "zero";
  j["policy"] = {{"type", ptype},
                 {"beta", policy.beta},
                 {"control_grid", policy.control_grid},
                 {"pivot_at_state", policy.pivot_at_state},
                 {"solver_tol", policy.solver_tol}};
  j["delta"] = delta;
  j["substeps_per_hold"] = substeps_per_hold;
  if (substep) j["substep"] = *substep;
  j["horizon"] = horizon;
  if (x0) {
    json arr = json::array();
    for (int i = 0; i < x0->size(); ++i) arr.push_back((*x0)[i]);
    j["x0"] = arr;
  }
  if (r > 0.0 && R > 0.0) j["radii"] = {{"r", r}, {"R", R}};
  json ens;
  ens["n_paths"] = n_paths;
  ens["master_seed"] = master_seed;
  ens["window_fraction"] = window_fraction;
  if (!sup_thresholds.empty()) ens["sup_thresholds"] = sup_thresholds;
  ens["max_stored_paths"] = max_stored_paths;
  j["ensemble"] = ens;
  if (!sweep_deltas.empty()) j["sweep"] = {{"deltas", sweep_deltas}};
  j["grid"] = {{"density", grid.density},
               {"lipschitz_pairs", grid.lipschitz_pairs},
               {"lipschitz_safety", grid.lipschitz_safety}};
  j["out_dir"] = out_dir;
  return j.dump(2);
}

ResolvedRun resolve(const RunConfig& cfg) {
  ResolvedRun run;
  if (cfg.benchmark == "ou") {
    run.bench = ou_benchmark(cfg.ou.n, cfg.ou.a, cfg.ou.sigma0, cfg.ou.k);
    if (cfg.noise.bounded()) run.bench.bounded_noise = cfg.noise;
  } else if (cfg.benchmark == "nonholonomic") {
    if (!cfg.noise.bounded()) {
      throw ConfigError("nonholonomic benchmark requires a bounded noise model");
    }
    run.bench = nonholonomic_benchmark(cfg.noise, cfg.robot.sigma0, cfg.policy.beta,
                                       cfg.policy.control_grid, cfg.policy.solver_tol,
                                       cfg.policy.pivot_at_state);
  } else if (cfg.benchmark == "linear") {
    Benchmark b;
    b.name = "linear";
    const int n = static_cast<int>(cfg.linear.A.rows());
    const int m = static_cast<int>(cfg.linear.B.cols());
    b.system.state_dim = n;
    b.system.control_dim = m;
    b.system.noise_dim = n;
    const Mat A = cfg.linear.A;
    const Mat B = cfg.linear.B;
    const double s0 = cfg.linear.sigma0;
    b.system.drift = [A, B](const Vec& x, const Vec& u) -> Vec { return A * x + B * u; };
    b.system.diffusion = [n, s0](const Vec&, const Vec&) -> Mat {
      return s0 * Mat::Identity(n, n);
    };
    b.policy.map = [m](const Vec&) -> Vec { return Vec::Zero(m); };
    b.default_x0 = Vec::Ones(n);
    b.default_r = 0.1;
    b.default_R = 2.0 * b.default_x0.norm();
    if (cfg.noise.bounded()) b.bounded_noise = cfg.noise;
    run.bench = std::move(b);
  }

  switch (cfg.policy.type) {
    case PolicySpec::Type::builtin:
      run.policy = run.bench.policy;
      break;
    case PolicySpec::Type::zero: {
      const int m = run.bench.system.control_dim;
      run.policy.map = [m](const Vec&) -> Vec { return Vec::Zero(m); };
      run.policy.control_bound = 0.0;
      break;
    }
    case PolicySpec::Type::inf_conv: {
      if (!run.bench.clf) {
        throw ConfigError("policy 'inf_conv' needs a benchmark with a non-smooth CLF");
      }
      InfConvolution ic;
      ic.base = *run.bench.clf;
      ic.beta = cfg.policy.beta;
      ic.solver.tol = cfg.policy.solver_tol;
      ControlLawConfig law;
      law.grid_points_per_dim = cfg.policy.control_grid;
      law.pivot_at_state = cfg.policy.pivot_at_state;
      run.policy = make_inf_conv_policy(ic, run.bench.system, law);
      break;
    }
  }

  run.hold.delta = cfg.delta;
  run.hold.substep = cfg.substep ? *cfg.substep : cfg.delta / cfg.substeps_per_hold;
  run.hold.horizon = cfg.horizon;
  run.hold.initial_state = cfg.x0 ? *cfg.x0 : run.bench.default_x0;
  if (run.hold.initial_state.size() != run.bench.system.state_dim) {
    throw ConfigError("x0 dimension does not match the benchmark state dimension");
  }
  try {
    run.hold.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  run.ensemble.n_paths = cfg.n_paths;
  run.ensemble.master_seed = cfg.master_seed;
  run.ensemble.window_fraction = cfg.window_fraction;
  run.ensemble.sup_thresholds = cfg.sup_thresholds;
  run.ensemble.max_stored_paths = cfg.max_stored_paths;

  run.r = cfg.r > 0.0 ? cfg.r : run.bench.default_r;
  run.R = cfg.R > 0.0 ? cfg.R : run.bench.default_R;
  if (!(run.r < run.R)) throw ConfigError("resolved radii must satisfy r < R");

  run.system = run.bench.sde_variant();
  return run;
}

namespace {

json verdict_to_json(const Verdict& v) {
  json j;
  j["name"] = v.name;
  j["state"] = to_string(v.state);
  j["observed"] = v.observed;
  j["target"] = v.target;
  j["tolerance"] = v.tolerance;
  j["reach_time"] = v.reach_time;
  if (!v.detail.empty()) j["detail"] = v.detail;
  return j;
}

}  // namespace

std::string parameters_json_text(const StabilizationParameters& p) {
  json j;
  j["r"] = p.r;
  j["R"] = p.R;
  j["L_bar"] = p.L_bar;
  j["R_star"] = p.R_star;
  j["u_bar"] = p.u_bar;
  j["f_bar"] = p.f_bar;
  j["sigma_sup"] = p.sigma_sup;
  j["L_grad_bar"] = p.L_grad_bar;
  j["L_hess_bar"] = p.L_hess_bar;
  j["l_star"] = p.l_star;
  j["r_star"] = p.r_star;
  j["Sigma_bar"] = p.Sigma_bar;
  j["r_tilde"] = p.r_tilde;
  j["branch"] =
      p.branch == CoreBranch::tilde_below_core ? "tilde_below_core" : "tilde_at_least_core";
  j["core_radius"] = p.core_radius;
  j["core_level"] = p.core_level;
  j["rho"] = p.rho;
  j["target_radius"] = p.target_radius();
  j["alpha3_bar_paper"] = p.alpha3_bar_paper;
  j["alpha3_bar_net"] = p.alpha3_bar_net;
  j["lip_L"] = p.lip_L;
  j["lip_f"] = p.lip_f;
  j["lip_sigma"] = p.lip_sigma;
  j["lip_gradL"] = p.lip_gradL;
  j["lip_hessL"] = p.lip_hessL;
  j["bracket_C"] = p.bracket_C;
  j["delta1"] = p.delta1;
  j["delta2"] = p.delta2;
  j["delta_bar"] = p.delta_bar;
  j["T_bound"] = p.T_bound;
  j["T_bound_paper"] = p.T_bound_paper;
  return j.dump(2);
}

std::string RunManifest::to_json_text() const {
  json j;
  j["tool"] = "shhlab";
  j["version"] = kVersion;
  j["command"] = command;
  j["seed"] = seed;
  j["threads"] = threads;
  j["config"] = json::parse(config.to_json_text());
  j["parameters"] =
      parameters ? json::parse(parameters_json_text(*parameters)) : json(nullptr);
  json vs = json::array();
  for (const Verdict& v : verdicts) vs.push_back(verdict_to_json(v));
  j["verdicts"] = vs;
  json outs = json::array();
  for (const OutputRecord& o : outputs) {
    outs.push_back({{"path", o.path}, {"bytes", o.bytes}, {"fnv1a64", o.fnv1a64}});
  }
  j["outputs"] = outs;
  j["timings"] = {{"wall_seconds", wall_seconds}};
  return j.dump(2);
}

}  // namespace shhlab
