#include "quickseek/run_config.hpp"

#include <json.hpp>

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "quickseek/asymptotics.hpp"
#include "quickseek/parallel.hpp"
#include "quickseek/rng.hpp"

namespace quickseek {

using nlohmann::json;

namespace {

// ---------- parsing ----------

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok) fail(path + "." + it.key(), "unknown key");
  }
}

double get_number(const json& obj, const std::string& path, const char* key,
                  std::optional<double> def = std::nullopt) {
  if (!obj.contains(key)) {
    if (def) return *def;
    fail(path + "." + key, "missing required number");
  }
  if (!obj[key].is_number()) fail(path + "." + key, "expected a number");
  return obj[key].get<double>();
}

Strategy parse_strategy(const std::string& s, const std::string& path) {
  if (s == "single") return Strategy::Single;
  if (s == "low_complexity") return Strategy::LowComplexity;
  if (s == "optimal") return Strategy::Optimal;
  if (s == "multistage") return Strategy::MultiStage;
  fail(path, "unknown strategy '" + s +
                 "' (valid: single, low_complexity, optimal, multistage)");
}

ModelSpec parse_model(const json& obj, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  if (!obj.contains("family") || !obj["family"].is_string())
    fail(path + ".family", "missing family name");
  const std::string fam = obj["family"].get<std::string>();
  ModelSpec spec;
  if (fam == "gaussian_mean_shift") {
    check_keys(obj, path, {"family", "mu0", "mu1", "sigma"});
    spec.family = Family::GaussianMeanShift;
    spec.p1 = get_number(obj, path, "mu0", 0.0);
    spec.p2 = get_number(obj, path, "mu1");
    spec.p3 = get_number(obj, path, "sigma", 1.0);
  } else if (fam == "gaussian_variance") {
    check_keys(obj, path, {"family", "var0", "var1"});
    spec.family = Family::GaussianVariance;
    spec.p1 = get_number(obj, path, "var0", 1.0);
    spec.p2 = get_number(obj, path, "var1");
  } else if (fam == "gamma") {
    check_keys(obj, path, {"family", "shape0", "shape1", "scale"});
    spec.family = Family::Gamma;
    spec.p1 = get_number(obj, path, "shape0");
    spec.p2 = get_number(obj, path, "shape1");
    spec.p3 = get_number(obj, path, "scale", 1.0);
  } else if (fam == "poisson") {
    check_keys(obj, path, {"family", "rate0", "rate1"});
    spec.family = Family::Poisson;
    spec.p1 = get_number(obj, path, "rate0");
    spec.p2 = get_number(obj, path, "rate1");
  } else {
    fail(path + ".family",
         "unknown family '" + fam +
             "' (valid: gaussian_mean_shift, gaussian_variance, gamma, poisson)");
  }
  return spec;
}

json model_json(const ModelSpec& m) {
  json j;
  j["family"] = family_name(m.family);
  switch (m.family) {
    case Family::GaussianMeanShift:
      j["mu0"] = m.p1;
      j["mu1"] = m.p2;
      j["sigma"] = m.p3;
      break;
    case Family::GaussianVariance:
      j["var0"] = m.p1;
      j["var1"] = m.p2;
      break;
    case Family::Gamma:
      j["shape0"] = m.p1;
      j["shape1"] = m.p2;
      j["scale"] = m.p3;
      break;
    case Family::Poisson:
      j["rate0"] = m.p1;
      j["rate1"] = m.p2;
      break;
  }
  return j;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

// ---------- output helpers ----------

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& file, const std::vector<std::string>& header)
      : out_(file, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open output file " + file);
    write_row(header);
  }
  void write_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

void write_json_file(const std::string& file, const json& j) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + file);
  out << j.dump(2) << '\n';
}

json metadata(const RunConfig& cfg, const char* schema) {
  json j;
  j["schema"] = schema;
  j["version"] = kToolVersion;
  j["config_hash"] = cfg.config_hash;
  j["seed"] = cfg.seed;
  return j;
}

json summary_json(const SimSummary& s) {
  json j;
  j["strategy"] = strategy_name(s.strategy);
  j["n_trials"] = s.n_trials;
  j["asd"] = s.asd;
  j["asd_se"] = s.asd_se;
  j["fip"] = s.fip;
  j["fip_se"] = s.fip_se;
  j["mean_tau0"] = s.mean_tau0;
  j["mean_tau1"] = s.mean_tau1;
  j["mean_switches"] = s.mean_switches;
  j["truncated"] = s.truncated;
  j["truncation_failure"] = s.truncation_failure;
  return j;
}

StrategyRunOptions options_from(const RunConfig& cfg, double pi0) {
  StrategyRunOptions opt;
  opt.zeta = cfg.zeta;
  opt.trials = cfg.trials;
  opt.threads = resolve_threads(cfg.threads);
  opt.seed = cfg.seed;
  opt.sample_cap = cfg.sample_cap;
  opt.q1_0 = cfg.q1_0;
  opt.stages = cfg.stages;
  opt.optimal_c = cfg.dp_cost;
  opt.dp = cfg.dp;
  opt.calibrate = cfg.calibrate;
  (void)pi0;
  return opt;
}

struct Cell {
  double v1 = 0.0, v2 = 0.0;
  ModelSpec model;
  double pi0 = 0.0;
};

std::vector<Cell> build_cells(const RunConfig& cfg) {
  std::vector<Cell> cells;
  const std::string& axis = cfg.sweep_axis;
  if (axis == "snr") {
    if (cfg.model.family != Family::GaussianVariance)
      fail("sweep.axis", "snr sweep requires the gaussian_variance family");
    for (const double snr : cfg.sweep_values) {
      Cell c;
      c.v1 = snr;
      c.model = cfg.model;
      c.model.p2 = cfg.model.p1 * (1.0 + std::pow(10.0, snr / 10.0));
      c.pi0 = cfg.pi0;
      cells.push_back(c);
    }
  } else if (axis == "pi0") {
    for (const double pi0 : cfg.sweep_values) {
      Cell c;
      c.v1 = pi0;
      c.model = cfg.model;
      c.pi0 = pi0;
      cells.push_back(c);
    }
  } else if (axis == "kappa") {
    if (cfg.model.family != Family::Gamma)
      fail("sweep.axis", "kappa sweep requires the gamma family");
    for (const double kappa : cfg.sweep_values) {
      Cell c;
      c.v1 = kappa;
      c.model = cfg.model;
      c.model.p2 = kappa;
      c.pi0 = cfg.pi0;
      cells.push_back(c);
    }
  } else if (axis == "mu_sigma_grid") {
    if (cfg.model.family != Family::GaussianMeanShift)
      fail("sweep.axis", "mu_sigma_grid requires the gaussian_mean_shift family");
    for (const double mu : cfg.grid_mu)
      for (const double sigma : cfg.grid_sigma) {
        Cell c;
        c.v1 = mu;
        c.v2 = sigma;
        c.model = cfg.model;
        c.model.p2 = mu;
        c.model.p3 = sigma;
        c.pi0 = cfg.pi0;
        cells.push_back(c);
      }
  } else {
    fail("sweep.axis", "unknown axis '" + axis +
                           "' (valid: snr, pi0, kappa, mu_sigma_grid)");
  }
  if (cells.empty()) fail("sweep.values", "empty axis value list");
  return cells;
}

}  // namespace

ModelPair build_model(const ModelSpec& spec) {
  switch (spec.family) {
    case Family::GaussianMeanShift:
      return gaussian_mean_shift(spec.p1, spec.p2, spec.p3);
    case Family::GaussianVariance:
      return gaussian_variance(spec.p1, spec.p2);
    case Family::Gamma:
      return gamma_pair(spec.p1, spec.p2, spec.p3);
    case Family::Poisson:
      return poisson_pair(spec.p1, spec.p2);
  }
  throw ConfigError("model.family: invalid family");
}

RunConfig load_config(const std::string& path, const std::string& preset,
                      const CliOverrides& overrides) {
  json root;
  if (!preset.empty()) {
    const char* text = preset_text(preset);
    if (!text) {
      std::string names;
      for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
      throw ConfigError("preset: unknown preset '" + preset + "' (valid: " + names + ")");
    }
    root = json::parse(text);
  } else if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open file " + path);
    try {
      root = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config: JSON parse error: ") + e.what());
    }
  } else {
    throw ConfigError("config: provide --config PATH or --preset NAME");
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");

  check_keys(root, "config",
             {"schema", "model", "pi0", "zeta", "strategy", "strategies", "trials",
              "seed", "threads", "sample_cap", "q1_0", "stages", "write_trials",
              "calibrate", "dp", "sweep", "check"});

  RunConfig cfg;
  if (!root.contains("model")) fail("config.model", "missing model section");
  cfg.model = parse_model(root["model"], "model");
  cfg.pi0 = get_number(root, "config", "pi0", 0.05);
  if (cfg.pi0 <= 0.0 || cfg.pi0 > 1.0) fail("config.pi0", "must lie in (0, 1]");
  cfg.zeta = get_number(root, "config", "zeta", 0.1);
  if (cfg.zeta <= 0.0 || cfg.zeta >= 1.0) fail("config.zeta", "must lie in (0, 1)");
  cfg.trials = static_cast<int>(get_number(root, "config", "trials", 10000));
  cfg.seed = static_cast<std::uint64_t>(get_number(root, "config", "seed", 1));
  cfg.threads = static_cast<int>(get_number(root, "config", "threads", 0));
  cfg.sample_cap = static_cast<std::uint64_t>(
      get_number(root, "config", "sample_cap", static_cast<double>(kDefaultSampleCap)));
  cfg.q1_0 = get_number(root, "config", "q1_0", 0.5);
  if (cfg.q1_0 <= 0.0 || cfg.q1_0 >= 1.0) fail("config.q1_0", "must lie in (0, 1)");
  cfg.stages = static_cast<int>(get_number(root, "config", "stages", 2));
  if (cfg.stages < 1) fail("config.stages", "must be >= 1");
  cfg.write_trials = root.value("write_trials", false);

  if (root.contains("strategy"))
    cfg.strategy = parse_strategy(root["strategy"].get<std::string>(), "config.strategy");
  if (root.contains("strategies")) {
    if (!root["strategies"].is_array()) fail("config.strategies", "expected an array");
    for (const auto& s : root["strategies"])
      cfg.strategies.push_back(parse_strategy(s.get<std::string>(), "config.strategies"));
  }

  if (root.contains("calibrate")) {
    const json& c = root["calibrate"];
    check_keys(c, "calibrate", {"target_fip", "tolerance", "trials_per_probe", "max_probes"});
    CalibrationSpec spec;
    spec.target_fip = get_number(c, "calibrate", "target_fip", 0.1);
    spec.tolerance = get_number(c, "calibrate", "tolerance", 0.01);
    spec.trials_per_probe =
        static_cast<int>(get_number(c, "calibrate", "trials_per_probe", 4000));
    spec.max_probes = static_cast<int>(get_number(c, "calibrate", "max_probes", 24));
    if (spec.target_fip <= 0.0 || spec.target_fip >= 1.0)
      fail("calibrate.target_fip", "must lie in (0, 1)");
    cfg.calibrate = spec;
  }

  if (root.contains("dp")) {
    const json& d = root["dp"];
    check_keys(d, "dp",
               {"cost", "scan_resolution", "refine_resolution", "quad_points", "tol",
                "max_iter", "region_tol"});
    cfg.dp_cost = get_number(d, "dp", "cost", 0.01);
    cfg.dp.scan_resolution =
        static_cast<int>(get_number(d, "dp", "scan_resolution", 201));
    cfg.dp.refine_resolution =
        static_cast<int>(get_number(d, "dp", "refine_resolution", 61));
    cfg.dp.quad_points = static_cast<int>(get_number(d, "dp", "quad_points", 129));
    cfg.dp.tol = get_number(d, "dp", "tol", 1e-6);
    cfg.dp.max_iter = static_cast<int>(get_number(d, "dp", "max_iter", 2000));
    cfg.dp.region_tol = get_number(d, "dp", "region_tol", 1e-6);
    if (cfg.dp_cost <= 0.0) fail("dp.cost", "must be positive");
  }

  if (root.contains("sweep")) {
    const json& s = root["sweep"];
    check_keys(s, "sweep", {"axis", "values", "mu", "sigma"});
    if (!s.contains("axis") || !s["axis"].is_string())
      fail("sweep.axis", "missing axis name");
    cfg.sweep_axis = s["axis"].get<std::string>();
    if (s.contains("values"))
      for (const auto& v : s["values"]) cfg.sweep_values.push_back(v.get<double>());
    if (s.contains("mu"))
      for (const auto& v : s["mu"]) cfg.grid_mu.push_back(v.get<double>());
    if (s.contains("sigma"))
      for (const auto& v : s["sigma"]) cfg.grid_sigma.push_back(v.get<double>());
    if (cfg.sweep_axis == "mu_sigma_grid") {
      if (cfg.grid_mu.empty() || cfg.grid_sigma.empty())
        fail("sweep", "mu_sigma_grid requires nonempty mu and sigma lists");
    } else if (cfg.sweep_values.empty()) {
      fail("sweep.values", "empty axis value list");
    }
  }

  if (root.contains("check")) {
    const json& c = root["check"];
    check_keys(c, "check", {"chains", "pi0_list"});
    cfg.check_chains = static_cast<int>(get_number(c, "check", "chains", 100000));
    if (c.contains("pi0_list")) {
      cfg.check_pi0_list.clear();
      for (const auto& v : c["pi0_list"]) cfg.check_pi0_list.push_back(v.get<double>());
    }
  }

  if (overrides.seed) cfg.seed = *overrides.seed;
  if (overrides.threads) cfg.threads = *overrides.threads;
  if (overrides.trials) cfg.trials = *overrides.trials;
  if (cfg.trials < 100) fail("config.trials", "must be >= 100");

  // Canonical resolved form, hashed into every output.
  json resolved;
  resolved["schema"] = kConfigSchema;
  resolved["model"] = model_json(cfg.model);
  resolved["pi0"] = cfg.pi0;
  resolved["zeta"] = cfg.zeta;
  if (cfg.strategy) resolved["strategy"] = strategy_name(*cfg.strategy);
  if (!cfg.strategies.empty()) {
    json arr = json::array();
    for (const Strategy s : cfg.strategies) arr.push_back(strategy_name(s));
    resolved["strategies"] = arr;
  }
  resolved["trials"] = cfg.trials;
  resolved["seed"] = cfg.seed;
  resolved["sample_cap"] = cfg.sample_cap;
  resolved["q1_0"] = cfg.q1_0;
  resolved["stages"] = cfg.stages;
  resolved["write_trials"] = cfg.write_trials;
  if (cfg.calibrate) {
    resolved["calibrate"] = {{"target_fip", cfg.calibrate->target_fip},
                             {"tolerance", cfg.calibrate->tolerance},
                             {"trials_per_probe", cfg.calibrate->trials_per_probe},
                             {"max_probes", cfg.calibrate->max_probes}};
  }
  resolved["dp"] = {{"cost", cfg.dp_cost},
                    {"scan_resolution", cfg.dp.scan_resolution},
                    {"refine_resolution", cfg.dp.refine_resolution},
                    {"quad_points", cfg.dp.quad_points},
                    {"tol", cfg.dp.tol},
                    {"max_iter", cfg.dp.max_iter},
                    {"region_tol", cfg.dp.region_tol}};
  if (!cfg.sweep_axis.empty()) {
    resolved["sweep"] = {{"axis", cfg.sweep_axis}};
    if (!cfg.sweep_values.empty()) resolved["sweep"]["values"] = cfg.sweep_values;
    if (!cfg.grid_mu.empty()) resolved["sweep"]["mu"] = cfg.grid_mu;
    if (!cfg.grid_sigma.empty()) resolved["sweep"]["sigma"] = cfg.grid_sigma;
  }
  cfg.canonical_json = resolved.dump();
  cfg.config_hash = hex64(fnv1a(cfg.canonical_json));

  // Build once to surface model validation errors as config errors.
  try {
    build_model(cfg.model);
  } catch (const std::exception& e) {
    fail("model", e.what());
  }
  return cfg;
}

// ---------- commands ----------

int run_simulate(const RunConfig& cfg, const std::string& out_dir) {
  if (!cfg.strategy) throw ConfigError("config.strategy: required for simulate");
  std::filesystem::create_directories(out_dir);
  const ModelPair model = build_model(cfg.model);

  StrategyRunOptions opt = options_from(cfg, cfg.pi0);
  std::vector<TrialRecord> records;
  if (cfg.write_trials) opt.capture = &records;
  const StrategyRunResult res = run_strategy(*cfg.strategy, model, cfg.pi0, opt);

  json out = metadata(cfg, "quickseek-summary/1");
  out["model"] = model_json(cfg.model);
  out["pi0"] = cfg.pi0;
  out["zeta"] = cfg.zeta;
  out["knob"] = res.knob;
  out["summary"] = summary_json(res.summary);
  out["warnings"] = res.warnings;
  if (res.calibration) {
    json c;
    c["knob"] = res.calibration->knob;
    c["achieved_fip"] = res.calibration->achieved_fip;
    c["converged"] = res.calibration->converged;
    json probes = json::array();
    for (const auto& [k, f] : res.calibration->probes) probes.push_back({{"knob", k}, {"fip", f}});
    c["probes"] = probes;
    out["calibration"] = c;
  }
  write_json_file(out_dir + "/summary.json", out);

  if (cfg.write_trials) {
    CsvWriter csv(out_dir + "/trials.csv",
                  {"trial", "seed", "tau0", "tau1", "n_switches", "claim_correct",
                   "truncated"});
    for (std::size_t i = 0; i < records.size(); ++i) {
      const TrialRecord& r = records[i];
      csv.write_row({std::to_string(i), std::to_string(r.seed), std::to_string(r.tau0),
                     std::to_string(r.tau1), std::to_string(r.n_switches),
                     r.claim_correct ? "1" : "0", r.truncated ? "1" : "0"});
    }
  }
  std::cout << "simulate: strategy=" << strategy_name(*cfg.strategy)
            << " asd=" << res.summary.asd << " fip=" << res.summary.fip << "\n";
  return res.summary.truncation_failure ? 3 : 0;
}

int run_dp_solve(const RunConfig& cfg, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const ModelPair model = build_model(cfg.model);
  const OptimalPolicy pol =
      solve_optimal_policy(model, cfg.pi0, cfg.dp_cost, cfg.dp, cfg.sample_cap);
  const PolicyRegions regions =
      extract_regions(pol.u_scan, pol.v_slice, pol.phi_c, pol.phi_s, cfg.dp.region_tol);

  const auto& grid = *pol.u_scan.grid;
  const auto& nodes = grid.nodes();
  auto dump_surface = [&](const std::string& file, const Eigen::ArrayXd& values) {
    CsvWriter csv(out_dir + "/" + file, {"p11", "pmix", "value", "in_r_tau", "in_r_phi"});
    for (std::uint32_t i = 0; i < grid.node_count(); ++i)
      csv.write_row({fmt(nodes(i, 0)), fmt(nodes(i, 1)), fmt(values[i]),
                     regions.r_tau[i] ? "1" : "0", regions.r_phi[i] ? "1" : "0"});
  };
  dump_surface("v_slice.csv", pol.v_slice.values);
  dump_surface("u_scan.csv", pol.u_scan.values);
  dump_surface("phi_c.csv", pol.phi_c.values);

  json out = metadata(cfg, "quickseek-dp/1");
  out["model"] = model_json(cfg.model);
  out["pi0"] = cfg.pi0;
  out["c"] = cfg.dp_cost;
  out["scan_resolution"] = cfg.dp.scan_resolution;
  out["refine_resolution"] = cfg.dp.refine_resolution;
  out["quad_points"] = cfg.dp.quad_points;
  out["tol"] = cfg.dp.tol;
  out["region_tol"] = cfg.dp.region_tol;
  out["phi_s"] = pol.phi_s;
  out["refine_residual"] = pol.v_refine.residual;
  out["refine_sweeps"] = pol.v_refine.sweeps;
  out["scan_residual"] = pol.u_scan.residual;
  out["scan_sweeps"] = pol.u_scan.sweeps;
  out["r_tau_components"] = count_components(grid, regions.r_tau);
  out["files"] = {"v_slice.csv", "u_scan.csv", "phi_c.csv"};
  write_json_file(out_dir + "/dp_header.json", out);
  std::cout << "dp-solve: phi_s=" << pol.phi_s
            << " r_tau_components=" << out["r_tau_components"] << "\n";
  return 0;
}

namespace {

int run_cells(const RunConfig& cfg, const std::string& out_dir, bool ratio_mode) {
  std::filesystem::create_directories(out_dir);
  const std::vector<Cell> cells = build_cells(cfg);
  std::vector<Strategy> strategies = cfg.strategies;
  if (ratio_mode) strategies = {Strategy::Single, Strategy::LowComplexity};
  if (strategies.empty())
    throw ConfigError("config.strategies: required for sweep");

  bool truncation_failure = false;
  json rows_meta = json::array();

  if (ratio_mode) {
    CsvWriter csv(out_dir + "/ratio_map.csv",
                  {"axis", "v1", "v2", "asd_single", "asd_single_se", "fip_single",
                   "fip_single_se", "asd_mixed", "asd_mixed_se", "fip_mixed",
                   "fip_mixed_se", "ratio"});
    std::uint64_t cell_idx = 0;
    for (const Cell& cell : cells) {
      StrategyRunOptions opt = options_from(cfg, cell.pi0);
      opt.seed = derive_seed(cfg.seed, 0xCE11 + cell_idx);
      const ModelPair model = build_model(cell.model);
      const StrategyRunResult rs = run_strategy(Strategy::Single, model, cell.pi0, opt);
      const StrategyRunResult rm =
          run_strategy(Strategy::LowComplexity, model, cell.pi0, opt);
      truncation_failure |= rs.summary.truncation_failure || rm.summary.truncation_failure;
      csv.write_row({cfg.sweep_axis, fmt(cell.v1), fmt(cell.v2), fmt(rs.summary.asd),
                     fmt(rs.summary.asd_se), fmt(rs.summary.fip), fmt(rs.summary.fip_se),
                     fmt(rm.summary.asd), fmt(rm.summary.asd_se), fmt(rm.summary.fip),
                     fmt(rm.summary.fip_se), fmt(rm.summary.asd / rs.summary.asd)});
      ++cell_idx;
    }
    json out = metadata(cfg, "quickseek-ratio-map/1");
    out["axis"] = cfg.sweep_axis;
    out["cells"] = cells.size();
    out["files"] = {"ratio_map.csv"};
    write_json_file(out_dir + "/ratio_map_summary.json", out);
  } else {
    CsvWriter csv(out_dir + "/sweep.csv",
                  {"axis", "v1", "v2", "strategy", "knob", "asd", "asd_se", "fip",
                   "fip_se", "mean_tau0", "mean_tau1", "trials", "truncated"});
    std::uint64_t cell_idx = 0;
    for (const Cell& cell : cells) {
      for (const Strategy strat : strategies) {
        StrategyRunOptions opt = options_from(cfg, cell.pi0);
        opt.seed = derive_seed(cfg.seed, 0x5EE9 + cell_idx);
        const ModelPair model = build_model(cell.model);
        const StrategyRunResult r = run_strategy(strat, model, cell.pi0, opt);
        truncation_failure |= r.summary.truncation_failure;
        csv.write_row({cfg.sweep_axis, fmt(cell.v1), fmt(cell.v2), strategy_name(strat),
                       fmt(r.knob), fmt(r.summary.asd), fmt(r.summary.asd_se),
                       fmt(r.summary.fip), fmt(r.summary.fip_se),
                       fmt(r.summary.mean_tau0), fmt(r.summary.mean_tau1),
                       std::to_string(r.summary.n_trials),
                       std::to_string(r.summary.truncated)});
        json meta;
        meta["v1"] = cell.v1;
        meta["v2"] = cell.v2;
        meta["strategy"] = strategy_name(strat);
        meta["knob"] = r.knob;
        if (r.calibration) {
          meta["calibration_converged"] = r.calibration->converged;
          meta["achieved_fip"] = r.calibration->achieved_fip;
        }
        rows_meta.push_back(meta);
      }
      ++cell_idx;
    }
    json out = metadata(cfg, "quickseek-sweep/1");
    out["axis"] = cfg.sweep_axis;
    out["rows"] = rows_meta;
    out["files"] = {"sweep.csv"};
    write_json_file(out_dir + "/sweep_summary.json", out);
  }
  return truncation_failure ? 3 : 0;
}

}  // namespace

int run_sweep(const RunConfig& cfg, const std::string& out_dir) {
  return run_cells(cfg, out_dir, /*ratio_mode=*/false);
}

int run_ratio_map(const RunConfig& cfg, const std::string& out_dir) {
  return run_cells(cfg, out_dir, /*ratio_mode=*/true);
}

// ---------- check: property and oracle suites ----------

namespace {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

bool simplex_ok4(const RefineBelief& r) {
  const double sum = r.r11 + r.r10 + r.r01 + r.r00;
  return r.r11 >= 0.0 && r.r10 >= 0.0 && r.r01 >= 0.0 && r.r00 >= 0.0 &&
         std::abs(sum - 1.0) <= 1e-12;
}

bool simplex_ok3(const ScanBelief& p) {
  const double sum = p.p11 + p.pmix + p.p00;
  return p.p11 >= 0.0 && p.pmix >= 0.0 && p.p00 >= 0.0 && std::abs(sum - 1.0) <= 1e-12;
}

CheckResult check_belief_chains(int chains, std::uint64_t seed) {
  const ModelPair models[] = {gaussian_mean_shift(0.0, 1.0, 1.0),
                              gamma_pair(1.0, 3.0, 2.0), poisson_pair(2.0, 4.0)};
  std::mt19937_64 rng = make_stream(seed, 17);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  long violations = 0;
  for (int chain = 0; chain < chains; ++chain) {
    const ModelPair& m = models[chain % 3];
    // random interior start
    double e[4];
    double s = 0.0;
    for (double& v : e) s += v = -std::log(unif(rng));
    RefineBelief r{e[0] / s, e[1] / s, e[2] / s, e[3] / s};
    ScanBelief p{r.r11 + r.r10, r.r01, 1.0 - (r.r11 + r.r10) - r.r01};
    SingleBelief b{unif(rng)};
    const ScanBelief prior = scan_prior(0.05);
    const int steps = 1 + chain % 8;
    for (int t = 0; t < steps; ++t) {
      const Hypothesis h = unif(rng) < 0.5 ? Hypothesis::H0 : Hypothesis::H1;
      const double x = sample(m, h, rng);
      const double z = sample(m, h, rng) + sample(m, h, rng);
      const bool switched = unif(rng) < 0.2;
      r = update_refine(r, x, m);
      p = update_scan(p, prior, z, switched, m);
      b = update_single(b, 0.05, x, switched, m);
      if (!simplex_ok4(r) || !simplex_ok3(p) || b.pi < 0.0 || b.pi > 1.0) ++violations;
    }
  }
  CheckResult res;
  res.name = "belief-simplex-chains";
  res.pass = violations == 0;
  res.detail = std::to_string(chains) + " chains, " + std::to_string(violations) +
               " violations";
  return res;
}

CheckResult check_vertex_absorption(std::uint64_t seed) {
  const ModelPair m = gaussian_mean_shift(0.0, 1.0, 1.0);
  std::mt19937_64 rng = make_stream(seed, 23);
  bool ok = true;
  for (int t = 0; t < 200; ++t) {
    const double x = sample(m, Hypothesis::H1, rng);
    const ScanBelief prior = scan_prior(0.05);
    const ScanBelief vertices3[] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (const auto& v : vertices3) {
      const ScanBelief u = update_scan(v, prior, x + x, false, m);
      ok &= u.p11 == v.p11 && u.pmix == v.pmix && u.p00 == v.p00;
    }
    const RefineBelief vertices4[] = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
    for (const auto& v : vertices4) {
      const RefineBelief u = update_refine(v, x, m);
      ok &= u.r11 == v.r11 && u.r10 == v.r10 && u.r01 == v.r01 && u.r00 == v.r00;
    }
    ok &= update_single({0.0}, 0.05, x, false, m).pi == 0.0;
    ok &= update_single({1.0}, 0.05, x, false, m).pi == 1.0;
  }
  return {"vertex-absorption", ok, ok ? "all vertices fixed" : "vertex moved"};
}

CheckResult check_q1_equivalence(std::uint64_t seed) {
  const ModelPair m = gaussian_variance(1.0, 3.0);
  std::mt19937_64 rng = make_stream(seed, 29);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst_q = 0.0, worst_lr = 0.0;
  for (int chain = 0; chain < 300; ++chain) {
    double e[4];
    double s = 0.0;
    for (double& v : e) s += v = -std::log(unif(rng));
    RefineBelief r{e[0] / s, e[1] / s, e[2] / s, e[3] / s};
    const double q1_0 = q_stats(r).q1;
    double q1 = q1_0;
    double lr_product = 1.0;
    for (int t = 0; t < 25; ++t) {
      const double x = sample(m, t % 2 ? Hypothesis::H1 : Hypothesis::H0, rng);
      r = update_refine(r, x, m);
      q1 = update_q1(q1, x, m);
      lr_product *= std::exp(llr(m, x));
      worst_q = std::max(worst_q, std::abs(q_stats(r).q1 - q1));
      if (lr_product > 1e-6 && lr_product < 1e6) {
        const double lr = refine_lr(q1_0, q1);
        worst_lr = std::max(worst_lr, std::abs(lr - lr_product) / lr_product);
      }
    }
  }
  const bool pass = worst_q <= 1e-10 && worst_lr <= 1e-9;
  return {"q1-sprt-equivalence", pass,
          "max q1 gap " + fmt(worst_q) + ", max LR rel gap " + fmt(worst_lr)};
}

CheckResult check_wald(std::uint64_t seed) {
  const ModelPair m = gaussian_variance(1.0, 5.0);
  const SingleConfig cfg = design_threshold_single(0.05, 0.1);
  const WaldReport w = wald_identity_check(m, cfg, 10000, seed);
  const LowComplexityConfig lcfg = design_thresholds_lc(0.05, 0.1);
  const WaldReport wm = wald_identity_check_mixed(m, lcfg, 10000, seed + 1);
  const double worst =
      std::max({std::abs(w.h0_diff) / w.h0_sigma, std::abs(w.h1_diff) / w.h1_sigma,
                std::abs(wm.h0_diff) / wm.h0_sigma, std::abs(wm.h1_diff) / wm.h1_sigma});
  return {"wald-identity", worst <= 3.0, "worst discrepancy " + fmt(worst) + " se"};
}

CheckResult check_dp_oracle() {
  const TwoPointModel toy{0.25, 0.75};
  const double c = 0.05;
  const RefineBelief start{0.25, 0.25, 0.25, 0.25};
  const ObsModel obs = build_obs_model(toy);
  const RefineOperator op = build_refine_operator(obs, 201);
  double worst = 0.0;
  for (int horizon = 0; horizon <= 3; ++horizon) {
    const double exact = finite_horizon_oracle(toy, c, horizon, start);
    const ValueSurface grid_v = refine_value_steps(op, c, horizon);
    const double point[4] = {start.r11, start.r10, start.r01, start.r00};
    worst = std::max(worst, std::abs(grid_v.at(point) - exact));
  }
  return {"dp-oracle-toy", worst <= 1e-3, "max |grid - enumeration| " + fmt(worst)};
}

CheckResult check_decomposition() {
  ToyBinaryModel toy;
  toy.pi0 = 0.25;
  toy.cost = 0.05;
  toy.scan_head = {1.0 / 6, 2.0 / 6, 3.0 / 6, 4.0 / 6, 5.0 / 6};
  toy.group2_head = {0.25, 0.5, 0.75};
  toy.group1_head = {1.0 / 3, 2.0 / 3};
  double worst = 0.0;
  for (int horizon = 0; horizon <= 2; ++horizon) {
    const DecompositionCheck r = multistage_dp_decomposition_check(toy, 2, horizon);
    worst = std::max(worst, std::abs(r.joint - r.staged));
  }
  ToyBinaryModel expensive = toy;
  expensive.cost = 1.5;  // stopping dominates everywhere
  const DecompositionCheck r = multistage_dp_decomposition_check(expensive, 2, 2);
  worst = std::max(worst, std::abs(r.joint - r.staged));
  return {"multistage-decomposition", worst <= 1e-12, "max |joint - staged| " + fmt(worst)};
}

CheckResult check_asymptotics(const RunConfig& cfg, const std::string& out_dir) {
  const ModelPair m = gaussian_mean_shift(0.0, 8.0, 1.0);
  PredictReportOptions opt;
  opt.n_renewal = 20000;
  opt.n_trials = cfg.trials;
  opt.threads = resolve_threads(cfg.threads);
  opt.seed = cfg.seed;
  const std::vector<PredictRow> rows =
      predict_report(m, cfg.check_pi0_list, 0.01, Regime::FIE, opt);

  CsvWriter csv(out_dir + "/asymptotics_report.csv",
                {"pi0", "single_asd_pred", "scan_delay_pred", "refine_delay_pred",
                 "mixed_asd_pred", "ratio_pred", "single_asd_sim", "mixed_asd_sim",
                 "ratio_sim", "single_gap", "mixed_gap"});
  double worst_ratio_gap = 0.0;
  for (const PredictRow& r : rows) {
    csv.write_row({fmt(r.pi0), fmt(r.single_asd_pred), fmt(r.scan_delay_pred),
                   fmt(r.refine_delay_pred), fmt(r.mixed_asd_pred), fmt(r.ratio_pred),
                   fmt(r.single_asd_sim), fmt(r.mixed_asd_sim), fmt(r.ratio_sim),
                   fmt(r.single_gap), fmt(r.mixed_gap)});
    worst_ratio_gap = std::max(worst_ratio_gap, std::abs(r.ratio_pred - r.ratio_sim));
  }
  return {"asymptotics-report", worst_ratio_gap <= 0.1,
          "max |ratio_pred - ratio_sim| " + fmt(worst_ratio_gap)};
}

}  // namespace

int run_check(const RunConfig& cfg, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<CheckResult> results;
  results.push_back(check_belief_chains(cfg.check_chains, cfg.seed));
  results.push_back(check_vertex_absorption(cfg.seed));
  results.push_back(check_q1_equivalence(cfg.seed));
  results.push_back(check_wald(cfg.seed));
  results.push_back(check_dp_oracle());
  results.push_back(check_decomposition());
  results.push_back(check_asymptotics(cfg, out_dir));

  json out = metadata(cfg, "quickseek-check/1");
  json checks = json::array();
  bool all_pass = true;
  for (const CheckResult& r : results) {
    std::cout << (r.pass ? "PASS" : "FAIL") << " " << r.name << ": " << r.detail << "\n";
    checks.push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    all_pass &= r.pass;
  }
  out["checks"] = checks;
  write_json_file(out_dir + "/check_report.json", out);
  return all_pass ? 0 : 1;
}

}  // namespace quickseek
