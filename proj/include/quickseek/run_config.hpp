#pragma once

#include <optional>
#include <string>
#include <vector>

#include "quickseek/harness.hpp"

namespace quickseek {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kConfigSchema = "quickseek-config/1";

struct ModelSpec {
  Family family = Family::GaussianVariance;
  // family-dependent parameters:
  //   gaussian_mean_shift: mu0, mu1, sigma
  //   gaussian_variance:   var0, var1
  //   gamma:               shape0, shape1, scale
  //   poisson:             rate0, rate1
  double p1 = 0.0, p2 = 0.0, p3 = 0.0;
};

ModelPair build_model(const ModelSpec& spec);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  ModelSpec model;
  double pi0 = 0.05;
  double zeta = 0.1;
  std::optional<Strategy> strategy;       // simulate
  std::vector<Strategy> strategies;       // sweep
  int trials = 10000;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: QUICKSEEK_THREADS env, then machine parallelism
  std::uint64_t sample_cap = kDefaultSampleCap;
  double q1_0 = 0.5;
  int stages = 2;
  bool write_trials = false;
  std::optional<CalibrationSpec> calibrate;
  DpParams dp;
  double dp_cost = 0.01;

  std::string sweep_axis;          // snr | pi0 | kappa | mu_sigma_grid
  std::vector<double> sweep_values;
  std::vector<double> grid_mu, grid_sigma;  // mu_sigma_grid cells

  int check_chains = 100000;
  std::vector<double> check_pi0_list{0.05, 0.02};

  std::string canonical_json;  // resolved config, for hashing/reproducibility
  std::string config_hash;
};

struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<int> trials;
};

// Load a config file or a named preset, apply overrides, validate.
RunConfig load_config(const std::string& path_or_empty, const std::string& preset_or_empty,
                      const CliOverrides& overrides);

// Built-in preset configs: table1, table2, fig2-4, fig7, fig8.
const char* preset_text(const std::string& name);  // nullptr when unknown
std::vector<std::string> preset_names();

// Command entry points; return process exit codes
// (0 ok, 2 validation, 3 truncation failure, 4 DP non-convergence).
int run_simulate(const RunConfig& cfg, const std::string& out_dir);
int run_dp_solve(const RunConfig& cfg, const std::string& out_dir);
int run_sweep(const RunConfig& cfg, const std::string& out_dir);
int run_ratio_map(const RunConfig& cfg, const std::string& out_dir);
int run_check(const RunConfig& cfg, const std::string& out_dir);

}  // namespace quickseek
