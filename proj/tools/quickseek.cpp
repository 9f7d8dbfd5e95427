// quickseek: quickest-search simulation over multiple i.i.d. sequences.
//
// Subcommands:
//   simulate   run one strategy on one model, write summary.json (+ trials.csv)
//   dp-solve   solve the optimal two-stage policy, dump value surfaces/regions
//   sweep      evaluate strategies across an axis (snr, pi0, kappa, mu_sigma_grid)
//   ratio-map  mixed/single delay-ratio table over a parameter grid
//   check      property and oracle suites, prints PASS/FAIL lines

#include <CLI11.hpp>

#include <iostream>

#include "quickseek/optimal_mixed.hpp"
#include "quickseek/run_config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"quickest search over multiple sequences with mixed observations"};
  app.require_subcommand(1);

  std::string config_path, preset, out_dir = "out";
  quickseek::CliOverrides overrides;
  std::uint64_t seed_flag = 0;
  int threads_flag = 0, trials_flag = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "config file (JSON)");
    cmd->add_option("--preset", preset, "built-in preset: table1, table2, fig2-4, fig7, fig8");
    cmd->add_option("--out", out_dir, "output directory (default: out)");
    cmd->add_option("--seed", seed_flag, "master seed override");
    cmd->add_option("--threads", threads_flag,
                    "worker threads (0: QUICKSEEK_THREADS env, then machine parallelism)");
    cmd->add_option("--trials", trials_flag, "trial count override");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "run one strategy on one model");
  CLI::App* dp_solve = app.add_subcommand("dp-solve", "solve and dump the optimal policy");
  CLI::App* sweep = app.add_subcommand("sweep", "strategy comparison across an axis");
  CLI::App* ratio_map = app.add_subcommand("ratio-map", "mixed/single delay-ratio grid");
  CLI::App* check = app.add_subcommand("check", "property and oracle suites");
  for (CLI::App* cmd : {simulate, dp_solve, sweep, ratio_map, check}) add_common(cmd);

  CLI11_PARSE(app, argc, argv);

  if (app.count_all() > 1) {
    if (simulate->count("--seed") || dp_solve->count("--seed") || sweep->count("--seed") ||
        ratio_map->count("--seed") || check->count("--seed"))
      overrides.seed = seed_flag;
    if (threads_flag > 0) overrides.threads = threads_flag;
    if (trials_flag > 0) overrides.trials = trials_flag;
  }

  try {
    const quickseek::RunConfig cfg = quickseek::load_config(config_path, preset, overrides);
    if (simulate->parsed()) return quickseek::run_simulate(cfg, out_dir);
    if (dp_solve->parsed()) return quickseek::run_dp_solve(cfg, out_dir);
    if (sweep->parsed()) return quickseek::run_sweep(cfg, out_dir);
    if (ratio_map->parsed()) return quickseek::run_ratio_map(cfg, out_dir);
    if (check->parsed()) return quickseek::run_check(cfg, out_dir);
  } catch (const quickseek::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const quickseek::DpNotConverged& e) {
    std::cerr << "dp error: " << e.what() << " (residual " << e.residual() << ")\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
