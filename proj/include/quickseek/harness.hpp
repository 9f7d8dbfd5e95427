#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "quickseek/low_complexity.hpp"
#include "quickseek/models.hpp"
#include "quickseek/multistage.hpp"
#include "quickseek/optimal_mixed.hpp"
#include "quickseek/single_search.hpp"
#include "quickseek/trial_record.hpp"

namespace quickseek {

struct SimSummary {
  Strategy strategy = Strategy::Single;
  int n_trials = 0;
  double asd = 0.0, asd_se = 0.0;
  double fip = 0.0, fip_se = 0.0;
  double mean_tau0 = 0.0, mean_tau1 = 0.0;
  double mean_switches = 0.0;
  int truncated = 0;
  bool truncation_failure = false;  // > 0.1% of trials truncated
};

using TrialFn = std::function<TrialRecord(std::mt19937_64&, std::uint64_t seed)>;

// Runs n independent trials with per-trial RNG streams split from the master
// seed by trial index; the reduction is sequential over trial order, so the
// summary is bit-identical for any thread count.
SimSummary evaluate(Strategy strategy, const TrialFn& trial, int n_trials,
                    std::uint64_t master_seed, int threads,
                    std::vector<TrialRecord>* keep_records = nullptr);

SimSummary evaluate_single(const ModelPair& model, const SingleConfig& cfg, int n_trials,
                           std::uint64_t master_seed, int threads,
                           std::vector<TrialRecord>* keep_records = nullptr);
SimSummary evaluate_lc(const ModelPair& model, const LowComplexityConfig& cfg,
                       int n_trials, std::uint64_t master_seed, int threads,
                       std::vector<TrialRecord>* keep_records = nullptr);
SimSummary evaluate_multistage(const ModelPair& model, const MultiStageConfig& cfg,
                               int n_trials, std::uint64_t master_seed, int threads,
                               std::vector<TrialRecord>* keep_records = nullptr);
SimSummary evaluate_optimal(const OptimalPolicy& policy, int n_trials,
                            std::uint64_t master_seed, int threads,
                            std::vector<TrialRecord>* keep_records = nullptr);

struct CalibrationSpec {
  double target_fip = 0.1;
  double tolerance = 0.01;
  int trials_per_probe = 4000;
  int max_probes = 24;
};

struct CalibrationResult {
  double knob = 0.0;        // B, B_s or c
  double achieved_fip = 0.0;
  bool converged = false;
  std::vector<std::pair<double, double>> probes;  // (knob, fip)
};

// Bisection in log-knob space; `eval_fip` must be deterministic in (knob,
// probe index). Throws when the initial bracket does not straddle the target.
CalibrationResult calibrate_fip(const std::function<double(double, int)>& eval_fip,
                                double knob_lo, double knob_hi, bool increasing,
                                const CalibrationSpec& spec);

// Reusable DP context: the expectation operators do not depend on c, so one
// build serves every probe of a calibration.
class OptimalSolver {
 public:
  OptimalSolver(const ModelPair& model, double pi0, const DpParams& params,
                std::uint64_t sample_cap = kDefaultSampleCap);
  OptimalPolicy solve(double c) const;
  const DpParams& params() const { return params_; }

 private:
  ModelPair model_;
  double pi0_;
  DpParams params_;
  std::uint64_t sample_cap_;
  ObsModel refine_obs_;
  RefineOperator refine_op_;
  MixObsModel mix_obs_;
  ScanOperator scan_op_;
};

// One strategy on one model: analytic thresholds by default, calibrated
// scalar knob (B / B_s / c) when a calibration spec is given.
struct StrategyRunOptions {
  double zeta = 0.1;
  int trials = 10000;
  int threads = 1;
  std::uint64_t seed = 1;
  std::uint64_t sample_cap = kDefaultSampleCap;
  double q1_0 = 0.5;
  int stages = 2;          // multistage only
  double optimal_c = 0.01; // used when no calibration is requested
  DpParams dp;
  std::optional<CalibrationSpec> calibrate;
  std::vector<TrialRecord>* capture = nullptr;  // final-evaluation records
};

struct StrategyRunResult {
  SimSummary summary;
  double knob = 0.0;  // B, B_s, c, or B_scan
  std::optional<CalibrationResult> calibration;
  std::vector<std::string> warnings;
};

StrategyRunResult run_strategy(Strategy strategy, const ModelPair& model, double pi0,
                               const StrategyRunOptions& options);

// |E[W_eta] - E[eta] E[l]| in combined-standard-error units, per hypothesis.
struct WaldReport {
  double h0_diff = 0.0, h0_sigma = 0.0;
  double h1_diff = 0.0, h1_sigma = 0.0;
};
WaldReport wald_identity_check(const ModelPair& model, const SingleConfig& cfg, int n,
                               std::uint64_t seed);
WaldReport wald_identity_check_mixed(const ModelPair& model,
                                     const LowComplexityConfig& cfg, int n,
                                     std::uint64_t seed);

}  // namespace quickseek
