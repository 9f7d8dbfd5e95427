#pragma once

#include <vector>

#include "quickseek/harness.hpp"

namespace quickseek {

// alpha ~ B^{-1} (1 - beta) * E[e^{-overshoot}]; factor 1 is the conservative
// design bound.
double alpha_asymptotic(double b, double beta, double overshoot_factor = 1.0);

struct PredictRow {
  double pi0 = 0.0;
  // predictions from renewal estimates
  double single_asd_pred = 0.0;
  double scan_delay_pred = 0.0;
  double refine_delay_pred = 0.0;
  double mixed_asd_pred = 0.0;
  double ratio_pred = 0.0;
  // Monte Carlo counterparts
  double single_asd_sim = 0.0;
  double mixed_asd_sim = 0.0;
  double ratio_sim = 0.0;
  // relative gaps (pred - sim) / sim
  double single_gap = 0.0;
  double mixed_gap = 0.0;
};

struct PredictReportOptions {
  int n_renewal = 20000;
  int n_trials = 10000;
  int threads = 1;
  std::uint64_t seed = 1;
};

// Prediction-vs-simulation comparison per prior; predictions use renewal
// quantities estimated under the design thresholds for this zeta.
std::vector<PredictRow> predict_report(const ModelPair& model,
                                       const std::vector<double>& pi0_list, double zeta,
                                       Regime regime, const PredictReportOptions& opt);

}  // namespace quickseek
