#pragma once

#include <random>

#include "quickseek/models.hpp"
#include "quickseek/trial_record.hpp"

namespace quickseek {

// Single-observation CUSUM search. The trial runs the LLR random walk W_k
// with lower threshold log A = 0 (switch/reset) and upper threshold log B
// (claim); equivalent to the posterior rule through the odds mapping.
struct SingleConfig {
  double pi0 = 0.05;
  double zeta = 0.1;
  double b = 171.0;  // upper LR threshold, > 1; lower threshold A fixed to 1
  std::uint64_t sample_cap = kDefaultSampleCap;
};

// Per-sequence dwell-time quantities estimated by Monte Carlo.
struct RenewalStats {
  double alpha = 0.0, alpha_se = 0.0;   // P0(up-exit)
  double beta = 0.0, beta_se = 0.0;     // P1(down-exit)
  double e0_eta = 1.0, e0_eta_se = 0.0;  // E0[eta]
  double e1_eta = 1.0, e1_eta_se = 0.0;  // E1[eta]
  // E1[exp(-(W_eta - log B)) | up-exit]; empirical overshoot attenuation.
  double overshoot_factor = 1.0;
  // Mean stopped walk values, for Wald-identity reports.
  double e0_w = 0.0, e0_w_se = 0.0;
  double e1_w = 0.0, e1_w_se = 0.0;
};

enum class Regime { FIE, RIE };

SingleConfig design_threshold_single(double pi0, double zeta,
                                     std::uint64_t sample_cap = kDefaultSampleCap);

TrialRecord run_single_trial(const ModelPair& model, const SingleConfig& cfg,
                             std::mt19937_64& rng);

RenewalStats estimate_renewal(const ModelPair& model, const SingleConfig& cfg,
                              int n_trials, std::mt19937_64& rng);

// Renewal-representation estimators of the search-level metrics.
struct AsdFip {
  double asd = 0.0;
  double fip = 0.0;
};
AsdFip asd_fip_from_renewal(const RenewalStats& stats, double pi0);

// Leading-order ASD as pi0 -> 0; FIE uses rho = alpha/pi0, RIE sets rho = 0.
double asymptotic_asd_single(double pi0, Regime regime, const RenewalStats& stats);

}  // namespace quickseek
