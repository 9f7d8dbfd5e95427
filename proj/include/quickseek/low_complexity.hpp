#pragma once

#include <random>

#include "quickseek/models.hpp"
#include "quickseek/single_search.hpp"
#include "quickseek/trial_record.hpp"

namespace quickseek {

// Scanning CUSUM on the worst-case mixture LR g1/g0 followed by an SPRT on
// the first candidate sequence.
struct LowComplexityConfig {
  double pi0 = 0.05;
  double zeta = 0.1;
  double a_s = 1.0;    // scanning lower LR threshold, fixed to 1
  double b_s = 180.5;  // scanning upper LR threshold
  double q_l = 0.0, q_u = 1.0;  // refinement posterior thresholds
  double a_r = 0.05, b_r = 20.0;  // refinement LR thresholds
  double q1_0 = 0.5;   // refinement start posterior
  std::uint64_t sample_cap = kDefaultSampleCap;
};

LowComplexityConfig design_thresholds_lc(double pi0, double zeta, double q1_0 = 0.5,
                                         std::uint64_t sample_cap = kDefaultSampleCap);

TrialRecord run_lc_trial(const ModelPair& model, const LowComplexityConfig& cfg,
                         std::mt19937_64& rng);

// SPRT error bounds alpha_sprt < 1/B_r, gamma_sprt < A_r.
struct SprtBounds {
  double alpha_bound = 0.0;
  double gamma_bound = 0.0;
  double combined_misid_bound = 0.0;  // (1-q1_0) qL/(1-qL) + q1_0 (1-qU)/qU
};
SprtBounds sprt_error_bounds(const LowComplexityConfig& cfg);

// Dwell-time quantities of the scanning walk under the all-H0 and one-active
// mixtures; reuses RenewalStats with (alpha, e0) for H00 and (beta, e1) for mix.
RenewalStats estimate_renewal_mixed(const ModelPair& model, const LowComplexityConfig& cfg,
                                    int n_trials, std::mt19937_64& rng);

// Leading-order scanning delay as pi0 -> 0 (FIE keeps rho_m, RIE drops it).
double asymptotic_scan_delay(double pi0, Regime regime, double beta_m, double rho_m,
                             double e00_eta_m);

// Order-level refinement delay |log zeta| * max(1/D01, 1/D10); negligible
// next to the scanning term, which grows like 1/pi0.
struct RefineDelayAsymptotic {
  double delay = 0.0;
  bool dominated_by_scanning = true;
};
RefineDelayAsymptotic refine_delay_asymptotic(double zeta, const ModelPair& model);

// Wald-approximation SPRT delays for both hypotheses (the pre-collapse form
// behind the |log zeta| order statement).
struct SprtDelays {
  double e0 = 0.0;
  double e1 = 0.0;
};
SprtDelays sprt_delay_wald(double alpha_sprt, double gamma_sprt, const ModelPair& model);

// Ratio bound ((1-beta)/(2(1-beta_m))) * (E00[eta_m] / E0[eta]).
double delay_ratio_prediction(const RenewalStats& single_stats,
                              const RenewalStats& mixed_stats);

}  // namespace quickseek
