#include "quickseek/asymptotics.hpp"

#include <cmath>
#include <stdexcept>

#include "quickseek/rng.hpp"

namespace quickseek {

double alpha_asymptotic(double b, double beta, double overshoot_factor) {
  if (b <= 1.0) throw std::invalid_argument("threshold must exceed 1");
  if (overshoot_factor <= 0.0 || overshoot_factor > 1.0)
    throw std::invalid_argument("overshoot factor must lie in (0, 1]");
  return (1.0 - beta) * overshoot_factor / b;
}

std::vector<PredictRow> predict_report(const ModelPair& model,
                                       const std::vector<double>& pi0_list, double zeta,
                                       Regime regime, const PredictReportOptions& opt) {
  std::vector<PredictRow> rows;
  rows.reserve(pi0_list.size());
  std::uint64_t idx = 0;
  for (const double pi0 : pi0_list) {
    PredictRow row;
    row.pi0 = pi0;

    const SingleConfig single_cfg = design_threshold_single(pi0, zeta);
    const LowComplexityConfig lc_cfg = design_thresholds_lc(pi0, zeta);

    std::mt19937_64 rng_s = make_stream(opt.seed, 10 * idx + 1);
    const RenewalStats rs = estimate_renewal(model, single_cfg, opt.n_renewal, rng_s);
    std::mt19937_64 rng_m = make_stream(opt.seed, 10 * idx + 2);
    const RenewalStats rm = estimate_renewal_mixed(model, lc_cfg, opt.n_renewal, rng_m);

    row.single_asd_pred = asymptotic_asd_single(pi0, regime, rs);
    const double rho_m = regime == Regime::FIE ? rm.alpha / pi0 : 0.0;
    row.scan_delay_pred = asymptotic_scan_delay(pi0, regime, rm.beta, rho_m, rm.e0_eta);
    row.refine_delay_pred = refine_delay_asymptotic(zeta, model).delay;
    row.mixed_asd_pred = row.scan_delay_pred + row.refine_delay_pred;
    row.ratio_pred = delay_ratio_prediction(rs, rm);

    const SimSummary sim_single = evaluate_single(model, single_cfg, opt.n_trials,
                                                  derive_seed(opt.seed, 10 * idx + 3),
                                                  opt.threads);
    const SimSummary sim_lc = evaluate_lc(model, lc_cfg, opt.n_trials,
                                          derive_seed(opt.seed, 10 * idx + 4),
                                          opt.threads);
    row.single_asd_sim = sim_single.asd;
    row.mixed_asd_sim = sim_lc.asd;
    row.ratio_sim = sim_lc.asd / sim_single.asd;
    row.single_gap = (row.single_asd_pred - row.single_asd_sim) / row.single_asd_sim;
    row.mixed_gap = (row.mixed_asd_pred - row.mixed_asd_sim) / row.mixed_asd_sim;
    rows.push_back(row);
    ++idx;
  }
  return rows;
}

}  // namespace quickseek
