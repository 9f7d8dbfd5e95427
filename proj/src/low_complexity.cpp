#include "quickseek/low_complexity.hpp"

#include <cmath>
#include <stdexcept>

namespace quickseek {

namespace {

double proportion_se(double p, int n) { return std::sqrt(p * (1.0 - p) / n); }

}  // namespace

LowComplexityConfig design_thresholds_lc(double pi0, double zeta, double q1_0,
                                         std::uint64_t cap) {
  if (pi0 <= 0.0 || pi0 >= 1.0) throw std::invalid_argument("pi0 must lie in (0, 1)");
  if (zeta <= 0.0 || zeta >= 1.0) throw std::invalid_argument("zeta must lie in (0, 1)");
  if (q1_0 <= 0.0 || q1_0 >= 1.0) throw std::invalid_argument("q1_0 must lie in (0, 1)");

  LowComplexityConfig cfg;
  cfg.pi0 = pi0;
  cfg.zeta = zeta;
  cfg.q1_0 = q1_0;
  cfg.sample_cap = cap;
  cfg.q_l = (zeta / 2.0) / (1.0 + zeta / 2.0);
  cfg.q_u = 1.0 / (1.0 + zeta / 2.0);
  cfg.a_s = 1.0;
  const double bs_inv = (pi0 / (1.0 - pi0)) * (zeta / (1.0 - zeta / 2.0));
  if (bs_inv >= 1.0)
    throw std::invalid_argument("degenerate budget: B_s must exceed A_s = 1");
  cfg.b_s = 1.0 / bs_inv;
  const double odds0 = (1.0 - q1_0) / q1_0;
  cfg.a_r = odds0 * cfg.q_l / (1.0 - cfg.q_l);
  cfg.b_r = odds0 * cfg.q_u / (1.0 - cfg.q_u);
  return cfg;
}

TrialRecord run_lc_trial(const ModelPair& model, const LowComplexityConfig& cfg,
                         std::mt19937_64& rng) {
  if (cfg.b_s <= 1.0 || cfg.a_r >= 1.0 || cfg.b_r <= 1.0)
    throw std::invalid_argument("invalid low-complexity thresholds");
  const double log_bs = std::log(cfg.b_s);
  const double log_ar = std::log(cfg.a_r);
  const double log_br = std::log(cfg.b_r);
  std::bernoulli_distribution is_active(cfg.pi0);

  TrialRecord rec;
  rec.strategy = Strategy::LowComplexity;
  rec.n_switches = 1;

  bool truth1 = is_active(rng);
  bool truth2 = is_active(rng);
  double w = 0.0;
  while (true) {
    if (rec.tau0 >= cfg.sample_cap) {
      rec.truncated = true;
      return rec;
    }
    const double y1 = sample(model, truth1 ? Hypothesis::H1 : Hypothesis::H0, rng);
    const double y2 = sample(model, truth2 ? Hypothesis::H1 : Hypothesis::H0, rng);
    ++rec.tau0;
    w += mixture_llr(model, 2, y1 + y2);
    if (w > log_bs) break;
    if (w < 0.0) {
      truth1 = is_active(rng);
      truth2 = is_active(rng);
      w = 0.0;
      ++rec.n_switches;
    }
  }

  // Refinement SPRT on s1 only; lower exit claims s2 without further samples.
  double wr = 0.0;
  while (true) {
    if (rec.total() >= cfg.sample_cap) {
      rec.truncated = true;
      return rec;
    }
    const double x = sample(model, truth1 ? Hypothesis::H1 : Hypothesis::H0, rng);
    ++rec.tau1;
    wr += llr(model, x);
    if (wr > log_br) {
      rec.claim_correct = truth1;
      return rec;
    }
    if (wr < log_ar) {
      rec.claim_correct = truth2;
      return rec;
    }
  }
}

SprtBounds sprt_error_bounds(const LowComplexityConfig& cfg) {
  SprtBounds b;
  b.alpha_bound = 1.0 / cfg.b_r;
  b.gamma_bound = cfg.a_r;
  b.combined_misid_bound = (1.0 - cfg.q1_0) * cfg.q_l / (1.0 - cfg.q_l) +
                           cfg.q1_0 * (1.0 - cfg.q_u) / cfg.q_u;
  return b;
}

RenewalStats estimate_renewal_mixed(const ModelPair& model, const LowComplexityConfig& cfg,
                                    int n_trials, std::mt19937_64& rng) {
  if (n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
  const double log_bs = std::log(cfg.b_s);
  RenewalStats out;
  const Density g0 = mixture_component(model, 2, 0);
  const Density g1 = mixture_component(model, 2, 1);

  for (int which = 0; which < 2; ++which) {  // 0: all-H0, 1: one-active
    const Density& gen = which == 0 ? g0 : g1;
    double sum_eta = 0.0, sumsq_eta = 0.0, sum_w = 0.0, sumsq_w = 0.0, sum_att = 0.0;
    int up_exits = 0, att_n = 0;
    for (int t = 0; t < n_trials; ++t) {
      double w = 0.0;
      std::uint64_t steps = 0;
      while (true) {
        if (steps >= cfg.sample_cap)
          throw std::runtime_error("renewal episode exceeded the sample cap");
        const double z = sample(gen, rng);
        w += mixture_llr(model, 2, z);
        ++steps;
        if (w > log_bs || w < 0.0) break;
      }
      sum_eta += static_cast<double>(steps);
      sumsq_eta += static_cast<double>(steps) * static_cast<double>(steps);
      sum_w += w;
      sumsq_w += w * w;
      if (w > log_bs) {
        ++up_exits;
        if (which == 1) {
          sum_att += std::exp(-(w - log_bs));
          ++att_n;
        }
      }
    }
    const double mean_eta = sum_eta / n_trials;
    const double se_eta =
        std::sqrt(std::max(0.0, sumsq_eta / n_trials - mean_eta * mean_eta) / n_trials);
    const double mean_w = sum_w / n_trials;
    const double se_w =
        std::sqrt(std::max(0.0, sumsq_w / n_trials - mean_w * mean_w) / n_trials);
    const double p_up = static_cast<double>(up_exits) / n_trials;
    if (which == 0) {
      out.alpha = p_up;
      out.alpha_se = proportion_se(p_up, n_trials);
      out.e0_eta = mean_eta;
      out.e0_eta_se = se_eta;
      out.e0_w = mean_w;
      out.e0_w_se = se_w;
    } else {
      out.beta = 1.0 - p_up;
      out.beta_se = proportion_se(p_up, n_trials);
      out.e1_eta = mean_eta;
      out.e1_eta_se = se_eta;
      out.e1_w = mean_w;
      out.e1_w_se = se_w;
      out.overshoot_factor = att_n > 0 ? sum_att / att_n : 1.0;
    }
  }
  return out;
}

double asymptotic_scan_delay(double pi0, Regime regime, double beta_m, double rho_m,
                             double e00_eta_m) {
  const double rho = regime == Regime::FIE ? rho_m : 0.0;
  return (1.0 - pi0) / (rho * (1.0 - pi0) + 2.0 * (1.0 - beta_m)) * e00_eta_m / pi0;
}

RefineDelayAsymptotic refine_delay_asymptotic(double zeta, const ModelPair& model) {
  if (zeta <= 0.0 || zeta >= 1.0) throw std::invalid_argument("zeta must lie in (0, 1)");
  const double d10 = kl_divergence(model, KlDirection::D10);
  const double d01 = kl_divergence(model, KlDirection::D01);
  RefineDelayAsymptotic out;
  out.delay = std::abs(std::log(zeta)) * std::max(1.0 / d01, 1.0 / d10);
  out.dominated_by_scanning = true;
  return out;
}

SprtDelays sprt_delay_wald(double alpha_sprt, double gamma_sprt, const ModelPair& model) {
  const double d10 = kl_divergence(model, KlDirection::D10);
  const double d01 = kl_divergence(model, KlDirection::D01);
  const double la = std::log((1.0 - gamma_sprt) / alpha_sprt);
  const double lb = std::log(gamma_sprt / (1.0 - alpha_sprt));
  SprtDelays d;
  d.e0 = -(alpha_sprt * la + (1.0 - alpha_sprt) * lb) / d01;
  d.e1 = ((1.0 - gamma_sprt) * la + gamma_sprt * lb) / d10;
  return d;
}

double delay_ratio_prediction(const RenewalStats& single_stats,
                              const RenewalStats& mixed_stats) {
  return (1.0 - single_stats.beta) / (2.0 * (1.0 - mixed_stats.beta)) *
         (mixed_stats.e0_eta / single_stats.e0_eta);
}

}  // namespace quickseek
