#include "quickseek/single_search.hpp"

#include <cmath>
#include <stdexcept>

namespace quickseek {

namespace {

double proportion_se(double p, int n) { return std::sqrt(p * (1.0 - p) / n); }

struct Moments {
  double sum = 0.0, sumsq = 0.0;
  int n = 0;
  void add(double x) { sum += x; sumsq += x * x; ++n; }
  double mean() const { return sum / n; }
  double se() const {
    const double m = mean();
    const double var = std::max(0.0, sumsq / n - m * m);
    return std::sqrt(var / n);
  }
};

}  // namespace

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Single: return "single";
    case Strategy::LowComplexity: return "low_complexity";
    case Strategy::Optimal: return "optimal";
    case Strategy::MultiStage: return "multistage";
  }
  return "?";
}

SingleConfig design_threshold_single(double pi0, double zeta, std::uint64_t cap) {
  if (pi0 <= 0.0 || pi0 >= 1.0) throw std::invalid_argument("pi0 must lie in (0, 1)");
  if (zeta <= 0.0 || zeta >= 1.0) throw std::invalid_argument("zeta must lie in (0, 1)");
  const double b_inv = (zeta / (1.0 - zeta)) * (pi0 / (1.0 - pi0));
  if (b_inv >= 1.0)
    throw std::invalid_argument("degenerate budget: threshold B must exceed A = 1");
  return SingleConfig{pi0, zeta, 1.0 / b_inv, cap};
}

TrialRecord run_single_trial(const ModelPair& model, const SingleConfig& cfg,
                             std::mt19937_64& rng) {
  if (cfg.b <= 1.0) throw std::invalid_argument("threshold B must exceed 1");
  const double log_b = std::log(cfg.b);
  std::bernoulli_distribution is_active(cfg.pi0);

  TrialRecord rec;
  rec.strategy = Strategy::Single;
  rec.n_switches = 1;
  bool truth = is_active(rng);  // ground truth drawn lazily per visited sequence
  double w = 0.0;
  while (true) {
    if (rec.tau0 >= cfg.sample_cap) {
      rec.truncated = true;
      return rec;
    }
    const double y = sample(model, truth ? Hypothesis::H1 : Hypothesis::H0, rng);
    ++rec.tau0;
    w += llr(model, y);
    if (w > log_b) {
      rec.claim_correct = truth;
      return rec;
    }
    if (w < 0.0) {
      truth = is_active(rng);
      w = 0.0;
      ++rec.n_switches;
    }
  }
}

RenewalStats estimate_renewal(const ModelPair& model, const SingleConfig& cfg,
                              int n_trials, std::mt19937_64& rng) {
  if (n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
  const double log_b = std::log(cfg.b);
  RenewalStats out;

  for (int hyp = 0; hyp < 2; ++hyp) {
    const Hypothesis h = hyp == 0 ? Hypothesis::H0 : Hypothesis::H1;
    Moments dwell, stopped_w, atten;
    int up_exits = 0;
    for (int t = 0; t < n_trials; ++t) {
      double w = 0.0;
      std::uint64_t steps = 0;
      while (true) {
        if (steps >= cfg.sample_cap)
          throw std::runtime_error("renewal episode exceeded the sample cap");
        w += llr(model, sample(model, h, rng));
        ++steps;
        if (w > log_b || w < 0.0) break;
      }
      dwell.add(static_cast<double>(steps));
      stopped_w.add(w);
      if (w > log_b) {
        ++up_exits;
        if (h == Hypothesis::H1) atten.add(std::exp(-(w - log_b)));
      }
    }
    const double p_up = static_cast<double>(up_exits) / n_trials;
    if (h == Hypothesis::H0) {
      out.alpha = p_up;
      out.alpha_se = proportion_se(p_up, n_trials);
      out.e0_eta = dwell.mean();
      out.e0_eta_se = dwell.se();
      out.e0_w = stopped_w.mean();
      out.e0_w_se = stopped_w.se();
    } else {
      out.beta = 1.0 - p_up;
      out.beta_se = proportion_se(p_up, n_trials);
      out.e1_eta = dwell.mean();
      out.e1_eta_se = dwell.se();
      out.e1_w = stopped_w.mean();
      out.e1_w_se = stopped_w.se();
      out.overshoot_factor = atten.n > 0 ? atten.mean() : 1.0;
    }
  }
  return out;
}

AsdFip asd_fip_from_renewal(const RenewalStats& s, double pi0) {
  const double denom = pi0 * (1.0 - s.beta) + (1.0 - pi0) * s.alpha;
  if (denom <= 0.0)
    throw std::domain_error("absorbing-at-reset configuration: zero termination probability");
  const double num_delay = pi0 * s.e1_eta + (1.0 - pi0) * s.e0_eta;
  return {num_delay / denom, (1.0 - pi0) * s.alpha / denom};
}

double asymptotic_asd_single(double pi0, Regime regime, const RenewalStats& s) {
  const double rho = regime == Regime::FIE ? s.alpha / pi0 : 0.0;
  return (1.0 - pi0) / (rho * (1.0 - pi0) + (1.0 - s.beta)) * s.e0_eta / pi0;
}

}  // namespace quickseek
