#include "quickseek/multistage.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace quickseek {

MultiStageConfig design_thresholds_multi(double pi0, double zeta, int stages,
                                         std::uint64_t cap) {
  if (pi0 <= 0.0 || pi0 >= 1.0) throw std::invalid_argument("pi0 must lie in (0, 1)");
  if (zeta <= 0.0 || zeta >= 1.0) throw std::invalid_argument("zeta must lie in (0, 1)");
  if (stages < 1) throw std::invalid_argument("stage count must be >= 1");

  MultiStageConfig cfg;
  cfg.stages = stages;
  cfg.pi0 = pi0;
  cfg.zeta = zeta;
  cfg.sample_cap = cap;

  // Scanning keeps the two-sequence threshold scaled by the number of
  // one-active arrangements among 2^K sequences, so the all-H0 entry
  // probability stays below zeta/2.
  const double arrangements = std::ldexp(1.0, stages - 1);  // 2^(K-1)
  const double bs_inv = arrangements * (pi0 / (1.0 - pi0)) * (zeta / (1.0 - zeta / 2.0));
  if (bs_inv >= 1.0)
    throw std::invalid_argument("degenerate budget: scanning threshold must exceed 1");
  cfg.b_scan = 1.0 / bs_inv;

  // Stage budget zeta/(2K); with q1_0 = 1/2 the odds mapping gives
  // A_i = zeta/(2K) and B_i = 2K/zeta.
  const double stage_budget = zeta / (2.0 * stages);
  for (int i = 0; i < stages; ++i) {
    cfg.a_refine.push_back(stage_budget);
    cfg.b_refine.push_back(1.0 / stage_budget);
  }
  return cfg;
}

TrialRecord run_multistage_trial(const ModelPair& model, const MultiStageConfig& cfg,
                                 std::mt19937_64& rng) {
  if (cfg.stages < 1) throw std::invalid_argument("stage count must be >= 1");
  if (cfg.b_scan <= 1.0) throw std::invalid_argument("scanning threshold must exceed 1");
  const int n_seq = 1 << cfg.stages;
  const double log_bs = std::log(cfg.b_scan);
  std::bernoulli_distribution is_active(cfg.pi0);

  TrialRecord rec;
  rec.strategy = Strategy::MultiStage;
  rec.n_switches = 1;

  std::vector<bool> truth(n_seq);
  auto redraw = [&] {
    for (int i = 0; i < n_seq; ++i) truth[i] = is_active(rng);
  };
  auto observe_sum = [&](int lo, int count) {
    double z = 0.0;
    for (int i = lo; i < lo + count; ++i)
      z += sample(model, truth[i] ? Hypothesis::H1 : Hypothesis::H0, rng);
    return z;
  };

  redraw();
  double w = 0.0;
  while (true) {
    if (rec.tau0 >= cfg.sample_cap) {
      rec.truncated = true;
      return rec;
    }
    const double z = observe_sum(0, n_seq);
    ++rec.tau0;
    w += mixture_llr(model, n_seq, z);
    if (w > log_bs) break;
    if (w < 0.0) {
      redraw();
      w = 0.0;
      ++rec.n_switches;
    }
  }

  // Binary-search refinement: stage i tests the first half of the remaining
  // candidates, "contains >= 1 active" vs "all H0", with worst-case mixtures.
  int lo = 0;
  int size = n_seq;
  for (int stage = 0; stage < cfg.stages; ++stage) {
    const int half = size / 2;
    const double log_a = std::log(cfg.a_refine[stage]);
    const double log_b = std::log(cfg.b_refine[stage]);
    double wr = 0.0;
    while (true) {
      if (rec.total() >= cfg.sample_cap) {
        rec.truncated = true;
        return rec;
      }
      const double x = observe_sum(lo, half);
      ++rec.tau1;
      wr += mixture_llr(model, half, x);
      if (wr > log_b) {
        size = half;  // keep observed group
        break;
      }
      if (wr < log_a) {
        lo += half;  // keep the other group
        size = half;
        break;
      }
    }
  }
  rec.claim_correct = truth[lo];
  return rec;
}

double multistage_separation(const ModelPair& model, int stages) {
  const int n = 1 << stages;
  return kl(mixture_component(model, n, 1), mixture_component(model, n, 0));
}

namespace {

// ---- toy decomposition check (K = 2, binary observations) ----

using Belief16 = std::array<double, 16>;

int actives_in(int config, int lo, int count) {
  const int mask = ((1 << count) - 1) << lo;
  return __builtin_popcount(static_cast<unsigned>(config & mask));
}

Belief16 prior_belief(double pi0) {
  Belief16 b{};
  for (int cfg = 0; cfg < 16; ++cfg) {
    double p = 1.0;
    for (int i = 0; i < 4; ++i) p *= (cfg >> i) & 1 ? pi0 : 1.0 - pi0;
    b[cfg] = p;
  }
  return b;
}

// P(head | belief) given a per-active-count head table over the observed set.
double head_prob(const Belief16& b, const std::vector<double>& table, int lo, int count) {
  double p = 0.0;
  for (int cfg = 0; cfg < 16; ++cfg) p += b[cfg] * table[actives_in(cfg, lo, count)];
  return p;
}

Belief16 bayes(const Belief16& b, const std::vector<double>& table, int lo, int count,
               bool head) {
  Belief16 out{};
  double norm = 0.0;
  for (int cfg = 0; cfg < 16; ++cfg) {
    const double like = table[actives_in(cfg, lo, count)];
    out[cfg] = b[cfg] * (head ? like : 1.0 - like);
    norm += out[cfg];
  }
  for (double& v : out) v /= norm;
  return out;
}

double marginal_active(const Belief16& b, int idx) {
  double p = 0.0;
  for (int cfg = 0; cfg < 16; ++cfg)
    if ((cfg >> idx) & 1) p += b[cfg];
  return p;
}

struct ToyCtx {
  const ToyBinaryModel* toy;
  int horizon;
};

// Terminal claim on the two survivors (a observed first).
double claim_cost(const Belief16& b, int a, int bb) {
  return 1.0 - std::max(marginal_active(b, a), marginal_active(b, bb));
}

double stage2_value(const ToyCtx& ctx, const Belief16& b, int a, int bb, int t) {
  const double stop_cost = claim_cost(b, a, bb);
  if (t == 0) return stop_cost;
  const double ph = head_prob(b, ctx.toy->group1_head, a, 1);
  const double cont =
      ctx.toy->cost +
      ph * stage2_value(ctx, bayes(b, ctx.toy->group1_head, a, 1, true), a, bb, t - 1) +
      (1.0 - ph) *
          stage2_value(ctx, bayes(b, ctx.toy->group1_head, a, 1, false), a, bb, t - 1);
  return std::min(stop_cost, cont);
}

double stage1_stop_value(const ToyCtx& ctx, const Belief16& b) {
  // Select a group; next stage observes its first member.
  return std::min(stage2_value(ctx, b, 0, 1, ctx.horizon),
                  stage2_value(ctx, b, 2, 3, ctx.horizon));
}

double stage1_value(const ToyCtx& ctx, const Belief16& b, int t) {
  const double stop_cost = stage1_stop_value(ctx, b);
  if (t == 0) return stop_cost;
  const double ph = head_prob(b, ctx.toy->group2_head, 0, 2);
  const double cont =
      ctx.toy->cost +
      ph * stage1_value(ctx, bayes(b, ctx.toy->group2_head, 0, 2, true), t - 1) +
      (1.0 - ph) * stage1_value(ctx, bayes(b, ctx.toy->group2_head, 0, 2, false), t - 1);
  return std::min(stop_cost, cont);
}

double scan_value(const ToyCtx& ctx, const Belief16& b, const Belief16& prior, int t) {
  const double stop_cost = stage1_value(ctx, b, ctx.horizon);
  if (t == 0) return stop_cost;
  auto continue_from = [&](const Belief16& base) {
    const double ph = head_prob(base, ctx.toy->scan_head, 0, 4);
    return ph * scan_value(ctx, bayes(base, ctx.toy->scan_head, 0, 4, true), prior, t - 1) +
           (1.0 - ph) *
               scan_value(ctx, bayes(base, ctx.toy->scan_head, 0, 4, false), prior, t - 1);
  };
  const double cont = ctx.toy->cost + std::min(continue_from(b), continue_from(prior));
  return std::min(stop_cost, cont);
}

// Joint optimization over the full history tree: one recursion across all
// phases, carrying unnormalized per-config likelihood weights instead of the
// staged sufficient statistics.
struct JointCtx {
  const ToyBinaryModel* toy;
  int horizon;
};

double joint_phase2(const JointCtx& ctx, const Belief16& like, int a, int bb, int t);

double joint_claim(const Belief16& like, int a, int bb) {
  double norm = 0.0, pa = 0.0, pb = 0.0;
  for (int cfg = 0; cfg < 16; ++cfg) {
    norm += like[cfg];
    if ((cfg >> a) & 1) pa += like[cfg];
    if ((cfg >> bb) & 1) pb += like[cfg];
  }
  return 1.0 - std::max(pa, pb) / norm;
}

// Expected continuation over the binary observation, with P(obs | history)
// computed from the raw likelihood weights.
template <typename Recurse>
double joint_expect(const JointCtx& ctx, const Belief16& like,
                    const std::vector<double>& table, int lo, int count, Recurse rec) {
  double norm = 0.0, ph = 0.0;
  for (int cfg = 0; cfg < 16; ++cfg) {
    norm += like[cfg];
    ph += like[cfg] * table[actives_in(cfg, lo, count)];
  }
  ph /= norm;
  Belief16 wh{}, wt{};
  for (int cfg = 0; cfg < 16; ++cfg) {
    const double l = table[actives_in(cfg, lo, count)];
    wh[cfg] = like[cfg] * l;
    wt[cfg] = like[cfg] * (1.0 - l);
  }
  return ctx.toy->cost + ph * rec(wh) + (1.0 - ph) * rec(wt);
}

double joint_phase2(const JointCtx& ctx, const Belief16& like, int a, int bb, int t) {
  const double stop_cost = joint_claim(like, a, bb);
  if (t == 0) return stop_cost;
  const double cont =
      joint_expect(ctx, like, ctx.toy->group1_head, a, 1, [&](const Belief16& w) {
        return joint_phase2(ctx, w, a, bb, t - 1);
      });
  return std::min(stop_cost, cont);
}

double joint_phase1(const JointCtx& ctx, const Belief16& like, int t) {
  const double stop_cost = std::min(joint_phase2(ctx, like, 0, 1, ctx.horizon),
                                    joint_phase2(ctx, like, 2, 3, ctx.horizon));
  if (t == 0) return stop_cost;
  const double cont =
      joint_expect(ctx, like, ctx.toy->group2_head, 0, 2, [&](const Belief16& w) {
        return joint_phase1(ctx, w, t - 1);
      });
  return std::min(stop_cost, cont);
}

double joint_scan(const JointCtx& ctx, const Belief16& like, const Belief16& prior, int t) {
  const double stop_cost = joint_phase1(ctx, like, ctx.horizon);
  if (t == 0) return stop_cost;
  auto expect_from = [&](const Belief16& base) {
    return joint_expect(ctx, base, ctx.toy->scan_head, 0, 4, [&](const Belief16& w) {
      return joint_scan(ctx, w, prior, t - 1);
    });
  };
  const double cont = std::min(expect_from(like), expect_from(prior));
  return std::min(stop_cost, cont);
}

}  // namespace

DecompositionCheck multistage_dp_decomposition_check(const ToyBinaryModel& toy, int stages,
                                                     int horizon, double tol) {
  if (stages != 2) throw std::invalid_argument("decomposition check is built for K = 2");
  if (horizon < 0 || horizon > 3)
    throw std::invalid_argument("toy horizon must lie in [0, 3]");
  if (toy.scan_head.size() != 5 || toy.group2_head.size() != 3 || toy.group1_head.size() != 2)
    throw std::invalid_argument("toy head tables must cover group active counts");

  const Belief16 prior = prior_belief(toy.pi0);
  ToyCtx sc{&toy, horizon};
  JointCtx jc{&toy, horizon};
  DecompositionCheck out;
  out.staged = scan_value(sc, prior, prior, horizon);
  out.joint = joint_scan(jc, prior, prior, horizon);
  out.pass = std::abs(out.staged - out.joint) <= tol;
  return out;
}

}  // namespace quickseek
