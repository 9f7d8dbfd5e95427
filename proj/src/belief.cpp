#include "quickseek/belief.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace quickseek {

namespace {

constexpr double kSnap = 1e-12;

// Normalize exp(a_i) / sum_j exp(a_j) with max subtraction; -inf entries map
// to exact zeros. Snaps to a vertex when one component carries all the mass.
void normalize_log(double* a, double* out, int n) {
  double m = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) m = std::max(m, a[i]);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    out[i] = std::isinf(a[i]) && a[i] < 0.0 ? 0.0 : std::exp(a[i] - m);
    s += out[i];
  }
  for (int i = 0; i < n; ++i) out[i] /= s;
  for (int i = 0; i < n; ++i) {
    if (out[i] >= 1.0 - kSnap) {
      for (int j = 0; j < n; ++j) out[j] = 0.0;
      out[i] = 1.0;
      return;
    }
  }
}

double safe_log(double p) {
  return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

}  // namespace

ScanBelief scan_prior(double pi0) {
  if (pi0 < 0.0 || pi0 > 1.0) throw std::invalid_argument("pi0 must lie in [0, 1]");
  return {pi0 * pi0, 2.0 * pi0 * (1.0 - pi0), (1.0 - pi0) * (1.0 - pi0)};
}

RefineBelief refine_init(const ScanBelief& p) {
  return {p.p11, p.pmix / 2.0, p.pmix / 2.0, p.p00};
}

SingleBelief update_single(const SingleBelief& belief, double pi0, double z,
                           bool switched, const ModelPair& model) {
  const double base = switched ? pi0 : belief.pi;
  if (base <= 0.0) return {0.0};
  if (base >= 1.0) return {1.0};
  // log-odds update; equivalent to the ratio form but immune to under/overflow
  const double lo = std::log(base / (1.0 - base)) + llr(model, z);
  double pi = 1.0 / (1.0 + std::exp(-lo));
  if (pi >= 1.0 - kSnap) pi = 1.0;
  if (pi <= kSnap) pi = 0.0;
  return {pi};
}

ScanBelief update_scan(const ScanBelief& belief, const ScanBelief& prior, double z,
                       bool switched, const ModelPair& model) {
  const ScanBelief& base = switched ? prior : belief;
  double lg[3] = {mixture_log_density(model, {2, 2}, z),
                  mixture_log_density(model, {2, 1}, z),
                  mixture_log_density(model, {2, 0}, z)};
  double a[3] = {safe_log(base.p11) + lg[0], safe_log(base.pmix) + lg[1],
                 safe_log(base.p00) + lg[2]};
  double out[3];
  normalize_log(a, out, 3);
  return {out[0], out[1], out[2]};
}

RefineBelief update_refine(const RefineBelief& belief, double x, const ModelPair& model) {
  const double l1 = log_pdf(model.f1, x);
  const double l0 = log_pdf(model.f0, x);
  double a[4] = {safe_log(belief.r11) + l1, safe_log(belief.r10) + l1,
                 safe_log(belief.r01) + l0, safe_log(belief.r00) + l0};
  double out[4];
  normalize_log(a, out, 4);
  return {out[0], out[1], out[2], out[3]};
}

QStats q_stats(const RefineBelief& b) {
  return {b.r11 + b.r10, b.r11 + b.r01};
}

double refine_lr(double q1_0, double q1_j) {
  if (q1_0 <= 0.0 || q1_0 >= 1.0 || q1_j <= 0.0 || q1_j >= 1.0)
    throw std::domain_error("refine_lr requires interior probabilities");
  return (q1_j / (1.0 - q1_j)) * ((1.0 - q1_0) / q1_0);
}

double update_q1(double q1, double x, const ModelPair& model) {
  if (q1 <= 0.0) return 0.0;
  if (q1 >= 1.0) return 1.0;
  const double lo = std::log(q1 / (1.0 - q1)) + llr(model, x);
  double out = 1.0 / (1.0 + std::exp(-lo));
  if (out >= 1.0 - kSnap) out = 1.0;
  if (out <= kSnap) out = 0.0;
  return out;
}

}  // namespace quickseek
