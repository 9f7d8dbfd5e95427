#pragma once

#include "quickseek/models.hpp"

namespace quickseek {

// Posterior that the currently observed sequence is generated by f1.
struct SingleBelief {
  double pi = 0.0;
};

// Scanning-stage posterior over the joint state of the observed pair.
struct ScanBelief {
  double p11 = 0.0;
  double pmix = 0.0;
  double p00 = 0.0;
};

// Refinement-stage posterior over (s1, s2) joint states.
struct RefineBelief {
  double r11 = 0.0;
  double r10 = 0.0;
  double r01 = 0.0;
  double r00 = 0.0;
};

struct QStats {
  double q1 = 0.0;  // P(s1 ~ f1)
  double q2 = 0.0;  // P(s2 ~ f1)
};

ScanBelief scan_prior(double pi0);
RefineBelief refine_init(const ScanBelief& at_stop);

// Bayes updates, computed in log space with max-subtraction normalization.
// Components within 1e-12 of a vertex are snapped to the vertex.
SingleBelief update_single(const SingleBelief& belief, double pi0, double z,
                           bool switched, const ModelPair& model);
ScanBelief update_scan(const ScanBelief& belief, const ScanBelief& prior, double z,
                       bool switched, const ModelPair& model);
RefineBelief update_refine(const RefineBelief& belief, double x, const ModelPair& model);

QStats q_stats(const RefineBelief& belief);

// L^{(refine)} = (q1_j / (1-q1_j)) * ((1-q1_0) / q1_0).
double refine_lr(double q1_0, double q1_j);

// Scalar Bayes update of q1 by the ratio f1/f0, the one-dimensional SPRT view
// of the refinement recursion.
double update_q1(double q1, double x, const ModelPair& model);

}  // namespace quickseek
