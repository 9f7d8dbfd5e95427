#pragma once

#include <random>
#include <vector>

#include "quickseek/models.hpp"
#include "quickseek/trial_record.hpp"

namespace quickseek {

// 2^K-sequence scanning followed by K binary-search refinement stages, each
// an SPRT on worst-case group mixtures. K = 1 reduces exactly to the
// two-sequence low-complexity strategy.
struct MultiStageConfig {
  int stages = 1;      // K
  double pi0 = 0.05;
  double zeta = 0.1;
  double b_scan = 0.0;                 // scanning upper LR threshold (A = 1)
  std::vector<double> a_refine;        // per-stage lower LR thresholds, < 1
  std::vector<double> b_refine;        // per-stage upper LR thresholds, > 1
  std::uint64_t sample_cap = kDefaultSampleCap;
};

// Budget split: scanning zeta/2, each refinement stage zeta/(2K) split
// symmetrically across its SPRT exits.
MultiStageConfig design_thresholds_multi(double pi0, double zeta, int stages,
                                         std::uint64_t sample_cap = kDefaultSampleCap);

TrialRecord run_multistage_trial(const ModelPair& model, const MultiStageConfig& cfg,
                                 std::mt19937_64& rng);

// KL distance between the one-active and all-H0 scanning mixtures; flags the
// regime where mixing 2^K sequences stops being informative.
double multistage_separation(const ModelPair& model, int stages);

// Toy instance for the stopping-time decomposition check: binary (head/tail)
// observations whose head probability depends only on the number of active
// sequences in the observed group.
struct ToyBinaryModel {
  double pi0 = 0.25;
  double cost = 0.05;
  std::vector<double> scan_head;    // P(head | n active among 4), n = 0..4
  std::vector<double> group2_head;  // P(head | n active among observed pair), n = 0..2
  std::vector<double> group1_head;  // P(head | observed sequence active), n = 0..1
};

struct DecompositionCheck {
  double joint = 0.0;   // full-history tree optimization
  double staged = 0.0;  // concatenated per-stage backward induction
  bool pass = false;
};

// K = 2 instance, per-phase horizon T <= 3; exhaustive enumeration of the
// observation tree on both sides.
DecompositionCheck multistage_dp_decomposition_check(const ToyBinaryModel& toy, int stages,
                                                     int horizon, double tol = 1e-12);

}  // namespace quickseek
