#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace quickseek {

// Hypothesis pairs supported by the search strategies. All four families are
// closed under summation of independent samples (shared scale for gamma), so
// the densities of mixed observations stay in-family.
enum class Family { GaussianMeanShift, GaussianVariance, Gamma, Poisson };

enum class Hypothesis : int { H0 = 0, H1 = 1 };

enum class KlDirection { D10, D01 };  // D10 = D(f1 || f0)

// One concrete distribution. Meaning of (a, b) depends on kind:
//   Gaussian: mean, variance   Gamma: shape, scale   Poisson: rate, unused
struct Density {
  enum class Kind { Gaussian, Gamma, Poisson } kind;
  double a = 0.0;
  double b = 0.0;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

double log_pdf(const Density& d, double y);
double pdf(const Density& d, double y);
double sample(const Density& d, std::mt19937_64& rng);
double mean(const Density& d);
double variance(const Density& d);
bool is_discrete(const Density& d);

// KL divergence D(p || q); p and q must be of the same kind.
double kl(const Density& p, const Density& q);

// Interval carrying all but <= 1e-10 of the probability mass, used by every
// quadrature in the DP and the normalization checks.
Interval effective_support(const Density& d);

// The hypothesis pair (f0, f1).
struct ModelPair {
  Family family;
  Density f0;
  Density f1;
};

ModelPair gaussian_mean_shift(double mu0, double mu1, double sigma);
ModelPair gaussian_variance(double var0, double var1);
ModelPair gamma_pair(double shape0, double shape1, double scale);
ModelPair poisson_pair(double rate0, double rate1);

// Sum of n_mixed independent samples with n_active of them drawn from f1.
struct MixtureDensity {
  int n_mixed = 1;
  int n_active = 0;
};

const Density& density_of(const ModelPair& m, Hypothesis h);
double density(const ModelPair& m, Hypothesis h, double y);
double llr(const ModelPair& m, double y);  // log(f1(y)/f0(y))
double sample(const ModelPair& m, Hypothesis h, std::mt19937_64& rng);
double kl_divergence(const ModelPair& m, KlDirection dir);

// Density of the n_mixed-fold sum; stays in-family for all four families.
Density mixture_component(const ModelPair& m, int n_mixed, int n_active);
double mixture_density(const ModelPair& m, const MixtureDensity& mix, double z);
double mixture_log_density(const ModelPair& m, const MixtureDensity& mix, double z);

// log(g1/g0) for the n-fold mixture, the worst-case scanning LLR.
double mixture_llr(const ModelPair& m, int n_mixed, double z);

// Hull of the effective supports of all mixtures with this n_mixed.
Interval effective_support(const ModelPair& m, int n_mixed);

std::string family_name(Family f);

}  // namespace quickseek
