#include "quickseek/models.hpp"

#include <unsupported/Eigen/SpecialFunctions>

#include <cmath>
#include <stdexcept>

namespace quickseek {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void check_density(const Density& d) {
  switch (d.kind) {
    case Density::Kind::Gaussian:
      require(d.b > 0.0, "gaussian variance must be positive");
      break;
    case Density::Kind::Gamma:
      require(d.a > 0.0 && d.b > 0.0, "gamma shape and scale must be positive");
      break;
    case Density::Kind::Poisson:
      require(d.a > 0.0, "poisson rate must be positive");
      break;
  }
}

bool same_params(const Density& x, const Density& y) {
  return x.a == y.a && x.b == y.b;
}

}  // namespace

double log_pdf(const Density& d, double y) {
  switch (d.kind) {
    case Density::Kind::Gaussian: {
      const double r = y - d.a;
      return -0.5 * (kLog2Pi + std::log(d.b)) - r * r / (2.0 * d.b);
    }
    case Density::Kind::Gamma: {
      if (y < 0.0) throw std::domain_error("gamma observation must be nonnegative");
      if (y == 0.0) {
        if (d.a == 1.0) return -std::log(d.b);
        return d.a > 1.0 ? -std::numeric_limits<double>::infinity()
                         : std::numeric_limits<double>::infinity();
      }
      return (d.a - 1.0) * std::log(y) - y / d.b - d.a * std::log(d.b) - std::lgamma(d.a);
    }
    case Density::Kind::Poisson: {
      if (y < 0.0 || y != std::floor(y))
        throw std::domain_error("poisson observation must be a nonnegative integer");
      return y * std::log(d.a) - d.a - std::lgamma(y + 1.0);
    }
  }
  return 0.0;
}

double pdf(const Density& d, double y) { return std::exp(log_pdf(d, y)); }

double sample(const Density& d, std::mt19937_64& rng) {
  switch (d.kind) {
    case Density::Kind::Gaussian: {
      std::normal_distribution<double> dist(d.a, std::sqrt(d.b));
      return dist(rng);
    }
    case Density::Kind::Gamma: {
      std::gamma_distribution<double> dist(d.a, d.b);
      return dist(rng);
    }
    case Density::Kind::Poisson: {
      std::poisson_distribution<long> dist(d.a);
      return static_cast<double>(dist(rng));
    }
  }
  return 0.0;
}

double mean(const Density& d) {
  switch (d.kind) {
    case Density::Kind::Gaussian: return d.a;
    case Density::Kind::Gamma: return d.a * d.b;
    case Density::Kind::Poisson: return d.a;
  }
  return 0.0;
}

double variance(const Density& d) {
  switch (d.kind) {
    case Density::Kind::Gaussian: return d.b;
    case Density::Kind::Gamma: return d.a * d.b * d.b;
    case Density::Kind::Poisson: return d.a;
  }
  return 0.0;
}

bool is_discrete(const Density& d) { return d.kind == Density::Kind::Poisson; }

double kl(const Density& p, const Density& q) {
  require(p.kind == q.kind, "kl requires densities of the same kind");
  switch (p.kind) {
    case Density::Kind::Gaussian: {
      const double dm = p.a - q.a;
      return 0.5 * (std::log(q.b / p.b) + (p.b + dm * dm) / q.b - 1.0);
    }
    case Density::Kind::Gamma: {
      // General shape/scale form; collapses when the scales agree.
      const double psi_p = Eigen::numext::digamma(p.a);
      return (p.a - q.a) * psi_p - std::lgamma(p.a) + std::lgamma(q.a) +
             q.a * std::log(q.b / p.b) + p.a * (p.b - q.b) / q.b;
    }
    case Density::Kind::Poisson:
      return p.a * std::log(p.a / q.a) - p.a + q.a;
  }
  return 0.0;
}

Interval effective_support(const Density& d) {
  switch (d.kind) {
    case Density::Kind::Gaussian: {
      const double sd = std::sqrt(d.b);
      return {d.a - 7.5 * sd, d.a + 7.5 * sd};
    }
    case Density::Kind::Gamma: {
      // Laurent-Massart tail bound at e^{-t} = 1e-10.
      const double t = 23.03;
      return {0.0, d.b * (d.a + 2.0 * std::sqrt(d.a * t) + 2.0 * t)};
    }
    case Density::Kind::Poisson: {
      const double hi = std::ceil(d.a + 12.0 * std::sqrt(d.a) + 45.0);
      return {0.0, hi};
    }
  }
  return {0.0, 0.0};
}

namespace {

ModelPair make_pair(Family fam, Density f0, Density f1) {
  check_density(f0);
  check_density(f1);
  require(!same_params(f0, f1), "f0 and f1 must differ");
  return ModelPair{fam, f0, f1};
}

}  // namespace

ModelPair gaussian_mean_shift(double mu0, double mu1, double sigma) {
  require(sigma > 0.0, "sigma must be positive");
  return make_pair(Family::GaussianMeanShift,
                   {Density::Kind::Gaussian, mu0, sigma * sigma},
                   {Density::Kind::Gaussian, mu1, sigma * sigma});
}

ModelPair gaussian_variance(double var0, double var1) {
  return make_pair(Family::GaussianVariance,
                   {Density::Kind::Gaussian, 0.0, var0},
                   {Density::Kind::Gaussian, 0.0, var1});
}

ModelPair gamma_pair(double shape0, double shape1, double scale) {
  // Shared scale keeps the k-fold convolutions closed-form.
  return make_pair(Family::Gamma,
                   {Density::Kind::Gamma, shape0, scale},
                   {Density::Kind::Gamma, shape1, scale});
}

ModelPair poisson_pair(double rate0, double rate1) {
  return make_pair(Family::Poisson,
                   {Density::Kind::Poisson, rate0, 0.0},
                   {Density::Kind::Poisson, rate1, 0.0});
}

const Density& density_of(const ModelPair& m, Hypothesis h) {
  return h == Hypothesis::H0 ? m.f0 : m.f1;
}

double density(const ModelPair& m, Hypothesis h, double y) {
  return pdf(density_of(m, h), y);
}

double llr(const ModelPair& m, double y) {
  return log_pdf(m.f1, y) - log_pdf(m.f0, y);
}

double sample(const ModelPair& m, Hypothesis h, std::mt19937_64& rng) {
  return sample(density_of(m, h), rng);
}

double kl_divergence(const ModelPair& m, KlDirection dir) {
  return dir == KlDirection::D10 ? kl(m.f1, m.f0) : kl(m.f0, m.f1);
}

Density mixture_component(const ModelPair& m, int n_mixed, int n_active) {
  require(n_mixed >= 1, "n_mixed must be >= 1");
  require(n_active >= 0 && n_active <= n_mixed, "n_active out of range");
  const double a = static_cast<double>(n_active);
  const double b = static_cast<double>(n_mixed - n_active);
  switch (m.f0.kind) {
    case Density::Kind::Gaussian:
      return {Density::Kind::Gaussian, a * m.f1.a + b * m.f0.a, a * m.f1.b + b * m.f0.b};
    case Density::Kind::Gamma:
      return {Density::Kind::Gamma, a * m.f1.a + b * m.f0.a, m.f0.b};
    case Density::Kind::Poisson:
      return {Density::Kind::Poisson, a * m.f1.a + b * m.f0.a, 0.0};
  }
  return m.f0;
}

double mixture_density(const ModelPair& m, const MixtureDensity& mix, double z) {
  return pdf(mixture_component(m, mix.n_mixed, mix.n_active), z);
}

double mixture_log_density(const ModelPair& m, const MixtureDensity& mix, double z) {
  return log_pdf(mixture_component(m, mix.n_mixed, mix.n_active), z);
}

double mixture_llr(const ModelPair& m, int n_mixed, double z) {
  return log_pdf(mixture_component(m, n_mixed, 1), z) -
         log_pdf(mixture_component(m, n_mixed, 0), z);
}

Interval effective_support(const ModelPair& m, int n_mixed) {
  Interval out{std::numeric_limits<double>::infinity(),
               -std::numeric_limits<double>::infinity()};
  for (int a = 0; a <= n_mixed; ++a) {
    const Interval s = effective_support(mixture_component(m, n_mixed, a));
    out.lo = std::min(out.lo, s.lo);
    out.hi = std::max(out.hi, s.hi);
  }
  return out;
}

std::string family_name(Family f) {
  switch (f) {
    case Family::GaussianMeanShift: return "gaussian_mean_shift";
    case Family::GaussianVariance: return "gaussian_variance";
    case Family::Gamma: return "gamma";
    case Family::Poisson: return "poisson";
  }
  return "?";
}

}  // namespace quickseek
