#include "quickseek/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace quickseek {

Quadrature gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("quadrature order must be >= 1");
  // Jacobi matrix of the Legendre recurrence; eigenvalues are the nodes on
  // [-1, 1], weights come from the first components of the eigenvectors.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double beta = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = beta;
    jacobi(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  Quadrature q;
  q.x = (0.5 * (b - a)) * es.eigenvalues().array() + 0.5 * (a + b);
  q.w = (b - a) * es.eigenvectors().row(0).array().square();
  return q;
}

Quadrature model_quadrature(const ModelPair& m, int n_mixed, int n_points) {
  const Interval s = effective_support(m, n_mixed);
  if (is_discrete(m.f0)) {
    const int hi = static_cast<int>(s.hi);
    Quadrature q;
    q.x = Eigen::ArrayXd::LinSpaced(hi + 1, 0.0, static_cast<double>(hi));
    q.w = Eigen::ArrayXd::Ones(hi + 1);
    return q;
  }
  return gauss_legendre(n_points, s.lo, s.hi);
}

}  // namespace quickseek
