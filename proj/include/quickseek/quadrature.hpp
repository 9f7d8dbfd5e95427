#pragma once

#include <Eigen/Core>

#include "quickseek/models.hpp"

namespace quickseek {

struct Quadrature {
  Eigen::ArrayXd x;
  Eigen::ArrayXd w;
};

// Gauss-Legendre rule on [a, b] via the Golub-Welsch eigenvalue method.
Quadrature gauss_legendre(int n, double a, double b);

// Nodes/weights for integrating against a model family: Gauss-Legendre on the
// effective support for continuous families, exact summation (unit weights on
// integers) for Poisson.
Quadrature model_quadrature(const ModelPair& m, int n_mixed, int n_points);

}  // namespace quickseek
