#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <vector>

namespace quickseek {

// Interpolation stencil: at most dim+1 nodes with convex weights.
struct SimplexStencil {
  int count = 0;
  std::array<std::uint32_t, 4> index{};
  std::array<double, 4> weight{};
};

// Regular barycentric grid on the probability simplex with n_coords
// components (n_coords = dim + 1). Nodes are the integer compositions m / M
// with |m| = M = resolution - 1. Piecewise-linear interpolation uses the
// Freudenthal triangulation computed in staircase (tail-sum) coordinates, so
// every stencil vertex is itself a valid grid node.
class SimplexGrid {
 public:
  SimplexGrid(int n_coords, int resolution);

  int n_coords() const { return n_coords_; }
  int resolution() const { return subdiv_ + 1; }
  int subdivisions() const { return subdiv_; }
  std::uint32_t node_count() const { return static_cast<std::uint32_t>(nodes_.rows()); }

  // node_count x n_coords matrix of barycentric coordinates.
  const Eigen::MatrixXd& nodes() const { return nodes_; }

  std::uint32_t index_of(const int* m) const;

  // point: barycentric coordinates (n_coords entries, sum ~ 1).
  SimplexStencil stencil(const double* point) const;
  double interpolate(const Eigen::ArrayXd& values, const double* point) const;

 private:
  int n_coords_;
  int subdiv_;
  Eigen::MatrixXd nodes_;
  std::vector<std::uint32_t> offset1_;  // dim 3: prefix over m[0]
};

}  // namespace quickseek
