#include "quickseek/simplex_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace quickseek {

SimplexGrid::SimplexGrid(int n_coords, int resolution)
    : n_coords_(n_coords), subdiv_(resolution - 1) {
  if (n_coords != 3 && n_coords != 4)
    throw std::invalid_argument("simplex grid supports 3 or 4 barycentric coordinates");
  if (resolution < 11) throw std::invalid_argument("resolution must be >= 11");

  const int M = subdiv_;
  std::uint32_t count = 0;
  if (n_coords_ == 3) {
    count = static_cast<std::uint32_t>((M + 1) * (M + 2) / 2);
  } else {
    offset1_.assign(M + 2, 0);
    for (int a = 0; a <= M; ++a) {
      const int s = M - a;
      offset1_[a + 1] = offset1_[a] + static_cast<std::uint32_t>((s + 1) * (s + 2) / 2);
    }
    count = offset1_[M + 1];
  }

  nodes_.resize(count, n_coords_);
  const double h = 1.0 / M;
  std::uint32_t row = 0;
  if (n_coords_ == 3) {
    for (int m1 = 0; m1 <= M; ++m1)
      for (int m2 = 0; m2 + m1 <= M; ++m2) {
        nodes_(row, 0) = m1 * h;
        nodes_(row, 1) = m2 * h;
        nodes_(row, 2) = (M - m1 - m2) * h;
        ++row;
      }
  } else {
    for (int m1 = 0; m1 <= M; ++m1)
      for (int m2 = 0; m2 + m1 <= M; ++m2)
        for (int m3 = 0; m3 + m2 + m1 <= M; ++m3) {
          nodes_(row, 0) = m1 * h;
          nodes_(row, 1) = m2 * h;
          nodes_(row, 2) = m3 * h;
          nodes_(row, 3) = (M - m1 - m2 - m3) * h;
          ++row;
        }
  }
}

std::uint32_t SimplexGrid::index_of(const int* m) const {
  const int M = subdiv_;
  if (n_coords_ == 3) {
    const int m1 = m[0], m2 = m[1];
    return static_cast<std::uint32_t>(m1 * (M + 1) - m1 * (m1 - 1) / 2 + m2);
  }
  const int m1 = m[0], m2 = m[1], m3 = m[2];
  const int r = M - m1;
  const std::uint32_t inner =
      static_cast<std::uint32_t>(m2 * (r + 1) - m2 * (m2 - 1) / 2 + m3);
  return offset1_[m1] + inner;
}

SimplexStencil SimplexGrid::stencil(const double* point) const {
  const int M = subdiv_;
  const int d = n_coords_ - 1;

  // Staircase coordinates t_j = M * (x_{j+1} + ... + x_n), nonincreasing.
  double t[3];
  double tail = 0.0;
  for (int j = d - 1; j >= 0; --j) {
    tail += point[j + 1];
    t[j] = std::clamp(tail * M, 0.0, static_cast<double>(M));
  }
  for (int j = d - 2; j >= 0; --j) t[j] = std::max(t[j], t[j + 1]);

  int base[3];
  double frac[3];
  for (int j = 0; j < d; ++j) {
    base[j] = std::clamp(static_cast<int>(std::floor(t[j])), 0, M);
    frac[j] = t[j] - base[j];
    if (base[j] == M) frac[j] = 0.0;  // exact upper edge
  }

  // Sort axes by descending fraction (ties by index) for the Kuhn simplex.
  int order[3] = {0, 1, 2};
  std::sort(order, order + d, [&](int a, int b) {
    if (frac[a] != frac[b]) return frac[a] > frac[b];
    return a < b;
  });

  SimplexStencil st;
  st.count = d + 1;
  int vert[3] = {base[0], base[1], base[2]};
  auto emit = [&](int slot, double w) {
    // Map staircase vertex back to a composition.
    int m[4];
    m[0] = M - vert[0];
    for (int j = 1; j < d; ++j) m[j] = vert[j - 1] - vert[j];
    m[d] = vert[d - 1];
    for (int j = 0; j <= d; ++j) m[j] = std::max(m[j], 0);
    st.index[slot] = index_of(m);
    st.weight[slot] = w;
  };

  emit(0, 1.0 - frac[order[0]]);
  for (int k = 0; k < d; ++k) {
    const int axis = order[k];
    vert[axis] = std::min(vert[axis] + 1, M);
    const double w = (k + 1 < d) ? frac[order[k]] - frac[order[k + 1]] : frac[order[k]];
    emit(k + 1, w);
  }
  return st;
}

double SimplexGrid::interpolate(const Eigen::ArrayXd& values, const double* point) const {
  const SimplexStencil st = stencil(point);
  double out = 0.0;
  for (int k = 0; k < st.count; ++k) out += st.weight[k] * values[st.index[k]];
  return out;
}

}  // namespace quickseek
