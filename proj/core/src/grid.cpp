#include "sirsvax/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sirsvax {

SimplexGrid::SimplexGrid(int n) : n_(n), h_(0.0) {
  if (n < 2) throw std::invalid_argument("SimplexGrid: need n >= 2");
  h_ = 1.0 / static_cast<double>(n - 1);
}

std::size_t SimplexGrid::size() const {
  const auto nn = static_cast<std::size_t>(n_);
  return nn * (nn + 1) / 2;
}

double SimplexGrid::interpolate(std::span<const double> nodal, double s,
                                double i) const {
  s = std::clamp(s, 0.0, 1.0);
  i = std::clamp(i, 0.0, 1.0 - s);
  const double x = s / h_;
  const double y = i / h_;
  const int j = std::min(static_cast<int>(x), n_ - 2);
  const int k = std::min(static_cast<int>(y), n_ - 2 - j);
  const double a = x - j;
  const double b = y - k;
  const double v10 = nodal[index(j + 1, k)];
  const double v01 = nodal[index(j, k + 1)];
  if (a + b <= 1.0 || j + k + 2 > n_ - 1) {
    const double v00 = nodal[index(j, k)];
    return v00 + a * (v10 - v00) + b * (v01 - v00);
  }
  const double v11 = nodal[index(j + 1, k + 1)];
  return v11 + (1.0 - a) * (v01 - v11) + (1.0 - b) * (v10 - v11);
}

namespace {

// Difference along one axis. `step_j`/`step_k` pick the axis.
std::vector<double> axis_derivative(const SimplexGrid& grid,
                                    std::span<const double> v, int step_j,
                                    int step_k) {
  if (v.size() != grid.size()) {
    throw std::invalid_argument("derivative: nodal data does not match grid");
  }
  const double h = grid.h();
  std::vector<double> d(grid.size(), 0.0);
  grid.for_each_node([&](int j, int k, std::size_t idx) {
    const bool has_prev = grid.contains(j - step_j, k - step_k);
    const bool has_next = grid.contains(j + step_j, k + step_k);
    if (has_prev && has_next) {
      d[idx] = (v[grid.index(j + step_j, k + step_k)] -
                v[grid.index(j - step_j, k - step_k)]) /
               (2.0 * h);
    } else if (has_next) {
      d[idx] = (v[grid.index(j + step_j, k + step_k)] - v[idx]) / h;
    } else if (has_prev) {
      d[idx] = (v[idx] - v[grid.index(j - step_j, k - step_k)]) / h;
    } else {
      // Corner opposite the axis: borrow the one-sided difference of the
      // adjacent row.
      const int j0 = j - step_k;
      const int k0 = k - step_j;
      d[idx] = (v[grid.index(j0 + step_j, k0 + step_k)] - v[grid.index(j0, k0)]) / h;
    }
  });
  return d;
}

}  // namespace

std::vector<double> derivative_s(const SimplexGrid& grid,
                                 std::span<const double> nodal) {
  return axis_derivative(grid, nodal, 1, 0);
}

std::vector<double> derivative_i(const SimplexGrid& grid,
                                 std::span<const double> nodal) {
  return axis_derivative(grid, nodal, 0, 1);
}

void gradient_fd(ValueField& field) {
  field.gradient_s = derivative_s(field.grid, field.values);
}

}  // namespace sirsvax
