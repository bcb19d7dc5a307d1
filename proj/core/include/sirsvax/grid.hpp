#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sirsvax/model.hpp"

namespace sirsvax {

/// Uniform triangular node set {(j h, k h) : j + k <= n - 1}, h = 1/(n - 1),
/// covering the closed simplex. Nodes are stored row by row in j (the s
/// index); row j holds n - j nodes.
class SimplexGrid {
 public:
  explicit SimplexGrid(int n);

  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] double h() const { return h_; }
  [[nodiscard]] std::size_t size() const;

  [[nodiscard]] bool contains(int j, int k) const {
    return j >= 0 && k >= 0 && j + k <= n_ - 1;
  }
  [[nodiscard]] std::size_t index(int j, int k) const {
    return row_offset(j) + static_cast<std::size_t>(k);
  }
  [[nodiscard]] State node(int j, int k) const { return {j * h_, k * h_}; }

  /// Interior nodes have all four axis neighbours inside the grid.
  [[nodiscard]] bool is_interior(int j, int k) const {
    return j >= 1 && k >= 1 && j + k <= n_ - 2;
  }

  /// Calls fn(j, k, index) for every node in storage order.
  template <class Fn>
  void for_each_node(Fn&& fn) const {
    std::size_t idx = 0;
    for (int j = 0; j < n_; ++j) {
      for (int k = 0; j + k <= n_ - 1; ++k) fn(j, k, idx++);
    }
  }

  /// Piecewise-linear interpolation on the two triangles of each cell. Points
  /// are first clamped onto the closed simplex.
  [[nodiscard]] double interpolate(std::span<const double> nodal, double s,
                                   double i) const;

  friend bool operator==(const SimplexGrid& a, const SimplexGrid& b) {
    return a.n_ == b.n_;
  }

 private:
  [[nodiscard]] std::size_t row_offset(int j) const {
    const auto jj = static_cast<std::size_t>(j);
    const auto nn = static_cast<std::size_t>(n_);
    return jj * nn - jj * (jj - (jj > 0 ? 1 : 0)) / 2;
  }

  int n_;
  double h_;
};

/// Grid-sampled value function with its finite-difference s-derivative.
struct ValueField {
  SimplexGrid grid;
  std::vector<double> values;
  std::vector<double> gradient_s;

  explicit ValueField(SimplexGrid g)
      : grid(g), values(g.size(), 0.0), gradient_s(g.size(), 0.0) {}

  [[nodiscard]] double value_at(double s, double i) const {
    return grid.interpolate(values, s, i);
  }
  [[nodiscard]] double gradient_s_at(double s, double i) const {
    return grid.interpolate(gradient_s, s, i);
  }
};

/// Finite-difference derivative of nodal data along s: central where both
/// s-neighbours exist, one-sided where one is missing.
std::vector<double> derivative_s(const SimplexGrid& grid,
                                 std::span<const double> nodal);
/// Same along i.
std::vector<double> derivative_i(const SimplexGrid& grid,
                                 std::span<const double> nodal);

/// Recomputes field.gradient_s from field.values.
void gradient_fd(ValueField& field);

}  // namespace sirsvax
