#include "sirsvax/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <fstream>
#include <stdexcept>

#include "csv.hpp"

namespace sirsvax {

double u_star_quadratic(double s, double p_s, double b, double u_max) {
  if (s <= 0.0 || p_s <= 0.0) return 0.0;
  if (p_s >= b * u_max * s) return u_max;
  return p_s / (b * s);
}

ScalarMinimum u_star_generic(const State& x, double p_s, const CostModel& cost,
                             double u_max) {
  auto objective = [&](double u) { return cost(x.s, x.i, u) - u * x.s * p_s; };

  bool violated = false;
  {
    const double f0 = objective(0.0);
    const double f2 = objective(0.5 * u_max);
    const double f4 = objective(u_max);
    const double f1 = objective(0.25 * u_max);
    const double f3 = objective(0.75 * u_max);
    auto bad = [](double lo, double mid, double hi) {
      const double chord = 0.5 * (lo + hi);
      return mid > chord + 1e-12 * (1.0 + std::abs(chord));
    };
    violated = bad(f0, f2, f4) || bad(f0, f1, f2) || bad(f1, f2, f3) ||
               bad(f2, f3, f4);
  }

  // Bisection on the sign of a difference quotient. For a convex objective
  // the quotient is nondecreasing in u, and it is exact for quadratics.
  const double delta = 1e-6 * u_max;
  auto slope = [&](double u) {
    const double lo = std::max(0.0, u - delta);
    const double hi = std::min(u_max, u + delta);
    return (objective(hi) - objective(lo)) / (hi - lo);
  };
  double lo = 0.0;
  double hi = u_max;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (slope(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  double u = 0.5 * (lo + hi);
  double fu = objective(u);

  // When the objective is nearly flat in u (small s) the quotient's sign is
  // decided by roundoff. A parabola through three wide samples around the
  // bracket recovers the vertex; keep it only if it is no worse.
  const double w = 0.25 * u_max;
  const double x1 = std::clamp(u - 0.5 * w, 0.0, u_max - w);
  const double f1 = objective(x1);
  const double f2 = objective(x1 + 0.5 * w);
  const double f3 = objective(x1 + w);
  const double denom = f1 - 2.0 * f2 + f3;
  if (denom > 0.0) {
    const double v = std::clamp(x1 + 0.5 * w + 0.25 * w * (f1 - f3) / denom, 0.0, u_max);
    const double fv = objective(v);
    if (fv <= fu + 4.0 * std::numeric_limits<double>::epsilon() * std::abs(fu)) {
      u = v;
      fu = fv;
    }
  }
  return {u, fu, violated};
}

double u_star(const State& x, double p_s, const CostModel& cost,
              double u_max) {
  if (cost.is_quadratic()) {
    return u_star_quadratic(x.s, p_s, cost.quadratic_weights().b, u_max);
  }
  return u_star_generic(x, p_s, cost, u_max).argmin;
}

std::size_t FeedbackPolicy::kink_count() const {
  return static_cast<std::size_t>(std::count(kink.begin(), kink.end(), 1));
}

FeedbackPolicy constant_policy(const SimplexGrid& grid, double u) {
  FeedbackPolicy policy(grid);
  std::fill(policy.u_star.begin(), policy.u_star.end(), u);
  policy.u_forward = policy.u_star;
  policy.u_backward = policy.u_star;
  return policy;
}

FeedbackPolicy tabulate_policy(const ValueField& field, const CostModel& cost,
                               const EpidemicParams& params) {
  const SimplexGrid& grid = field.grid;
  const double h = grid.h();
  const auto& v = field.values;
  FeedbackPolicy policy(grid);
  grid.for_each_node([&](int j, int k, std::size_t idx) {
    const State x = grid.node(j, k);
    const double u = u_star(x, field.gradient_s[idx], cost, params.u_max);
    policy.u_star[idx] = u;
    policy.u_forward[idx] = u;
    policy.u_backward[idx] = u;
    if (!grid.contains(j - 1, k) || !grid.contains(j + 1, k)) return;
    const double forward = (v[grid.index(j + 1, k)] - v[idx]) / h;
    const double backward = (v[idx] - v[grid.index(j - 1, k)]) / h;
    if (std::abs(forward - backward) <= 10.0 * h) return;
    const double uf = u_star(x, forward, cost, params.u_max);
    const double ub = u_star(x, backward, cost, params.u_max);
    policy.u_forward[idx] = uf;
    policy.u_backward[idx] = ub;
    if (std::abs(uf - ub) > 1e-12) policy.kink[idx] = 1;
  });
  return policy;
}

void write_policy_csv(std::ostream& out, const FeedbackPolicy& policy) {
  out << "s,i,ustar\n";
  policy.grid.for_each_node([&](int j, int k, std::size_t idx) {
    const State x = policy.grid.node(j, k);
    detail::put_row(out, {x.s, x.i, policy.u_star[idx]});
  });
}

void write_policy_csv(const std::string& path, const FeedbackPolicy& policy) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  write_policy_csv(out, policy);
}

namespace detail {

int grid_n_from_count(std::size_t count) {
  const auto n = static_cast<int>(
      std::lround((std::sqrt(8.0 * static_cast<double>(count) + 1.0) - 1.0) / 2.0));
  if (n < 2 || static_cast<std::size_t>(n) * (n + 1) / 2 != count) {
    throw std::runtime_error("csv: node count is not triangular");
  }
  return n;
}

}  // namespace detail

FeedbackPolicy read_policy_csv(std::istream& in) {
  const auto table = detail::read_csv(in, {"s", "i", "ustar"});
  const SimplexGrid grid(detail::grid_n_from_count(table.rows.size()));
  FeedbackPolicy policy(grid);
  grid.for_each_node([&](int j, int k, std::size_t idx) {
    const auto& row = table.rows[idx];
    const State x = grid.node(j, k);
    if (std::abs(row[0] - x.s) > 1e-9 || std::abs(row[1] - x.i) > 1e-9) {
      throw std::runtime_error("policy csv: nodes out of order");
    }
    policy.u_star[idx] = row[2];
  });
  policy.u_forward = policy.u_star;
  policy.u_backward = policy.u_star;
  return policy;
}

FeedbackPolicy read_policy_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_policy_csv(in);
}

}  // namespace sirsvax
