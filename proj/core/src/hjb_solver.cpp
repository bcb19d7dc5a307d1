#include "sirsvax/hjb_solver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <stdexcept>

#include "csv.hpp"
#include "sirsvax/integrator.hpp"
#include "sirsvax/policy.hpp"

namespace sirsvax {

void SolverConfig::validate() const {
  if (grid_n < 3) throw std::invalid_argument("SolverConfig: grid_n < 3");
  if (!(time_step > 0.0)) throw std::invalid_argument("SolverConfig: time_step <= 0");
  if (!(horizon > 0.0)) throw std::invalid_argument("SolverConfig: horizon <= 0");
  if (!(fix_point_tol > 0.0)) {
    throw std::invalid_argument("SolverConfig: fix_point_tol <= 0");
  }
  if (max_iters < 1) throw std::invalid_argument("SolverConfig: max_iters < 1");
  if (!(relaxation > 0.0 && relaxation <= 1.0)) {
    throw std::invalid_argument("SolverConfig: relaxation outside (0, 1]");
  }
}

double SolverConfig::absolute_tolerance(const EpidemicParams& params,
                                        const CostModel& cost) const {
  if (!tol_relative || params.r <= 0.0) return fix_point_tol;
  return fix_point_tol * cost.upper_bound(params.u_max) / params.r;
}

double c_star(const State& x, double p_s, const CostModel& cost,
              const EpidemicParams& params) {
  const double u = u_star(x, p_s, cost, params.u_max);
  return cost(x.s, x.i, u) - u * x.s * p_s;
}

UncontrolledFlows::UncontrolledFlows(const SimplexGrid& grid,
                                     const SolverConfig& cfg,
                                     const EpidemicParams& params)
    : grid_(grid), samples_(0), terminal_discount_(0.0) {
  cfg.validate();
  params.validate();
  const auto steps = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(cfg.horizon / cfg.time_step - 1e-9)));
  const double h = cfg.horizon / static_cast<double>(steps);
  samples_ = steps + 1;

  weights_.resize(samples_);
  for (std::size_t k = 0; k < samples_; ++k) {
    const double trap = (k == 0 || k == steps) ? 0.5 : 1.0;
    weights_[k] = trap * h * std::exp(-params.r * static_cast<double>(k) * h);
  }
  terminal_discount_ = std::exp(-params.r * cfg.horizon);

  s_.resize(grid.size() * samples_);
  i_.resize(grid.size() * samples_);
  grid.for_each_node([&](int j, int k, std::size_t idx) {
    State x = grid.node(j, k);
    float* ps = s_.data() + idx * samples_;
    float* pi = i_.data() + idx * samples_;
    ps[0] = static_cast<float>(x.s);
    pi[0] = static_cast<float>(x.i);
    for (std::size_t m = 1; m < samples_; ++m) {
      x = clamp_to_simplex(rk4_step(x, 0.0, h, params));
      ps[m] = static_cast<float>(x.s);
      pi[m] = static_cast<float>(x.i);
    }
  });
}

namespace {

std::size_t step_count(const SolverConfig& cfg) {
  return std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(cfg.horizon / cfg.time_step - 1e-9)));
}

// Row i = 0 is invariant under the dynamics and not part of the open domain;
// its nodes only serve interpolation and differencing near i -> 0+.
void close_infection_free_row(ValueField& field, const SolverConfig& cfg) {
  if (cfg.infection_free_row != InfectionFreeRow::kCopyInterior) return;
  const SimplexGrid& grid = field.grid;
  const int n = grid.n();
  for (int j = 0; j <= n - 2; ++j) {
    field.values[grid.index(j, 0)] = field.values[grid.index(j, 1)];
  }
  field.values[grid.index(n - 1, 0)] = field.values[grid.index(n - 2, 1)];
}

// One representation-formula sweep along the flow driven by the tabulated
// control `feedback` (sample-and-hold over each RK4 step).
ValueField flow_sweep(const ValueField& prev, const std::vector<double>& feedback,
                      const SolverConfig& cfg, const EpidemicParams& params,
                      const CostModel& cost) {
  const SimplexGrid& grid = prev.grid;
  const std::size_t steps = step_count(cfg);
  const double h = cfg.horizon / static_cast<double>(steps);
  std::vector<double> discount(steps + 1);
  for (std::size_t m = 0; m <= steps; ++m) {
    discount[m] = std::exp(-params.r * static_cast<double>(m) * h);
  }

  ValueField next(grid);
  grid.for_each_node([&](int j, int k, std::size_t idx) {
    State x = grid.node(j, k);
    double acc = 0.0;
    for (std::size_t m = 0; m < steps; ++m) {
      const double u = std::clamp(grid.interpolate(feedback, x.s, x.i), 0.0, params.u_max);
      const double c0 = cost(x.s, x.i, u);
      x = clamp_to_simplex(rk4_step(x, u, h, params));
      acc += 0.5 * h * (discount[m] * c0 + discount[m + 1] * cost(x.s, x.i, u));
    }
    next.values[idx] = acc + discount[steps] * prev.value_at(x.s, x.i);
  });
  close_infection_free_row(next, cfg);
  gradient_fd(next);
  return next;
}

ValueField feedback_sweep(const ValueField& prev, const SolverConfig& cfg,
                          const EpidemicParams& params, const CostModel& cost) {
  const SimplexGrid& grid = prev.grid;
  std::vector<double> feedback(grid.size());
  grid.for_each_node([&](int j, int k, std::size_t idx) {
    feedback[idx] = u_star(grid.node(j, k), prev.gradient_s[idx], cost, params.u_max);
  });
  return flow_sweep(prev, feedback, cfg, params, cost);
}

template <typename Sweep>
void iterate_to_fixed_point(SolveResult& result, const SolverConfig& cfg,
                            const EpidemicParams& params, Sweep&& sweep) {
  const double q = std::exp(-params.r * cfg.horizon);
  const bool extrapolate = cfg.level_extrapolation && q < 1.0;

  for (int it = 1; it <= cfg.max_iters; ++it) {
    ValueField next = sweep(result.field);
    if (cfg.relaxation < 1.0) {
      const double w = cfg.relaxation;
      for (std::size_t k = 0; k < next.values.size(); ++k) {
        next.values[k] = result.field.values[k] + w * (next.values[k] - result.field.values[k]);
      }
      gradient_fd(next);
    }
    if (extrapolate) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t k = 0; k < next.values.size(); ++k) {
        const double d = next.values[k] - result.field.values[k];
        lo = std::min(lo, d);
        hi = std::max(hi, d);
      }
      const double shift = q / (1.0 - q) * 0.5 * (lo + hi);
      if (std::isfinite(shift)) {
        for (double& v : next.values) v += shift;
      }
    }
    double change = 0.0;
    for (std::size_t k = 0; k < next.values.size(); ++k) {
      change = std::max(change, std::abs(next.values[k] - result.field.values[k]));
    }
    result.field = std::move(next);
    result.iterations = it;
    result.residual = change;
    result.residual_history.push_back(change);
    if (change < result.tolerance) {
      result.converged = true;
      return;
    }
    if (!std::isfinite(change)) return;
  }
}

}  // namespace

ValueField bellman_map(const ValueField& prev, const UncontrolledFlows& flows,
                       const SolverConfig& cfg, const EpidemicParams& params,
                       const CostModel& cost) {
  if (!(prev.grid == flows.grid())) {
    throw std::invalid_argument("bellman_map: field and flows use different grids");
  }
  const SimplexGrid& grid = prev.grid;
  const std::size_t samples = flows.samples_per_node();
  const double* w = flows.weights().data();
  const double closure = flows.terminal_discount();
  ValueField next(grid);

  const bool quadratic = cost.is_quadratic();
  const double a = quadratic ? cost.quadratic_weights().a : 0.0;
  const double b = quadratic ? cost.quadratic_weights().b : 0.0;
  const double u_max = params.u_max;

  for (std::size_t node = 0; node < grid.size(); ++node) {
    const float* ps = flows.s_data(node);
    const float* pi = flows.i_data(node);
    double acc = 0.0;
    for (std::size_t m = 0; m < samples; ++m) {
      const double s = ps[m];
      const double i = pi[m];
      const double p = grid.interpolate(prev.gradient_s, s, i);
      double cs;
      if (quadratic) {
        const double us = u_star_quadratic(s, p, b, u_max) * s;
        cs = 0.5 * (a * i * i + b * us * us) - us * p;
      } else {
        cs = c_star({s, i}, p, cost, params);
      }
      acc += w[m] * cs;
    }
    next.values[node] = acc + closure * prev.value_at(ps[samples - 1], pi[samples - 1]);
  }
  close_infection_free_row(next, cfg);
  gradient_fd(next);
  return next;
}

ValueField bellman_map(const ValueField& prev, const SolverConfig& cfg,
                       const EpidemicParams& params, const CostModel& cost) {
  cfg.validate();
  params.validate();
  if (cfg.scheme == FlowScheme::kFeedback) {
    return feedback_sweep(prev, cfg, params, cost);
  }
  const UncontrolledFlows flows(prev.grid, cfg, params);
  return bellman_map(prev, flows, cfg, params, cost);
}

SolveResult solve(const SolverConfig& cfg, const EpidemicParams& params,
                  const CostModel& cost, const ValueField* warm_start) {
  cfg.validate();
  params.validate();
  const SimplexGrid grid(cfg.grid_n);
  if (warm_start != nullptr && !(warm_start->grid == grid)) {
    throw std::invalid_argument("solve: warm start uses a different grid");
  }
  std::optional<UncontrolledFlows> flows;
  if (cfg.scheme == FlowScheme::kUncontrolled) flows.emplace(grid, cfg, params);

  SolveResult result{warm_start != nullptr ? *warm_start : ValueField(grid),
                     0, std::numeric_limits<double>::infinity(),
                     cfg.absolute_tolerance(params, cost), false, {}};
  if (warm_start != nullptr) gradient_fd(result.field);

  iterate_to_fixed_point(result, cfg, params, [&](const ValueField& prev) {
    return flows ? bellman_map(prev, *flows, cfg, params, cost)
                 : feedback_sweep(prev, cfg, params, cost);
  });
  return result;
}

SolveResult evaluate_policy(const FeedbackPolicy& policy, const SolverConfig& cfg,
                            const EpidemicParams& params, const CostModel& cost) {
  cfg.validate();
  params.validate();
  const SimplexGrid grid(cfg.grid_n);
  if (!(policy.grid == grid)) {
    throw std::invalid_argument("evaluate_policy: policy uses a different grid");
  }
  SolveResult result{ValueField(grid), 0, std::numeric_limits<double>::infinity(),
                     cfg.absolute_tolerance(params, cost), false, {}};
  iterate_to_fixed_point(result, cfg, params, [&](const ValueField& prev) {
    return flow_sweep(prev, policy.u_star, cfg, params, cost);
  });
  return result;
}

HjbResidual hjb_residual(const ValueField& field, const EpidemicParams& params,
                         const CostModel& cost) {
  const SimplexGrid& grid = field.grid;
  const auto vs = derivative_s(grid, field.values);
  const auto vi = derivative_i(grid, field.values);
  HjbResidual out;
  grid.for_each_node([&](int j, int k, std::size_t idx) {
    if (!grid.is_interior(j, k)) return;
    const State x = grid.node(j, k);
    const Drift b0 = drift_unchecked(x.s, x.i, 0.0, params);
    const double hamiltonian =
        b0.ds * vs[idx] + b0.di * vi[idx] + c_star(x, vs[idx], cost, params);
    const double res = std::abs(params.r * field.values[idx] - hamiltonian);
    if (res > out.max) out = {res, x, idx};
  });
  return out;
}

BruteForceResult brute_force_value(const State& x, int depth, double horizon,
                                   const EpidemicParams& params,
                                   const CostModel& cost, double step) {
  if (depth < 1 || depth > 4) {
    throw std::invalid_argument("brute_force_value: depth must be in [1, 4]");
  }
  if (!(horizon > 0.0)) throw std::invalid_argument("brute_force_value: horizon <= 0");
  constexpr int kLevels = 5;
  const double seg = horizon / depth;
  std::vector<double> breakpoints(static_cast<std::size_t>(depth));
  for (int d = 0; d < depth; ++d) breakpoints[static_cast<std::size_t>(d)] = d * seg;

  int combos = 1;
  for (int d = 0; d < depth; ++d) combos *= kLevels;

  BruteForceResult best;
  best.running = std::numeric_limits<double>::infinity();
  std::vector<double> values(static_cast<std::size_t>(depth));
  for (int code = 0; code < combos; ++code) {
    int c = code;
    for (int d = 0; d < depth; ++d) {
      values[static_cast<std::size_t>(d)] = params.u_max * (c % kLevels) / (kLevels - 1);
      c /= kLevels;
    }
    const Trajectory traj = integrate(
        x, ControlSchedule(breakpoints, values, params.u_max), horizon, step, params);
    double total = 0.0;
    const auto& smp = traj.samples;
    for (std::size_t m = 1; m < smp.size(); ++m) {
      // The control on [t_{m-1}, t_m) is smp[m-1].u; use it at both ends.
      const double u = smp[m - 1].u;
      const double f0 = std::exp(-params.r * smp[m - 1].t) * cost(smp[m - 1].s, smp[m - 1].i, u);
      const double f1 = std::exp(-params.r * smp[m].t) * cost(smp[m].s, smp[m].i, u);
      total += 0.5 * (smp[m].t - smp[m - 1].t) * (f0 + f1);
    }
    if (total < best.running) {
      best.running = total;
      best.controls = values;
    }
  }
  const double c_max = cost.upper_bound(params.u_max);
  best.tail = params.r > 0.0 ? std::exp(-params.r * horizon) * c_max / params.r
                             : std::numeric_limits<double>::infinity();
  best.value = best.running + best.tail;
  return best;
}

double second_difference_bound(const ValueField& field) {
  const SimplexGrid& grid = field.grid;
  const auto& v = field.values;
  const double h2 = grid.h() * grid.h();
  double bound = -std::numeric_limits<double>::infinity();
  grid.for_each_node([&](int j, int k, std::size_t idx) {
    if (!grid.is_interior(j, k)) return;
    const double c = 2.0 * v[idx];
    bound = std::max(bound, (v[grid.index(j + 1, k)] + v[grid.index(j - 1, k)] - c) / h2);
    bound = std::max(bound, (v[grid.index(j, k + 1)] + v[grid.index(j, k - 1)] - c) / h2);
    // The (+1,-1) diagonal stays inside the simplex for interior nodes.
    bound = std::max(bound, (v[grid.index(j + 1, k - 1)] + v[grid.index(j - 1, k + 1)] - c) / h2);
  });
  return bound;
}

void write_value_csv(std::ostream& out, const ValueField& field) {
  out << "s,i,v,vs\n";
  field.grid.for_each_node([&](int j, int k, std::size_t idx) {
    const State x = field.grid.node(j, k);
    detail::put_row(out, {x.s, x.i, field.values[idx], field.gradient_s[idx]});
  });
}

void write_value_csv(const std::string& path, const ValueField& field) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  write_value_csv(out, field);
}

ValueField read_value_csv(std::istream& in) {
  const auto table = detail::read_csv(in, {"s", "i", "v", "vs"});
  ValueField field(SimplexGrid(detail::grid_n_from_count(table.rows.size())));
  field.grid.for_each_node([&](int j, int k, std::size_t idx) {
    const auto& row = table.rows[idx];
    const State x = field.grid.node(j, k);
    if (std::abs(row[0] - x.s) > 1e-9 || std::abs(row[1] - x.i) > 1e-9) {
      throw std::runtime_error("value csv: nodes out of order");
    }
    field.values[idx] = row[2];
    field.gradient_s[idx] = row[3];
  });
  return field;
}

ValueField prolongate(const ValueField& field, const SimplexGrid& target) {
  ValueField out(target);
  target.for_each_node([&](int j, int k, std::size_t idx) {
    const State x = target.node(j, k);
    out.values[idx] = field.value_at(x.s, x.i);
  });
  gradient_fd(out);
  return out;
}

ValueField read_value_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_value_csv(in);
}

}  // namespace sirsvax
