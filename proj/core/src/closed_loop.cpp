#include "sirsvax/closed_loop.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace sirsvax {

namespace {

struct ControlChoice {
  double u;
  bool kink;
  double u_forward;
  double u_backward;
};

ControlChoice evaluate_policy(const FeedbackPolicy& policy, const State& x,
                              double u_max) {
  const SimplexGrid& grid = policy.grid;
  const double h = grid.h();
  int j = static_cast<int>(std::lround(std::clamp(x.s, 0.0, 1.0) / h));
  int k = static_cast<int>(std::lround(std::clamp(x.i, 0.0, 1.0) / h));
  j = std::clamp(j, 0, grid.n() - 1);
  k = std::clamp(k, 0, grid.n() - 1 - j);
  if (policy.kink[grid.index(j, k)] != 0) {
    const double uf = std::clamp(grid.interpolate(policy.u_forward, x.s, x.i), 0.0, u_max);
    const double ub = std::clamp(grid.interpolate(policy.u_backward, x.s, x.i), 0.0, u_max);
    return {std::min(uf, ub), true, uf, ub};
  }
  const double u = std::clamp(policy.at(x.s, x.i), 0.0, u_max);
  return {u, false, u, u};
}

}  // namespace

ClosedLoopRun simulate_feedback(const State& x0, const FeedbackPolicy& policy,
                                double horizon, double step,
                                const EpidemicParams& params, double hold) {
  params.validate();
  if (!x0.in_closed_simplex()) {
    throw std::domain_error("simulate_feedback: initial state outside the simplex");
  }
  if (!(horizon > 0.0) || !(step > 0.0)) {
    throw std::invalid_argument("simulate_feedback: horizon and step must be positive");
  }
  const auto n = std::max<long>(1, static_cast<long>(std::ceil(horizon / step - 1e-9)));
  const double h = horizon / static_cast<double>(n);
  const long hold_steps =
      hold <= 0.0 ? 1 : std::max<long>(1, std::lround(hold / h));

  ClosedLoopRun run;
  run.trajectory.step = step;
  run.trajectory.samples.reserve(static_cast<std::size_t>(n) + 1);
  State x = x0;
  double u = 0.0;
  for (long k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * h;
    if (k % hold_steps == 0 || k == n) {
      const ControlChoice choice = evaluate_policy(policy, x, params.u_max);
      if (choice.kink && k < n) {
        run.kink_events.push_back(
            {t, x.s, x.i, choice.u_forward, choice.u_backward, choice.u});
      }
      u = choice.u;
    }
    run.trajectory.samples.push_back({k == n ? horizon : t, x.s, x.i, x.recovered(), u});
    if (k < n) x = clamp_to_simplex(rk4_step(x, u, h, params));
  }
  return run;
}

RealizedCost realized_cost(const Trajectory& traj, const CostModel& cost,
                           const EpidemicParams& params) {
  RealizedCost out;
  const auto& smp = traj.samples;
  for (std::size_t m = 1; m < smp.size(); ++m) {
    const double u = smp[m - 1].u;
    const double f0 = std::exp(-params.r * smp[m - 1].t) * cost(smp[m - 1].s, smp[m - 1].i, u);
    const double f1 = std::exp(-params.r * smp[m].t) * cost(smp[m].s, smp[m].i, u);
    out.running += 0.5 * (smp[m].t - smp[m - 1].t) * (f0 + f1);
  }
  const double horizon = smp.empty() ? 0.0 : smp.back().t;
  const double c_max = cost.upper_bound(params.u_max);
  out.tail_upper = params.r > 0.0
                       ? std::exp(-params.r * horizon) * c_max / params.r
                       : std::numeric_limits<double>::infinity();
  return out;
}

void write_kink_log(std::ostream& out, const std::vector<KinkEvent>& events) {
  for (const auto& e : events) {
    nlohmann::json j = {{"t", e.t},
                        {"s", e.s},
                        {"i", e.i},
                        {"u_forward", e.u_forward},
                        {"u_backward", e.u_backward},
                        {"applied", e.applied}};
    out << j.dump() << '\n';
  }
}

void write_kink_log(const std::string& path,
                    const std::vector<KinkEvent>& events) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  write_kink_log(out, events);
}

}  // namespace sirsvax
