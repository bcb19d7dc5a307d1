#include "sirsvax/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "csv.hpp"

namespace sirsvax {

ControlSchedule::ControlSchedule(std::vector<double> breakpoints,
                                 std::vector<double> values, double u_max)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (breakpoints_.empty() || breakpoints_.size() != values_.size()) {
    throw std::invalid_argument(
        "ControlSchedule: need one value per breakpoint");
  }
  if (breakpoints_.front() != 0.0) {
    throw std::invalid_argument("ControlSchedule: first breakpoint must be 0");
  }
  for (std::size_t k = 1; k < breakpoints_.size(); ++k) {
    if (!(breakpoints_[k] > breakpoints_[k - 1])) {
      throw std::invalid_argument(
          "ControlSchedule: breakpoints must be strictly increasing");
    }
  }
  for (double u : values_) {
    if (!(u >= 0.0 && u <= u_max)) {
      throw std::invalid_argument("ControlSchedule: value outside [0, u_max]");
    }
  }
}

ControlSchedule ControlSchedule::constant(double u, double u_max) {
  return ControlSchedule({0.0}, {u}, u_max);
}

double ControlSchedule::at(double t) const {
  const auto it =
      std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  const auto idx = static_cast<std::size_t>(
      std::max<std::ptrdiff_t>(0, (it - breakpoints_.begin()) - 1));
  return values_[idx];
}

State clamp_to_simplex(State x) {
  const double excess = std::max({-x.s, -x.i, x.s + x.i - 1.0});
  if (excess > kSimplexExitTolerance || !std::isfinite(x.s) ||
      !std::isfinite(x.i)) {
    std::ostringstream msg;
    msg << "trajectory left the simplex at (" << x.s << ", " << x.i
        << "); reduce the step size";
    throw std::runtime_error(msg.str());
  }
  if (excess <= 0.0) return x;
  x.s = std::max(x.s, 0.0);
  x.i = std::max(x.i, 0.0);
  const double over = x.s + x.i - 1.0;
  if (over > 0.0) {
    if (x.s >= x.i) {
      x.s -= over;
    } else {
      x.i -= over;
    }
  }
  return x;
}

Trajectory integrate(const State& x0, const ControlSchedule& schedule,
                     double horizon, double step,
                     const EpidemicParams& params) {
  params.validate();
  if (!x0.in_closed_simplex()) {
    throw std::domain_error("integrate: initial state outside the simplex");
  }
  if (!(horizon > 0.0) || !(step > 0.0)) {
    throw std::invalid_argument("integrate: horizon and step must be positive");
  }

  std::vector<double> edges{0.0};
  for (double b : schedule.breakpoints()) {
    if (b > 0.0 && b < horizon) edges.push_back(b);
  }
  edges.push_back(horizon);

  Trajectory traj;
  traj.step = step;
  State x = x0;
  for (std::size_t seg = 0; seg + 1 < edges.size(); ++seg) {
    const double t0 = edges[seg];
    const double len = edges[seg + 1] - t0;
    const auto n = std::max<long>(1, static_cast<long>(std::ceil(len / step - 1e-9)));
    const double h = len / static_cast<double>(n);
    const double u = schedule.at(t0);
    for (long k = 0; k < n; ++k) {
      const double t = t0 + static_cast<double>(k) * h;
      traj.samples.push_back({t, x.s, x.i, x.recovered(), u});
      x = clamp_to_simplex(rk4_step(x, u, h, params));
    }
  }
  traj.samples.push_back(
      {horizon, x.s, x.i, x.recovered(), schedule.at(horizon)});
  return traj;
}

double infected_consistency(const Trajectory& traj,
                            const EpidemicParams& params) {
  const auto& smp = traj.samples;
  if (smp.empty() || smp.front().i == 0.0) return 0.0;
  const double i0 = smp.front().i;
  double integral = 0.0;
  double worst = 0.0;
  for (std::size_t k = 1; k < smp.size(); ++k) {
    const double dt = smp[k].t - smp[k - 1].t;
    integral += 0.5 * dt *
                ((params.beta * smp[k].s - params.gamma) +
                 (params.beta * smp[k - 1].s - params.gamma));
    const double predicted = i0 * std::exp(integral);
    worst = std::max(worst, std::abs(smp[k].i - predicted) / smp[k].i);
  }
  return worst;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const EpidemicParams& params) {
  const double r0 = params.beta / params.gamma;
  out << "t,s,i,r,u,Rt\n";
  for (const auto& p : traj.samples) {
    detail::put_row(out, {p.t, p.s, p.i, p.r, p.u, r0 * p.s});
  }
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const EpidemicParams& params) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  write_trajectory_csv(out, traj, params);
}

Trajectory read_trajectory_csv(std::istream& in) {
  const auto table = detail::read_csv(in, {"t", "s", "i", "r", "u", "Rt"});
  Trajectory traj;
  for (const auto& row : table.rows) {
    traj.samples.push_back({row[0], row[1], row[2], row[3], row[4]});
  }
  if (traj.samples.size() >= 2) {
    traj.step = traj.samples[1].t - traj.samples[0].t;
  }
  return traj;
}

Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_trajectory_csv(in);
}

}  // namespace sirsvax
