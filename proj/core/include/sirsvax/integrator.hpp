#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sirsvax/model.hpp"

namespace sirsvax {

/// Excursions outside the simplex larger than this abort an integration.
inline constexpr double kSimplexExitTolerance = 1e-6;

/// Piecewise-constant, right-continuous control: values[k] is applied on
/// [breakpoints[k], breakpoints[k+1]); the last value extends to infinity.
class ControlSchedule {
 public:
  /// breakpoints must start at 0 and be strictly increasing; one value per
  /// breakpoint, each in [0, u_max].
  ControlSchedule(std::vector<double> breakpoints, std::vector<double> values,
                  double u_max);

  static ControlSchedule constant(double u, double u_max);

  [[nodiscard]] const std::vector<double>& breakpoints() const {
    return breakpoints_;
  }
  [[nodiscard]] const std::vector<double>& values() const { return values_; }
  [[nodiscard]] double at(double t) const;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

struct TrajectorySample {
  double t;
  double s;
  double i;
  double r;  ///< recovered fraction
  double u;  ///< control applied from t onward
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  double step = 0.0;

  [[nodiscard]] const TrajectorySample& back() const { return samples.back(); }
  [[nodiscard]] State terminal_state() const {
    return {samples.back().s, samples.back().i};
  }
};

/// One classical fourth-order Runge-Kutta step with frozen control.
inline State rk4_step(const State& x, double u, double h,
                      const EpidemicParams& p) {
  const Drift k1 = drift_unchecked(x.s, x.i, u, p);
  const Drift k2 =
      drift_unchecked(x.s + 0.5 * h * k1.ds, x.i + 0.5 * h * k1.di, u, p);
  const Drift k3 =
      drift_unchecked(x.s + 0.5 * h * k2.ds, x.i + 0.5 * h * k2.di, u, p);
  const Drift k4 = drift_unchecked(x.s + h * k3.ds, x.i + h * k3.di, u, p);
  return {x.s + h / 6.0 * (k1.ds + 2.0 * k2.ds + 2.0 * k3.ds + k4.ds),
          x.i + h / 6.0 * (k1.di + 2.0 * k2.di + 2.0 * k3.di + k4.di)};
}

/// Pulls a post-step state back onto the closed simplex. Throws
/// std::runtime_error when the excursion exceeds kSimplexExitTolerance.
State clamp_to_simplex(State x);

/// Fixed-step RK4 integration whose steps are aligned with the schedule's
/// breakpoints. Samples are taken at every step, starting at t = 0.
Trajectory integrate(const State& x0, const ControlSchedule& schedule,
                     double horizon, double step, const EpidemicParams& params);

/// Max over samples of |I(t) - i0 exp(int_0^t (beta S - gamma))| / I(t), with
/// the integral taken by the trapezoidal rule on the trajectory samples.
double infected_consistency(const Trajectory& traj,
                            const EpidemicParams& params);

/// CSV columns t,s,i,r,u,Rt; 12 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const EpidemicParams& params);
void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const EpidemicParams& params);
Trajectory read_trajectory_csv(std::istream& in);
Trajectory read_trajectory_csv(const std::string& path);

}  // namespace sirsvax
