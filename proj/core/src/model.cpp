#include "sirsvax/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sirsvax {

void EpidemicParams::validate() const {
  auto require_positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      std::ostringstream msg;
      msg << "EpidemicParams: " << name << " must be positive (got " << v
          << ")";
      throw std::invalid_argument(msg.str());
    }
  };
  require_positive(beta, "beta");
  require_positive(gamma, "gamma");
  require_positive(eta, "eta");
  require_positive(u_max, "u_max");
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument("EpidemicParams: r must be nonnegative");
  }
}

bool State::in_open_simplex() const {
  return s > 0.0 && i > 0.0 && s + i < 1.0;
}

bool State::in_closed_simplex(double tol) const {
  return s >= -tol && i >= -tol && s + i <= 1.0 + tol;
}

CostModel CostModel::quadratic(double a, double b) {
  if (!(a >= 0.0) || !std::isfinite(a)) {
    throw std::invalid_argument("quadratic cost: a must be nonnegative");
  }
  if (!(b > 0.0) || !std::isfinite(b)) {
    throw std::invalid_argument("quadratic cost: b must be positive");
  }
  return CostModel(Quadratic{a, b});
}

CostModel CostModel::generic(Evaluator evaluator, double u_max,
                             double upper_bound) {
  if (!evaluator) throw std::invalid_argument("generic cost: empty evaluator");
  if (!(u_max > 0.0)) throw std::invalid_argument("generic cost: u_max <= 0");

  constexpr int kSpatial = 10;
  constexpr int kControl = 10;
  double sampled_max = 0.0;
  for (int js = 0; js <= kSpatial; ++js) {
    for (int ji = 0; ji + js <= kSpatial; ++ji) {
      const double s = static_cast<double>(js) / kSpatial;
      const double i = static_cast<double>(ji) / kSpatial;
      for (int ju = 0; ju <= kControl; ++ju) {
        const double u = u_max * ju / kControl;
        const double c = evaluator(s, i, u);
        if (!(c >= 0.0) || !std::isfinite(c)) {
          throw std::invalid_argument("generic cost: negative or non-finite value");
        }
        sampled_max = std::max(sampled_max, c);
        if (ju + 2 <= kControl) {
          const double u2 = u_max * (ju + 2) / kControl;
          const double mid = evaluator(s, i, 0.5 * (u + u2));
          const double chord = 0.5 * (c + evaluator(s, i, u2));
          if (mid > chord + 1e-12 * (1.0 + std::abs(chord))) {
            throw std::invalid_argument("generic cost: not convex in u");
          }
        }
      }
    }
  }
  if (upper_bound < 0.0) upper_bound = sampled_max;
  return CostModel(Generic{std::move(evaluator), upper_bound});
}

double CostModel::operator()(double s, double i, double u) const {
  if (const auto* q = std::get_if<Quadratic>(&kind_)) {
    const double us = u * s;
    return 0.5 * (q->a * i * i + q->b * us * us);
  }
  return std::get<Generic>(kind_).evaluator(s, i, u);
}

double CostModel::upper_bound(double u_max) const {
  if (const auto* q = std::get_if<Quadratic>(&kind_)) {
    return 0.5 * (q->a + q->b * u_max * u_max);
  }
  return std::get<Generic>(kind_).upper_bound;
}

namespace {

void check_domain(const State& x, double u, const EpidemicParams& p) {
  if (!x.in_closed_simplex()) {
    std::ostringstream msg;
    msg << "state (" << x.s << ", " << x.i << ") is outside the simplex";
    throw std::domain_error(msg.str());
  }
  if (!(u >= 0.0 && u <= p.u_max)) {
    std::ostringstream msg;
    msg << "control " << u << " is outside [0, " << p.u_max << "]";
    throw std::domain_error(msg.str());
  }
}

}  // namespace

Drift drift(const State& x, double u, const EpidemicParams& params) {
  check_domain(x, u, params);
  return drift_unchecked(x.s, x.i, u, params);
}

double recovered_rate(const State& x, double u, const EpidemicParams& params) {
  check_domain(x, u, params);
  return params.gamma * x.i - params.eta * x.recovered() + u * x.s;
}

double running_cost(const State& x, double u, const CostModel& cost,
                    const EpidemicParams& params) {
  check_domain(x, u, params);
  return cost(x.s, x.i, u);
}

double hamiltonian_cv(const State& x, const Gradient& p, double u,
                      const EpidemicParams& params, const CostModel& cost) {
  const Drift b = drift(x, u, params);
  return b.ds * p.p_s + b.di * p.p_i + cost(x.s, x.i, u);
}

ReproductionNumbers reproduction_numbers(const State& x,
                                         const EpidemicParams& params) {
  const double natural = params.beta / params.gamma;
  return {natural, natural * x.s};
}

}  // namespace sirsvax
