#pragma once

#include <functional>
#include <utility>
#include <variant>

namespace sirsvax {

/// Distance from the closed simplex that is still accepted as "inside".
inline constexpr double kDomainTolerance = 1e-12;

/// Rates of the controlled SIRS system. Every rate is per week.
struct EpidemicParams {
  double beta = 0.7;          ///< transmission rate
  double gamma = 1.0 / 3.0;   ///< recovery rate
  double eta = 7.0 / 180.0;   ///< loss-of-immunity (reinfection) rate
  double r = 0.005 / 52.0;    ///< discount rate
  double u_max = 7.0 / 120.0; ///< vaccination rate cap

  /// Throws std::invalid_argument when a rate is non-positive (r may be 0).
  void validate() const;
};

/// A point (s, i) of the susceptible/infected plane. The recovered fraction
/// is implied by s + i + r = 1.
struct State {
  double s = 0.0;
  double i = 0.0;

  [[nodiscard]] double recovered() const { return 1.0 - s - i; }

  /// Open simplex membership: 0 < s, 0 < i, s + i < 1.
  [[nodiscard]] bool in_open_simplex() const;
  /// Closed simplex membership widened by `tol`.
  [[nodiscard]] bool in_closed_simplex(double tol = kDomainTolerance) const;

  friend bool operator==(const State&, const State&) = default;
};

struct Gradient {
  double p_s = 0.0;
  double p_i = 0.0;
};

struct Drift {
  double ds = 0.0;
  double di = 0.0;
};

/// Running cost C(s, i, u).
///
/// The quadratic model is C = (a i^2 + b (u s)^2) / 2. A generic model wraps
/// an arbitrary evaluator; it must be defined on the closed simplex times
/// [0, u_max] and strictly convex in u. Convexity is only spot-checked.
class CostModel {
 public:
  using Evaluator = std::function<double(double s, double i, double u)>;

  struct Quadratic {
    double a;
    double b;
  };

  /// Requires a >= 0 and b > 0. a = 0 is the degenerate "no infection cost"
  /// model whose value function vanishes identically.
  static CostModel quadratic(double a, double b);

  /// Spot-checks nonnegativity and midpoint convexity in u on a coarse
  /// sample of the simplex; throws std::invalid_argument on failure.
  /// `upper_bound` is sup C over the domain; when omitted it is estimated
  /// by sampling.
  static CostModel generic(Evaluator evaluator, double u_max,
                           double upper_bound = -1.0);

  [[nodiscard]] double operator()(double s, double i, double u) const;

  [[nodiscard]] bool is_quadratic() const {
    return std::holds_alternative<Quadratic>(kind_);
  }
  [[nodiscard]] const Quadratic& quadratic_weights() const {
    return std::get<Quadratic>(kind_);
  }

  /// C_max = sup C over closed simplex x [0, u_max].
  [[nodiscard]] double upper_bound(double u_max) const;

 private:
  struct Generic {
    Evaluator evaluator;
    double upper_bound;
  };

  explicit CostModel(std::variant<Quadratic, Generic> kind)
      : kind_(std::move(kind)) {}

  std::variant<Quadratic, Generic> kind_;
};

/// Controlled drift b(x, u) of the reduced (s, i) system.
/// Throws std::domain_error if u is outside [0, u_max] or x is outside the
/// closed simplex (up to kDomainTolerance).
Drift drift(const State& x, double u, const EpidemicParams& params);

/// Drift without domain checks; used in inner integration loops.
inline Drift drift_unchecked(double s, double i, double u,
                             const EpidemicParams& p) {
  const double infection = p.beta * s * i;
  return {-infection - u * s + p.eta * (1.0 - s - i), infection - p.gamma * i};
}

/// dR/dt implied by the drift: gamma i - eta r + u s.
double recovered_rate(const State& x, double u, const EpidemicParams& params);

double running_cost(const State& x, double u, const CostModel& cost,
                    const EpidemicParams& params);

/// <b(x,u), p> + C(x,u).
double hamiltonian_cv(const State& x, const Gradient& p, double u,
                      const EpidemicParams& params, const CostModel& cost);

struct ReproductionNumbers {
  double natural;        ///< R_o = beta / gamma
  double instantaneous;  ///< R_t = R_o * s
};

ReproductionNumbers reproduction_numbers(const State& x,
                                         const EpidemicParams& params);

}  // namespace sirsvax
