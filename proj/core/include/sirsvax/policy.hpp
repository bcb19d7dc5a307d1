#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sirsvax/grid.hpp"
#include "sirsvax/model.hpp"

namespace sirsvax {

/// Minimizer of u -> (a i^2 + b (u s)^2)/2 - u s p_s over [0, u_max]:
/// 0 for p_s <= 0, p_s/(b s) in between, u_max once p_s >= b u_max s.
/// At s = 0 the objective does not depend on u and 0 is returned.
double u_star_quadratic(double s, double p_s, double b, double u_max);

struct ScalarMinimum {
  double argmin;
  double value;
  bool convexity_violated;  ///< midpoint convexity failed on some bracket
};

/// Minimizes u -> C(x, u) - u s p_s over [0, u_max] by bisection on the sign
/// of a short difference quotient, to a bracket width of 1e-10, then polishes
/// the bracket midpoint with one parabolic step (exact for quadratics).
ScalarMinimum u_star_generic(const State& x, double p_s, const CostModel& cost,
                             double u_max);

/// Dispatches to the closed form for quadratic costs.
double u_star(const State& x, double p_s, const CostModel& cost, double u_max);

/// Feedback vaccination rate tabulated on the grid.
///
/// Besides the selected control, each node carries the controls implied by
/// the forward and backward s-differences of the value. Nodes where the two
/// one-sided differences disagree by more than 10 h are flagged as kinks.
struct FeedbackPolicy {
  SimplexGrid grid;
  std::vector<double> u_star;
  std::vector<double> u_forward;
  std::vector<double> u_backward;
  std::vector<char> kink;

  explicit FeedbackPolicy(SimplexGrid g)
      : grid(g),
        u_star(g.size(), 0.0),
        u_forward(g.size(), 0.0),
        u_backward(g.size(), 0.0),
        kink(g.size(), 0) {}

  /// Interpolated control at an arbitrary state.
  [[nodiscard]] double at(double s, double i) const {
    return grid.interpolate(u_star, s, i);
  }
  [[nodiscard]] std::size_t kink_count() const;
};

/// Policy with every node set to `u`.
FeedbackPolicy constant_policy(const SimplexGrid& grid, double u);

FeedbackPolicy tabulate_policy(const ValueField& field, const CostModel& cost,
                               const EpidemicParams& params);

/// CSV columns s,i,ustar.
void write_policy_csv(std::ostream& out, const FeedbackPolicy& policy);
void write_policy_csv(const std::string& path, const FeedbackPolicy& policy);
/// Restores u_star only; the one-sided candidates are set equal to it.
FeedbackPolicy read_policy_csv(std::istream& in);
FeedbackPolicy read_policy_csv(const std::string& path);

}  // namespace sirsvax
