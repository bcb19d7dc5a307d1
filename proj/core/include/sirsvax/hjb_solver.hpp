#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sirsvax/grid.hpp"
#include "sirsvax/model.hpp"

namespace sirsvax {

/// Which flow the representation formula follows.
enum class FlowScheme {
  /// Flow driven by the feedback of the previous iterate; the running cost is
  /// C(x, u) along it. Same fixed point as kUncontrolled, stable in practice.
  kFeedback,
  /// Uncontrolled flow with C*(x, v_s) evaluated along it, the control term
  /// entering only through C*. Diverges for the reference parameters; kept
  /// for comparison.
  kUncontrolled,
};

/// Treatment of the invariant line i = 0, which lies outside the open domain.
enum class InfectionFreeRow {
  /// Row i = 0 takes the values of row i = h (limit from the interior).
  kCopyInterior,
  /// Row i = 0 is computed like every other node (V = 0 there).
  kRepresentation,
};

struct SolverConfig {
  int grid_n = 101;
  double time_step = 0.05;   ///< weeks, RK4 step of the node flows
  double horizon = 200.0;    ///< weeks, truncation of the representation integral
  /// Stopping threshold on the sup-norm change between iterates. When
  /// `tol_relative` is set it is scaled by C_max / r.
  double fix_point_tol = 1e-7;
  bool tol_relative = true;
  int max_iters = 200;
  FlowScheme scheme = FlowScheme::kFeedback;
  InfectionFreeRow infection_free_row = InfectionFreeRow::kCopyInterior;
  /// After each sweep, shift the iterate by q/(1-q) times the midrange of the
  /// sweep's change, q = e^{-r T}. Removes the slowly contracting level mode.
  bool level_extrapolation = true;
  /// Under-relaxation: the iterate moves by this fraction of the sweep's
  /// change before the level shift. 1 is the plain sweep, which can settle
  /// into a two-cycle on fine grids; 0.5 damps it. In (0, 1].
  double relaxation = 0.5;

  void validate() const;
  /// Absolute stopping threshold for the given problem.
  [[nodiscard]] double absolute_tolerance(const EpidemicParams& params,
                                          const CostModel& cost) const;
};

/// C*(s, i, p_s) = min over u in [0, u_max] of C(s, i, u) - u s p_s.
double c_star(const State& x, double p_s, const CostModel& cost,
              const EpidemicParams& params);

/// Uncontrolled trajectories from every grid node, sampled every
/// `time_step` up to `horizon`, together with the trapezoidal discount
/// weights shared by all nodes. Positions are stored in single precision.
class UncontrolledFlows {
 public:
  UncontrolledFlows(const SimplexGrid& grid, const SolverConfig& cfg,
                    const EpidemicParams& params);

  [[nodiscard]] const SimplexGrid& grid() const { return grid_; }
  [[nodiscard]] std::size_t samples_per_node() const { return samples_; }
  [[nodiscard]] const std::vector<double>& weights() const { return weights_; }
  [[nodiscard]] double terminal_discount() const { return terminal_discount_; }
  [[nodiscard]] State position(std::size_t node, std::size_t sample) const {
    const std::size_t at = node * samples_ + sample;
    return {static_cast<double>(s_[at]), static_cast<double>(i_[at])};
  }
  [[nodiscard]] const float* s_data(std::size_t node) const {
    return s_.data() + node * samples_;
  }
  [[nodiscard]] const float* i_data(std::size_t node) const {
    return i_.data() + node * samples_;
  }

 private:
  SimplexGrid grid_;
  std::size_t samples_;
  std::vector<double> weights_;
  double terminal_discount_;
  std::vector<float> s_;
  std::vector<float> i_;
};

/// One sweep of the recursion: for every node x,
///   v'(x) = int_0^T e^{-rt} c(X_t) dt + e^{-rT} v(X_T)
/// where, for FlowScheme::kFeedback, X follows the sample-and-hold feedback
/// U*(., v_s) tabulated from `prev` and c = C(X, u), and for
/// FlowScheme::kUncontrolled, X is the uncontrolled flow and
/// c = C*(X, v_s(X)). The output carries its own recomputed gradient.
ValueField bellman_map(const ValueField& prev, const SolverConfig& cfg,
                       const EpidemicParams& params, const CostModel& cost);
/// kUncontrolled sweep reusing precomputed flows.
ValueField bellman_map(const ValueField& prev, const UncontrolledFlows& flows,
                       const SolverConfig& cfg, const EpidemicParams& params,
                       const CostModel& cost);

struct SolveResult {
  ValueField field;
  int iterations = 0;
  double residual = 0.0;  ///< sup-norm change of the last iteration
  double tolerance = 0.0;
  bool converged = false;
  std::vector<double> residual_history;
};

/// Iterates bellman_map from v = 0 (or from `warm_start`) until the sup-norm
/// change drops below the tolerance or max_iters is reached. Never throws on
/// non-convergence; check `converged`.
SolveResult solve(const SolverConfig& cfg, const EpidemicParams& params,
                  const CostModel& cost, const ValueField* warm_start = nullptr);

struct FeedbackPolicy;

/// Value of a fixed tabulated feedback: iterates the kFeedback sweep with the
/// control taken from `policy` instead of the current iterate.
SolveResult evaluate_policy(const FeedbackPolicy& policy, const SolverConfig& cfg,
                            const EpidemicParams& params, const CostModel& cost);

struct HjbResidual {
  double max = 0.0;
  State argmax{};
  std::size_t index = 0;
};

/// max over interior nodes of |r v - <b(x,0), Dv> - C*(x, v_s)| with both
/// partials by central differences.
HjbResidual hjb_residual(const ValueField& field, const EpidemicParams& params,
                         const CostModel& cost);

struct BruteForceResult {
  double value = 0.0;    ///< running cost + tail bound
  double running = 0.0;  ///< best discounted cost over [0, horizon]
  double tail = 0.0;     ///< e^{-r horizon} C_max / r
  std::vector<double> controls;
};

/// Exhaustive search over piecewise-constant schedules with `depth` equal
/// segments, each taking one of {0, 1/4, 1/2, 3/4, 1} x u_max. The result is
/// an upper bound on V(x).
BruteForceResult brute_force_value(const State& x, int depth, double horizon,
                                   const EpidemicParams& params,
                                   const CostModel& cost, double step = 0.05);

/// Largest second difference of the values along s, i and the diagonal,
/// divided by h^2, over interior nodes. A numerical semiconcavity proxy.
double second_difference_bound(const ValueField& field);

/// Interpolates a field onto another grid (warm starts across resolutions).
ValueField prolongate(const ValueField& field, const SimplexGrid& target);

/// CSV columns s,i,v,vs.
void write_value_csv(std::ostream& out, const ValueField& field);
void write_value_csv(const std::string& path, const ValueField& field);
ValueField read_value_csv(std::istream& in);
ValueField read_value_csv(const std::string& path);

}  // namespace sirsvax
