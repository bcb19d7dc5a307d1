#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sirsvax/integrator.hpp"
#include "sirsvax/policy.hpp"

namespace sirsvax {

/// Raised when the state sits next to a node whose forward and backward
/// controls disagree. The smaller candidate is applied.
struct KinkEvent {
  double t;
  double s;
  double i;
  double u_forward;
  double u_backward;
  double applied;
};

struct ClosedLoopRun {
  Trajectory trajectory;
  std::vector<KinkEvent> kink_events;
};

/// Sample-and-hold realization of the feedback: every `hold` weeks the
/// policy is interpolated at the current state and frozen until the next
/// sampling instant. `hold <= 0` means hold == step. Steps follow the same
/// grid as integrate(), so a zero policy reproduces the uncontrolled run.
ClosedLoopRun simulate_feedback(const State& x0, const FeedbackPolicy& policy,
                                double horizon, double step,
                                const EpidemicParams& params,
                                double hold = 0.0);

struct RealizedCost {
  double running = 0.0;     ///< discounted cost over the trajectory
  double tail_upper = 0.0;  ///< the remainder lies in [0, tail_upper]
};

RealizedCost realized_cost(const Trajectory& traj, const CostModel& cost,
                           const EpidemicParams& params);

/// One JSON object per line: t, s, i, u_forward, u_backward, applied.
void write_kink_log(std::ostream& out, const std::vector<KinkEvent>& events);
void write_kink_log(const std::string& path,
                    const std::vector<KinkEvent>& events);

}  // namespace sirsvax
