#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sirsvax/closed_loop.hpp"
#include "sirsvax/equilibria.hpp"
#include "sirsvax/hjb_solver.hpp"
#include "sirsvax/integrator.hpp"
#include "sirsvax/model.hpp"
#include "sirsvax/policy.hpp"

namespace sirsvax {

struct Scenario {
  std::string name = "baseline-4.1";
  EpidemicParams params;
  double cost_a = 0.08;
  double cost_b = 0.016;
  State x0{0.75, 0.20};
  SolverConfig solver;
  double sim_horizon = 520.0;  ///< weeks of closed-loop simulation
  double sim_step = 0.05;
  double hold = 0.0;           ///< control sampling period, 0 = every step
  /// false runs the never-vaccinate policy instead of the optimal one.
  bool optimize = true;
  std::string out_dir = "out";

  [[nodiscard]] CostModel cost() const {
    return CostModel::quadratic(cost_a, cost_b);
  }
  void validate() const;
};

/// Names accepted by builtin_scenarios().
std::vector<std::string> builtin_scenario_names();

/// Expands a built-in name into its runs. Multi-run scenarios (eta-variation,
/// r0-variation, i0-sweep) yield one Scenario per variant, each writing to
/// its own subdirectory of `out_dir`. Throws std::invalid_argument for
/// unknown names.
std::vector<Scenario> builtin_scenarios(const std::string& name,
                                        const std::string& out_dir = "out");

/// Overlays the keys present in `config` onto `sc`. Schema (all optional):
///   {"name": str, "params": {"beta","gamma","eta","r","u_max"},
///    "cost": {"a","b"}, "x0": {"s","i"},
///    "solver": {"grid_n","time_step","horizon","tol","tol_relative","max_iters",
///               "relaxation"},
///    "simulation": {"horizon","step","hold"}, "optimize": bool, "out_dir": str}
/// Unknown keys are rejected.
void apply_config(Scenario& sc, const nlohmann::json& config);

/// First time after which the control stays within `tol` of its final value
/// until the end of the trace. 0 for a constant trace.
double stabilization_time(const std::vector<double>& t,
                          const std::vector<double>& u, double tol = 0.002);
double stabilization_time(const Trajectory& traj, double tol = 0.002);

struct ScenarioOutcome {
  SolveResult solve;
  FeedbackPolicy policy;
  ClosedLoopRun controlled;
  Trajectory uncontrolled;
  EquilibriumReport controlled_equilibria;
  EquilibriumReport uncontrolled_equilibria;
  double stabilization = 0.0;
  nlohmann::json summary;
  std::vector<std::string> files;
};

/// Computes the value field (or reuses `solved` when it was produced for the
/// same parameters and grid), tabulates the policy, simulates the controlled
/// and uncontrolled epidemics and writes into sc.out_dir:
///   value.csv, policy.csv, controlled.csv, uncontrolled.csv,
///   equilibria.json, summary.json, kinks.jsonl,
///   control.svg, reproduction.svg, compartments.svg
/// The bundle is written even when the solver did not converge; the summary
/// then carries "converged": false.
ScenarioOutcome run_scenario(const Scenario& sc,
                             const SolveResult* solved = nullptr);

/// Same computation without touching the file system.
ScenarioOutcome compute_scenario(const Scenario& sc,
                                 const SolveResult* solved = nullptr);

}  // namespace sirsvax
