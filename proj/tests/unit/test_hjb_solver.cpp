#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "sirsvax/hjb_solver.hpp"
#include "sirsvax/integrator.hpp"
#include "sirsvax/policy.hpp"

using namespace sirsvax;

namespace {

const EpidemicParams kRef{};
const CostModel kCost = CostModel::quadratic(0.08, 0.016);
const double kCmax = kCost.upper_bound(kRef.u_max);

SolverConfig coarse(int n = 21, double horizon = 100.0) {
  SolverConfig cfg;
  cfg.grid_n = n;
  cfg.horizon = horizon;
  return cfg;
}

// Independent oracle: discounted infection cost along the uncontrolled flow,
// integrated as a third ODE component with a finer RK4 step.
double uncontrolled_cost(const State& x0, double horizon, const EpidemicParams& p, double a,
                         double step = 0.005) {
  struct Y {
    double s, i, j;
  };
  auto f = [&](double t, const Y& y) {
    return Y{-p.beta * y.s * y.i + p.eta * (1 - y.s - y.i), p.beta * y.s * y.i - p.gamma * y.i,
             std::exp(-p.r * t) * 0.5 * a * y.i * y.i};
  };
  const long n = std::lround(horizon / step);
  Y y{x0.s, x0.i, 0.0};
  for (long k = 0; k < n; ++k) {
    const double t = k * step;
    const Y k1 = f(t, y);
    const Y k2 = f(t + step / 2, {y.s + step / 2 * k1.s, y.i + step / 2 * k1.i, 0});
    const Y k3 = f(t + step / 2, {y.s + step / 2 * k2.s, y.i + step / 2 * k2.i, 0});
    const Y k4 = f(t + step, {y.s + step * k3.s, y.i + step * k3.i, 0});
    y = {y.s + step / 6 * (k1.s + 2 * k2.s + 2 * k3.s + k4.s),
         y.i + step / 6 * (k1.i + 2 * k2.i + 2 * k3.i + k4.i),
         y.j + step / 6 * (k1.j + 2 * k2.j + 2 * k3.j + k4.j)};
  }
  return y.j;
}

struct Solved {
  SolverConfig cfg;
  SolveResult result;
};

const Solved& reference_solve() {
  static const Solved solved = [] {
    const SolverConfig cfg = coarse(31, 200.0);
    return Solved{cfg, solve(cfg, kRef, kCost)};
  }();
  return solved;
}

}  // namespace

TEST(SolverConfig, Validation) {
  EXPECT_NO_THROW(SolverConfig{}.validate());
  SolverConfig bad;
  bad.grid_n = 2;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = {};
  bad.fix_point_tol = 0.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = {};
  bad.time_step = -1.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  EXPECT_NEAR(SolverConfig{}.absolute_tolerance(kRef, kCost), 1e-7 * kCmax / kRef.r, 1e-18);
}

TEST(BellmanMap, ZeroPreviousGivesInfectionCostOnly) {
  for (FlowScheme scheme : {FlowScheme::kFeedback, FlowScheme::kUncontrolled}) {
    SolverConfig cfg = coarse(11, 50.0);
    cfg.time_step = 0.01;  // trapezoid error O(h^2) stays below the tolerance
    cfg.scheme = scheme;
    cfg.infection_free_row = InfectionFreeRow::kRepresentation;
    const ValueField next = bellman_map(ValueField{SimplexGrid(11)}, cfg, kRef, kCost);
    next.grid.for_each_node([&](int j, int k, std::size_t idx) {
      const State x = next.grid.node(j, k);
      if (k == 0) {
        EXPECT_EQ(next.values[idx], 0.0);
        return;
      }
      const double oracle = uncontrolled_cost(x, cfg.horizon, kRef, 0.08);
      EXPECT_NEAR(next.values[idx], oracle, 1e-5 * oracle + 1e-12)
          << "node (" << x.s << "," << x.i << ")";
    });
  }
}

TEST(BellmanMap, FeedbackSweepStaysWithinBounds) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const SolverConfig cfg = coarse(13, 60.0);
  for (int trial = 0; trial < 3; ++trial) {
    ValueField prev{SimplexGrid(13)};
    for (double& v : prev.values) v = unit(rng) * kCmax / kRef.r;
    gradient_fd(prev);
    const ValueField next = bellman_map(prev, cfg, kRef, kCost);
    for (double v : next.values) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, kCmax / kRef.r);
    }
  }
}

TEST(BellmanMap, FlowsMustMatchGrid) {
  const SolverConfig cfg = coarse(7, 10.0);
  const UncontrolledFlows flows(SimplexGrid(7), cfg, kRef);
  EXPECT_EQ(flows.samples_per_node(), 201u);
  EXPECT_THROW(bellman_map(ValueField{SimplexGrid(9)}, flows, cfg, kRef, kCost),
               std::invalid_argument);
}

TEST(Solve, NoInfectionCostGivesZeroValueInOneIteration) {
  const CostModel free = CostModel::quadratic(0.0, 0.016);
  const SolveResult res = solve(coarse(21), kRef, free);
  EXPECT_TRUE(res.converged);
  EXPECT_EQ(res.iterations, 1);
  for (double v : res.field.values) EXPECT_EQ(v, 0.0);
  EXPECT_LT(hjb_residual(res.field, kRef, free).max, 1e-12);
  for (double u : tabulate_policy(res.field, free, kRef).u_star) EXPECT_EQ(u, 0.0);
}

TEST(Solve, ReferenceProblemConvergesWithinBounds) {
  const auto& [cfg, res] = reference_solve();
  EXPECT_TRUE(res.converged);
  EXPECT_LT(res.residual, res.tolerance);
  EXPECT_GT(res.field.value_at(0.75, 0.20), 0.0);
  for (double v : res.field.values) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, kCmax / kRef.r);
    EXPECT_TRUE(std::isfinite(v));
  }
  EXPECT_TRUE(std::isfinite(second_difference_bound(res.field)));
}

TEST(Solve, WarmStartFromFixedPointStopsImmediately) {
  const auto& [cfg, res] = reference_solve();
  const SolveResult again = solve(cfg, kRef, kCost, &res.field);
  EXPECT_TRUE(again.converged);
  EXPECT_EQ(again.iterations, 1);
  EXPECT_THROW(solve(coarse(11), kRef, kCost, &res.field), std::invalid_argument);
}

TEST(Solve, Deterministic) {
  const SolverConfig cfg = coarse(15, 60.0);
  const SolveResult a = solve(cfg, kRef, kCost);
  const SolveResult b = solve(cfg, kRef, kCost);
  EXPECT_EQ(a.field.values, b.field.values);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Solve, UncontrolledFlowRecursionDiverges) {
  // The recursion that freezes the control into C* along the uncontrolled
  // flow blows up for the reference parameters; the default scheme does not.
  SolverConfig cfg = coarse(21, 100.0);
  cfg.scheme = FlowScheme::kUncontrolled;
  cfg.level_extrapolation = false;
  cfg.relaxation = 1.0;
  cfg.max_iters = 25;
  const SolveResult res = solve(cfg, kRef, kCost);
  EXPECT_FALSE(res.converged);
  ASSERT_GE(res.residual_history.size(), 10u);
  EXPECT_GT(res.residual_history.back(), 100.0 * res.residual_history[5]);

  // Relaxation delays the blow-up but does not prevent it.
  cfg.relaxation = 0.5;
  cfg.max_iters = 80;
  const SolveResult damped = solve(cfg, kRef, kCost);
  EXPECT_FALSE(damped.converged);
  EXPECT_GT(damped.residual, 1e3);
}

TEST(Solve, DominatedByNeverVaccinating) {
  const auto& [cfg, res] = reference_solve();
  const EpidemicParams& p = kRef;
  // Long-run cost at the endemic point closes the integral analytically.
  const double i_eq = p.eta / (p.gamma + p.eta) * (1.0 - p.gamma / p.beta);
  const double horizon = 3000.0;
  const double tail = std::exp(-p.r * horizon) * 0.5 * 0.08 * i_eq * i_eq / p.r;
  std::mt19937_64 rng(52);
  std::uniform_int_distribution<int> pick(1, cfg.grid_n - 3);
  for (int trial = 0; trial < 10; ++trial) {
    const int j = pick(rng);
    const int k = 1 + pick(rng) % (cfg.grid_n - 2 - j);
    const State x = res.field.grid.node(j, k);
    const double never = uncontrolled_cost(x, horizon, p, 0.08, 0.05) + tail;
    EXPECT_LE(res.field.values[res.field.grid.index(j, k)], never * (1 + 1e-3));
  }
}

TEST(Solve, NoScheduleBeatsTheValueByMoreThanGridError) {
  // Dynamic-programming inequality V(x) <= J_H(x, u) + e^{-rH} V(X_H) for the
  // best brute-force schedule; the slack is the 31 vs 61 node discrepancy.
  const auto& [cfg, res] = reference_solve();
  SolverConfig fine_cfg = cfg;
  fine_cfg.grid_n = 61;
  const SolveResult fine = solve(fine_cfg, kRef, kCost);
  double eps_grid = 0.0;
  res.field.grid.for_each_node([&](int j, int k, std::size_t idx) {
    eps_grid = std::max(eps_grid, std::abs(res.field.values[idx] -
                                           fine.field.values[fine.field.grid.index(2 * j, 2 * k)]));
  });
  const double horizon = 60.0;
  std::mt19937_64 rng(53);
  std::uniform_int_distribution<int> pick(1, cfg.grid_n - 3);
  for (int trial = 0; trial < 8; ++trial) {
    const int j = pick(rng);
    const int k = 1 + pick(rng) % (cfg.grid_n - 2 - j);
    const State x = res.field.grid.node(j, k);
    const BruteForceResult bf = brute_force_value(x, 3, horizon, kRef, kCost);
    EXPECT_LE(res.field.values[res.field.grid.index(j, k)], bf.value);
    std::vector<double> br;
    for (int d = 0; d < 3; ++d) br.push_back(d * horizon / 3);
    const State end =
        integrate(x, ControlSchedule(br, bf.controls, kRef.u_max), horizon, 0.05, kRef)
            .terminal_state();
    const double dp_bound = bf.running + std::exp(-kRef.r * horizon) * res.field.value_at(end.s, end.i);
    EXPECT_LE(res.field.values[res.field.grid.index(j, k)], dp_bound + 2.0 * eps_grid)
        << "x=(" << x.s << "," << x.i << ") eps_grid=" << eps_grid;
  }
}

TEST(EvaluatePolicy, ZeroPolicyMatchesDirectQuadrature) {
  const EpidemicParams& p = kRef;
  const double i_eq = p.eta / (p.gamma + p.eta) * (1.0 - p.gamma / p.beta);
  const double horizon = 3000.0;
  const double tail = std::exp(-p.r * horizon) * 0.5 * 0.08 * i_eq * i_eq / p.r;
  std::vector<double> errors[2];
  for (int level = 0; level < 2; ++level) {
    const int n = level == 0 ? 21 : 41;
    const int m = level + 1;
    const SolverConfig cfg = coarse(n, 200.0);
    const SolveResult res = evaluate_policy(constant_policy(SimplexGrid(n), 0.0), cfg, kRef, kCost);
    EXPECT_TRUE(res.converged);
    for (const auto& [j, k] : {std::pair{15, 4}, std::pair{8, 8}, std::pair{3, 2}}) {
      const State x = res.field.grid.node(j * m, k * m);
      const double oracle = uncontrolled_cost(x, horizon, p, 0.08, 0.05) + tail;
      const double err = std::abs(res.field.values[res.field.grid.index(j * m, k * m)] - oracle);
      errors[level].push_back(err / oracle);
    }
  }
  for (std::size_t q = 0; q < errors[1].size(); ++q) {
    EXPECT_LT(errors[1][q], 2e-3);
    EXPECT_LT(errors[1][q], 0.7 * errors[0][q]);  // first order in h
  }
  EXPECT_THROW(evaluate_policy(constant_policy(SimplexGrid(11), 0.0), coarse(21, 200.0), kRef, kCost),
               std::invalid_argument);
}

TEST(HjbResidual, LinearFieldOnToyGrid) {
  // n = 4 is the smallest grid with an interior node: (1/3, 1/3).
  const double alpha = 0.01;
  ValueField f{SimplexGrid(4)};
  f.grid.for_each_node([&](int j, int k, std::size_t idx) { f.values[idx] = alpha * f.grid.node(j, k).s; });
  gradient_fd(f);
  const HjbResidual res = hjb_residual(f, kRef, kCost);
  const double s = 1.0 / 3.0, i = 1.0 / 3.0;
  // alpha >= b u_max s, so the minimizer saturates at u_max.
  ASSERT_GE(alpha, 0.016 * kRef.u_max * s);
  const double ds0 = -kRef.beta * s * i + kRef.eta * (1.0 - s - i);
  const double cstar = 0.5 * 0.08 * i * i + 0.5 * 0.016 * kRef.u_max * kRef.u_max * s * s -
                       kRef.u_max * s * alpha;
  const double hand = std::abs(kRef.r * alpha * s - (ds0 * alpha + cstar));
  EXPECT_NEAR(res.max, hand, 1e-15);
  EXPECT_NEAR(res.argmax.s, s, 1e-15);
  EXPECT_NEAR(res.argmax.i, i, 1e-15);
}

TEST(BruteForce, Examples) {
  const CostModel free = CostModel::quadratic(0.0, 0.016);
  const BruteForceResult zero_cost = brute_force_value({0.6, 0.2}, 2, 30.0, kRef, free);
  EXPECT_EQ(zero_cost.running, 0.0);
  EXPECT_DOUBLE_EQ(zero_cost.value, zero_cost.tail);
  EXPECT_NEAR(zero_cost.tail, std::exp(-kRef.r * 30.0) * free.upper_bound(kRef.u_max) / kRef.r, 1e-12);

  const BruteForceResult healthy = brute_force_value({0.6, 0.0}, 3, 30.0, kRef, kCost);
  EXPECT_EQ(healthy.running, 0.0);
  for (double u : healthy.controls) EXPECT_EQ(u, 0.0);

  EXPECT_THROW(brute_force_value({0.6, 0.2}, 5, 30.0, kRef, kCost), std::invalid_argument);
  EXPECT_THROW(brute_force_value({0.6, 0.2}, 0, 30.0, kRef, kCost), std::invalid_argument);
}

TEST(ValueCsv, RoundTripAndProlongation) {
  const auto& [cfg, res] = reference_solve();
  std::ostringstream out;
  write_value_csv(out, res.field);
  EXPECT_EQ(out.str().rfind("s,i,v,vs\n", 0), 0u);
  std::istringstream in(out.str());
  const ValueField back = read_value_csv(in);
  EXPECT_EQ(back.grid.n(), cfg.grid_n);
  std::ostringstream again;
  write_value_csv(again, back);
  EXPECT_EQ(again.str(), out.str());

  const ValueField fine = prolongate(res.field, SimplexGrid(61));
  res.field.grid.for_each_node([&](int j, int k, std::size_t idx) {
    EXPECT_NEAR(fine.values[fine.grid.index(2 * j, 2 * k)], res.field.values[idx], 1e-14);
  });
}
