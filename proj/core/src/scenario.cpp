#include "sirsvax/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include "sirsvax/svg_plot.hpp"

namespace sirsvax {

namespace fs = std::filesystem;

void Scenario::validate() const {
  if (name.empty()) throw std::invalid_argument("scenario: empty name");
  params.validate();
  (void)cost();
  solver.validate();
  if (!x0.in_open_simplex()) {
    throw std::invalid_argument("scenario " + name + ": x0 must lie in the open simplex");
  }
  if (!(sim_horizon > 0.0) || !(sim_step > 0.0)) {
    throw std::invalid_argument("scenario " + name + ": simulation horizon and step must be positive");
  }
  if (hold < 0.0) throw std::invalid_argument("scenario " + name + ": negative hold");
}

std::vector<std::string> builtin_scenario_names() {
  return {"baseline-4.1", "no-vax-baseline", "eta-variation", "r0-variation",
          "i0-sweep"};
}

std::vector<Scenario> builtin_scenarios(const std::string& name,
                                        const std::string& out_dir) {
  const fs::path root(out_dir);
  auto variant = [&](const std::string& sub) {
    Scenario sc;
    sc.name = sub;
    sc.out_dir = (root / sub).string();
    return sc;
  };

  std::vector<Scenario> runs;
  if (name == "baseline-4.1") {
    runs.push_back(variant(name));
  } else if (name == "no-vax-baseline") {
    Scenario sc = variant(name);
    sc.optimize = false;
    runs.push_back(sc);
  } else if (name == "eta-variation") {
    // Immunity lasting 60 or 360 days; the rate is 7 / days per week.
    for (int days : {60, 360}) {
      Scenario sc = variant("eta-" + std::to_string(days) + "d");
      sc.params.eta = 7.0 / days;
      runs.push_back(sc);
    }
  } else if (name == "r0-variation") {
    // R_o = beta / gamma is moved through beta; gamma stays at 1/3.
    for (const auto& [label, beta] : {std::pair{"r0-3", 1.0}, std::pair{"r0-1.5", 0.5}}) {
      Scenario sc = variant(label);
      sc.params.beta = beta;
      runs.push_back(sc);
    }
  } else if (name == "i0-sweep") {
    for (const auto& [label, i0] :
         {std::pair{"i0-1pct", 0.01}, std::pair{"i0-5pct", 0.05}, std::pair{"i0-10pct", 0.10}}) {
      Scenario sc = variant(label);
      sc.params.beta = 0.5;
      sc.x0 = {0.75, i0};
      runs.push_back(sc);
    }
  } else {
    throw std::invalid_argument("unknown scenario: " + name);
  }
  return runs;
}

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  if (!obj.is_object()) throw std::invalid_argument("config: " + where + " must be an object");
  for (const auto& item : obj.items()) {
    if (allowed.count(item.key()) == 0) {
      throw std::invalid_argument("config: unknown key " + where + "." + item.key());
    }
  }
}

template <typename T>
void take(const json& obj, const char* key, T& target) {
  if (obj.contains(key)) target = obj.at(key).get<T>();
}

json state_json(const State& x) { return {{"s", x.s}, {"i", x.i}}; }

}  // namespace

void apply_config(Scenario& sc, const json& config) {
  reject_unknown(config,
                 {"name", "params", "cost", "x0", "solver", "simulation", "optimize", "out_dir"},
                 "root");
  try {
    take(config, "name", sc.name);
    take(config, "optimize", sc.optimize);
    take(config, "out_dir", sc.out_dir);
    if (config.contains("params")) {
      const json& p = config.at("params");
      reject_unknown(p, {"beta", "gamma", "eta", "r", "u_max"}, "params");
      take(p, "beta", sc.params.beta);
      take(p, "gamma", sc.params.gamma);
      take(p, "eta", sc.params.eta);
      take(p, "r", sc.params.r);
      take(p, "u_max", sc.params.u_max);
    }
    if (config.contains("cost")) {
      const json& c = config.at("cost");
      reject_unknown(c, {"a", "b"}, "cost");
      take(c, "a", sc.cost_a);
      take(c, "b", sc.cost_b);
    }
    if (config.contains("x0")) {
      const json& x = config.at("x0");
      reject_unknown(x, {"s", "i"}, "x0");
      take(x, "s", sc.x0.s);
      take(x, "i", sc.x0.i);
    }
    if (config.contains("solver")) {
      const json& s = config.at("solver");
      reject_unknown(s, {"grid_n", "time_step", "horizon", "tol", "tol_relative", "max_iters",
                         "relaxation"},
                     "solver");
      take(s, "grid_n", sc.solver.grid_n);
      take(s, "time_step", sc.solver.time_step);
      take(s, "horizon", sc.solver.horizon);
      take(s, "tol", sc.solver.fix_point_tol);
      take(s, "tol_relative", sc.solver.tol_relative);
      take(s, "max_iters", sc.solver.max_iters);
      take(s, "relaxation", sc.solver.relaxation);
    }
    if (config.contains("simulation")) {
      const json& s = config.at("simulation");
      reject_unknown(s, {"horizon", "step", "hold"}, "simulation");
      take(s, "horizon", sc.sim_horizon);
      take(s, "step", sc.sim_step);
      take(s, "hold", sc.hold);
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
}

double stabilization_time(const std::vector<double>& t,
                          const std::vector<double>& u, double tol) {
  if (t.empty() || t.size() != u.size()) {
    throw std::invalid_argument("stabilization_time: empty or mismatched trace");
  }
  const double final_u = u.back();
  for (std::size_t k = u.size(); k-- > 0;) {
    if (std::abs(u[k] - final_u) > tol) return t[k + 1];
  }
  return t.front();
}

double stabilization_time(const Trajectory& traj, double tol) {
  std::vector<double> t, u;
  t.reserve(traj.samples.size());
  u.reserve(traj.samples.size());
  for (const auto& smp : traj.samples) {
    t.push_back(smp.t);
    u.push_back(smp.u);
  }
  return stabilization_time(t, u, tol);
}

ScenarioOutcome compute_scenario(const Scenario& sc, const SolveResult* solved) {
  sc.validate();
  const CostModel cost = sc.cost();
  const SimplexGrid grid(sc.solver.grid_n);

  ScenarioOutcome out{SolveResult{ValueField(grid), 0, 0.0, 0.0, false, {}},
                      FeedbackPolicy(grid), {}, {}, {}, {}, 0.0, {}, {}};
  if (sc.optimize) {
    if (solved != nullptr && solved->field.grid == grid) {
      out.solve = *solved;
    } else {
      out.solve = solve(sc.solver, sc.params, cost);
    }
    out.policy = tabulate_policy(out.solve.field, cost, sc.params);
  } else {
    out.policy = constant_policy(grid, 0.0);
    out.solve = evaluate_policy(out.policy, sc.solver, sc.params, cost);
  }

  out.controlled = simulate_feedback(sc.x0, out.policy, sc.sim_horizon, sc.sim_step,
                                     sc.params, sc.hold);
  out.uncontrolled = integrate(sc.x0, ControlSchedule::constant(0.0, sc.params.u_max),
                               sc.sim_horizon, sc.sim_step, sc.params);
  out.stabilization = stabilization_time(out.controlled.trajectory);

  const double u_inf = std::clamp(out.controlled.trajectory.back().u, 0.0, sc.params.u_max);
  out.controlled_equilibria = equilibria(sc.params, u_inf);
  out.uncontrolled_equilibria = equilibria(sc.params, 0.0);

  const HjbResidual residual = hjb_residual(out.solve.field, sc.params, cost);
  const RealizedCost cost_on = realized_cost(out.controlled.trajectory, cost, sc.params);
  const RealizedCost cost_off = realized_cost(out.uncontrolled, cost, sc.params);
  const TrajectorySample& end_on = out.controlled.trajectory.back();
  const TrajectorySample& end_off = out.uncontrolled.back();

  out.summary = {
      {"scenario", sc.name},
      {"optimize", sc.optimize},
      {"params",
       {{"beta", sc.params.beta},
        {"gamma", sc.params.gamma},
        {"eta", sc.params.eta},
        {"r", sc.params.r},
        {"u_max", sc.params.u_max},
        {"R_o", sc.params.beta / sc.params.gamma}}},
      {"cost", {{"a", sc.cost_a}, {"b", sc.cost_b}, {"c_max", cost.upper_bound(sc.params.u_max)}}},
      {"x0", state_json(sc.x0)},
      {"solver",
       {{"grid_n", sc.solver.grid_n},
        {"time_step", sc.solver.time_step},
        {"horizon", sc.solver.horizon},
        {"max_iters", sc.solver.max_iters},
        {"relaxation", sc.solver.relaxation},
        {"tolerance", out.solve.tolerance},
        {"converged", out.solve.converged},
        {"iterations", out.solve.iterations},
        {"residual", out.solve.residual},
        {"hjb_residual", residual.max},
        {"hjb_residual_at", state_json(residual.argmax)},
        {"value_at_x0", out.solve.field.value_at(sc.x0.s, sc.x0.i)}}},
      {"policy",
       {{"u_at_x0", out.policy.at(sc.x0.s, sc.x0.i)},
        {"kink_nodes", out.policy.kink_count()}}},
      {"controlled",
       {{"terminal", {{"s", end_on.s}, {"i", end_on.i}, {"u", end_on.u}}},
        {"stabilization_time", out.stabilization},
        {"realized_cost", cost_on.running},
        {"tail_upper", cost_on.tail_upper},
        {"kink_events", out.controlled.kink_events.size()}}},
      {"uncontrolled",
       {{"terminal", {{"s", end_off.s}, {"i", end_off.i}}},
        {"realized_cost", cost_off.running},
        {"tail_upper", cost_off.tail_upper}}},
      {"simulation", {{"horizon", sc.sim_horizon}, {"step", sc.sim_step}, {"hold", sc.hold}}},
      {"equilibria",
       {{"controlled", to_json(out.controlled_equilibria)},
        {"uncontrolled", to_json(out.uncontrolled_equilibria)}}},
  };
  return out;
}

namespace {

void plot_bundle(const Scenario& sc, const ScenarioOutcome& out, const fs::path& dir,
                 std::vector<std::string>& files) {
  const auto& on = out.controlled.trajectory.samples;
  const auto& off = out.uncontrolled.samples;
  const double ro = sc.params.beta / sc.params.gamma;
  auto column = [](const std::vector<TrajectorySample>& smp, auto get) {
    std::vector<double> v;
    v.reserve(smp.size());
    for (const auto& x : smp) v.push_back(get(x));
    return v;
  };
  const auto t_on = column(on, [](const auto& x) { return x.t; });
  const auto t_off = column(off, [](const auto& x) { return x.t; });

  LinePlot control{sc.name + ": vaccination rate", "weeks", "u_t [1/week]", {}, 0.0,
                   1.05 * sc.params.u_max};
  control.series.push_back({"optimal", "#1f4e9c", false, t_on,
                            column(on, [](const auto& x) { return x.u; })});
  control.series.push_back({"no vaccination", "#777777", true, t_off,
                            column(off, [](const auto& x) { return x.u; })});

  LinePlot repro{sc.name + ": reproduction number", "weeks", "R_t", {}, 0.0, 0.0};
  repro.series.push_back({"optimal", "#1f4e9c", false, t_on,
                          column(on, [&](const auto& x) { return ro * x.s; })});
  repro.series.push_back({"no vaccination", "#777777", true, t_off,
                          column(off, [&](const auto& x) { return ro * x.s; })});
  repro.series.push_back({"R_t = 1", "#bbbbbb", true,
                          {t_on.front(), t_on.back()}, {1.0, 1.0}});

  LinePlot comp{sc.name + ": compartments", "weeks", "fraction of population", {}, 0.0, 1.0};
  comp.series.push_back({"S", "#1f4e9c", false, t_on, column(on, [](const auto& x) { return x.s; })});
  comp.series.push_back({"I", "#c0392b", false, t_on, column(on, [](const auto& x) { return x.i; })});
  comp.series.push_back({"R", "#2e8b57", false, t_on, column(on, [](const auto& x) { return x.r; })});
  comp.series.push_back({"S, no vacc.", "#1f4e9c", true, t_off, column(off, [](const auto& x) { return x.s; })});
  comp.series.push_back({"I, no vacc.", "#c0392b", true, t_off, column(off, [](const auto& x) { return x.i; })});
  comp.series.push_back({"R, no vacc.", "#2e8b57", true, t_off, column(off, [](const auto& x) { return x.r; })});

  for (const auto& [file, plot] :
       {std::pair{"control.svg", &control}, std::pair{"reproduction.svg", &repro},
        std::pair{"compartments.svg", &comp}}) {
    const std::string path = (dir / file).string();
    write_svg(path, *plot);
    files.push_back(path);
  }
}

}  // namespace

ScenarioOutcome run_scenario(const Scenario& sc, const SolveResult* solved) {
  ScenarioOutcome out = compute_scenario(sc, solved);
  const fs::path dir(sc.out_dir);
  fs::create_directories(dir);
  auto path = [&](const char* file) {
    out.files.push_back((dir / file).string());
    return out.files.back();
  };

  write_value_csv(path("value.csv"), out.solve.field);
  write_policy_csv(path("policy.csv"), out.policy);
  write_trajectory_csv(path("controlled.csv"), out.controlled.trajectory, sc.params);
  write_trajectory_csv(path("uncontrolled.csv"), out.uncontrolled, sc.params);
  write_kink_log(path("kinks.jsonl"), out.controlled.kink_events);
  {
    std::ofstream eq(path("equilibria.json"));
    if (!eq) throw std::runtime_error("cannot write " + out.files.back());
    eq << out.summary.at("equilibria").dump(2) << '\n';
  }
  plot_bundle(sc, out, dir, out.files);

  const std::string summary_path = path("summary.json");
  json listed = json::array();
  for (const auto& f : out.files) listed.push_back(fs::path(f).filename().string());
  out.summary["files"] = listed;
  std::ofstream summary(summary_path);
  if (!summary) throw std::runtime_error("cannot write " + summary_path);
  summary << out.summary.dump(2) << '\n';
  return out;
}

}  // namespace sirsvax
