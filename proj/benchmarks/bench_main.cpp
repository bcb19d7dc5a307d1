#include <benchmark/benchmark.h>

#include <cmath>

#include "sirsvax/hjb_solver.hpp"
#include "sirsvax/integrator.hpp"
#include "sirsvax/policy.hpp"

using namespace sirsvax;

static void BM_Rk4Step(benchmark::State& state) {
  const EpidemicParams p;
  State x{0.75, 0.2};
  for (auto _ : state) {
    x = rk4_step(x, 0.01, 0.05, p);
    benchmark::DoNotOptimize(x);
  }
}
BENCHMARK(BM_Rk4Step);

static void BM_Interpolate(benchmark::State& state) {
  const SimplexGrid grid(101);
  ValueField f(grid);
  grid.for_each_node([&](int j, int k, std::size_t idx) {
    const State x = grid.node(j, k);
    f.values[idx] = std::sin(3.0 * x.s) + x.i * x.i;
  });
  double s = 0.1;
  for (auto _ : state) {
    s = std::fmod(s + 0.0137, 0.9);
    benchmark::DoNotOptimize(f.value_at(s, 0.05));
  }
}
BENCHMARK(BM_Interpolate);

static void BM_UStarGeneric(benchmark::State& state) {
  const CostModel cost = CostModel::quadratic(0.08, 0.016);
  for (auto _ : state) {
    benchmark::DoNotOptimize(u_star_generic({0.6, 0.1}, 0.4, cost, 7.0 / 120.0));
  }
}
BENCHMARK(BM_UStarGeneric);

// One feedback sweep over the whole grid; the argument is grid_n.
static void BM_FeedbackSweep(benchmark::State& state) {
  const EpidemicParams p;
  const CostModel cost = CostModel::quadratic(0.08, 0.016);
  SolverConfig cfg;
  cfg.grid_n = static_cast<int>(state.range(0));
  const ValueField v(SimplexGrid(cfg.grid_n));
  for (auto _ : state) {
    benchmark::DoNotOptimize(bellman_map(v, cfg, p, cost));
  }
}
BENCHMARK(BM_FeedbackSweep)->Arg(21)->Arg(51)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
