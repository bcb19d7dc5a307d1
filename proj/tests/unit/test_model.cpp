#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sirsvax/model.hpp"

using namespace sirsvax;

namespace {

const EpidemicParams kRef{};
const CostModel kCost = CostModel::quadratic(0.08, 0.016);

State endemic_point(const EpidemicParams& p) {
  return {p.gamma / p.beta, p.eta / (p.gamma + p.eta) * (1.0 - p.gamma / p.beta)};
}

}  // namespace

TEST(Params, ReferenceValuesValidate) {
  EXPECT_NO_THROW(kRef.validate());
  EpidemicParams p;
  p.r = 0.0;
  EXPECT_NO_THROW(p.validate());
  for (double EpidemicParams::*field :
       {&EpidemicParams::beta, &EpidemicParams::gamma, &EpidemicParams::eta,
        &EpidemicParams::u_max}) {
    EpidemicParams bad;
    bad.*field = 0.0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
  }
  EpidemicParams neg;
  neg.r = -1e-3;
  EXPECT_THROW(neg.validate(), std::invalid_argument);
}

TEST(State, SimplexMembership) {
  EXPECT_TRUE((State{0.3, 0.3}.in_open_simplex()));
  EXPECT_FALSE((State{0.5, 0.0}.in_open_simplex()));
  EXPECT_TRUE((State{0.5, 0.0}.in_closed_simplex()));
  EXPECT_TRUE((State{0.5, 0.5 + 5e-13}.in_closed_simplex()));
  EXPECT_FALSE((State{0.5, 0.5 + 1e-9}.in_closed_simplex()));
  EXPECT_DOUBLE_EQ((State{0.75, 0.2}.recovered()), 0.05);
}

TEST(Drift, InfectionFreeLine) {
  const Drift d = drift({0.5, 0.0}, 0.0, kRef);
  EXPECT_NEAR(d.ds, 0.5 * 7.0 / 180.0, 1e-15);
  EXPECT_EQ(d.di, 0.0);
}

TEST(Drift, ReferenceInitialState) {
  // beta s i = 0.105, eta (1 - s - i) = 7/180 * 0.05, gamma i = 0.2/3.
  const Drift d = drift({0.75, 0.20}, 0.0, kRef);
  EXPECT_NEAR(d.ds, -0.105 + 7.0 / 3600.0, 1e-15);
  EXPECT_NEAR(d.di, 0.105 - 0.2 / 3.0, 1e-15);
  EXPECT_NEAR(d.ds, -0.1030555555555, 1e-12);
  EXPECT_NEAR(d.di, 0.0383333333333, 1e-12);
}

TEST(Drift, EndemicPointIsStationary) {
  const Drift d = drift(endemic_point(kRef), 0.0, kRef);
  EXPECT_NEAR(d.ds, 0.0, 1e-15);
  EXPECT_NEAR(d.di, 0.0, 1e-15);
}

TEST(Drift, RejectsOutOfDomain) {
  EXPECT_THROW(drift({0.5, 0.2}, -1e-9, kRef), std::domain_error);
  EXPECT_THROW(drift({0.5, 0.2}, kRef.u_max * 1.001, kRef), std::domain_error);
  EXPECT_THROW(drift({0.7, 0.4}, 0.0, kRef), std::domain_error);
  EXPECT_THROW(drift({-0.1, 0.4}, 0.0, kRef), std::domain_error);
  EXPECT_NO_THROW(drift({1.0, 0.0}, kRef.u_max, kRef));
}

TEST(RunningCost, Examples) {
  for (double s : {0.0, 0.3, 1.0}) EXPECT_EQ(running_cost({s, 0.0}, 0.0, kCost, kRef), 0.0);
  EXPECT_NEAR(running_cost({0.75, 0.20}, 0.0, kCost, kRef), 0.0016, 1e-18);
  const double us = 0.5 * 7.0 / 120.0;
  EXPECT_NEAR(running_cost({0.5, 0.1}, 7.0 / 120.0, kCost, kRef),
              0.5 * (0.08 * 0.01 + 0.016 * us * us), 1e-18);
  EXPECT_NEAR(running_cost({0.5, 0.1}, 7.0 / 120.0, kCost, kRef), 4.0680555555e-4, 1e-13);
}

TEST(RunningCost, ZeroOnlyWithoutInfectionAndVaccination) {
  EXPECT_GT(running_cost({0.5, 1e-3}, 0.0, kCost, kRef), 0.0);
  EXPECT_GT(running_cost({0.5, 0.0}, 1e-3, kCost, kRef), 0.0);
  EXPECT_EQ(running_cost({0.0, 0.0}, kRef.u_max, kCost, kRef), 0.0);
}

TEST(Hamiltonian, Examples) {
  EXPECT_EQ(hamiltonian_cv({0.3, 0.2}, {0.0, 0.0}, 0.01, kRef, kCost),
            running_cost({0.3, 0.2}, 0.01, kCost, kRef));
  const State eq = endemic_point(kRef);
  EXPECT_NEAR(hamiltonian_cv(eq, {3.0, -7.0}, 0.0, kRef, kCost),
              running_cost(eq, 0.0, kCost, kRef), 1e-15);
  EXPECT_NEAR(hamiltonian_cv({0.75, 0.20}, {1.0, 1.0}, 0.0, kRef, kCost), -0.0631222222222, 1e-12);
}

TEST(ReproductionNumbers, Examples) {
  const auto at_start = reproduction_numbers({0.75, 0.2}, kRef);
  EXPECT_NEAR(at_start.natural, 2.1, 1e-15);
  EXPECT_NEAR(reproduction_numbers({kRef.gamma / kRef.beta, 0.1}, kRef).instantaneous, 1.0, 1e-15);
  EXPECT_NEAR(reproduction_numbers({1.0, 0.0}, kRef).instantaneous, 2.1, 1e-15);
}

TEST(CostModel, QuadraticWeights) {
  EXPECT_NO_THROW(CostModel::quadratic(0.0, 0.016));
  EXPECT_THROW(CostModel::quadratic(-0.1, 0.016), std::invalid_argument);
  EXPECT_THROW(CostModel::quadratic(0.08, 0.0), std::invalid_argument);
  EXPECT_NEAR(kCost.upper_bound(kRef.u_max), 0.5 * (0.08 + 0.016 * kRef.u_max * kRef.u_max), 1e-18);
}

TEST(CostModel, GenericSpotChecks) {
  const auto ok = CostModel::generic(
      [](double s, double i, double u) { return i * i + u * u * (1.0 + s); }, 0.1);
  EXPECT_FALSE(ok.is_quadratic());
  EXPECT_NEAR(ok(0.5, 0.2, 0.1), 0.04 + 0.015, 1e-15);
  EXPECT_GE(ok.upper_bound(0.1), 1.0);
  EXPECT_THROW(CostModel::generic([](double, double, double u) { return -u; }, 0.1),
               std::invalid_argument);
  EXPECT_THROW(CostModel::generic([](double, double, double u) { return std::sin(40.0 * u) + 1.0; }, 0.3),
               std::invalid_argument);
}

// Properties over random samples of M x [0, u_max].

TEST(ModelProperties, CompartmentsBalance) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int n = 0; n < 10000; ++n) {
    const double s = unit(rng);
    const State x{s, (1.0 - s) * unit(rng)};
    const double u = kRef.u_max * unit(rng);
    const Drift d = drift(x, u, kRef);
    EXPECT_NEAR(d.ds + d.di + recovered_rate(x, u, kRef), 0.0, 1e-16);
  }
}

TEST(ModelProperties, CostConvexInControl) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int n = 0; n < 2000; ++n) {
    const double s = unit(rng);
    const State x{s, (1.0 - s) * unit(rng)};
    const double u = 0.5 * kRef.u_max * unit(rng);
    const double du = 0.25 * kRef.u_max * unit(rng);
    const double second = running_cost(x, u + 2 * du, kCost, kRef) -
                          2.0 * running_cost(x, u + du, kCost, kRef) +
                          running_cost(x, u, kCost, kRef);
    EXPECT_GE(second, -1e-18);
    EXPECT_NEAR(second, 0.016 * s * s * du * du, 1e-15);
  }
}

TEST(ModelProperties, HamiltonianAffineInCostate) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> wide(-5.0, 5.0);
  for (int n = 0; n < 2000; ++n) {
    const double s = unit(rng);
    const State x{s, (1.0 - s) * unit(rng)};
    const double u = kRef.u_max * unit(rng);
    const Gradient p{wide(rng), wide(rng)};
    const Gradient q{wide(rng), wide(rng)};
    const double al = unit(rng);
    const Gradient mix{al * p.p_s + (1 - al) * q.p_s, al * p.p_i + (1 - al) * q.p_i};
    EXPECT_NEAR(hamiltonian_cv(x, mix, u, kRef, kCost),
                al * hamiltonian_cv(x, p, u, kRef, kCost) +
                    (1 - al) * hamiltonian_cv(x, q, u, kRef, kCost),
                1e-14);
  }
}

TEST(ModelProperties, CostLipschitzInState) {
  const double k_lip = std::max(0.08, 0.016 * kRef.u_max * kRef.u_max);
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int n = 0; n < 5000; ++n) {
    const double s1 = unit(rng), s2 = unit(rng);
    const State x{s1, (1.0 - s1) * unit(rng)};
    const State y{s2, (1.0 - s2) * unit(rng)};
    const double u = kRef.u_max * unit(rng);
    const double gap = std::abs(running_cost(x, u, kCost, kRef) - running_cost(y, u, kCost, kRef));
    // l1 distance: the Euclidean form is off by up to sqrt(2).
    EXPECT_LE(gap, k_lip * (std::abs(x.s - y.s) + std::abs(x.i - y.i)) + 1e-16);
  }
}
