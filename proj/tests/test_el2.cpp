#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "occopt/el2.hpp"
#include "occopt/error.hpp"
#include "occopt/functionals.hpp"

using namespace occopt;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(EL2, RejectsBadC) {
  EXPECT_THROW(solve_el2({0.0, 1.0, 100}), InputError);
  EXPECT_THROW(solve_el2({1.5, 1.0, 100}), InputError);
  EXPECT_THROW(solve_el2({-0.2, 1.0, 100}), InputError);
  EXPECT_THROW(solve_el2({0.5, 1.0, 3}), InputError);
}

TEST(EL2, QuarterPeriodSolution) {
  const auto s = solve_el2({0.5, 1.0, 400});
  EXPECT_DOUBLE_EQ(s.v0, elliptic_K(EllipticParameter(0.5)));
  EXPECT_EQ(s.theta.theta.front(), 0.0);
  EXPECT_EQ(s.pulse[0], s.v0);
  EXPECT_GT(s.v0, 0.0);
  EXPECT_NEAR(s.pulse.values().back(), s.v0 * std::sqrt(0.5), 1e-10);
  EXPECT_NEAR(s.theta.theta.back(), kPi / 2, 1e-10);
  EXPECT_DOUBLE_EQ(s.lambda_prime, -1.0 / (0.5 * s.v0 * s.v0));
  EXPECT_LT(s.lambda_prime, 0.0);
}

TEST(EL2, SechBranch) {
  const auto s = solve_el2({1.0, 1.0, 4000});
  // gd(V0) = pi/2 - gap
  EXPECT_NEAR(2 * std::atan(std::tanh(s.v0 / 2)), kPi / 2 - 5e-11, 1e-14);
  EXPECT_NEAR(s.theta.theta.back(), kPi / 2, 1e-10);
  const auto& g = s.pulse.grid();
  for (std::size_t i = 0; i < g.size(); i += 97) {
    const double x = s.v0 * g.time(i);
    EXPECT_NEAR(s.pulse[i], s.v0 / std::cosh(x), 1e-12 * s.v0);
    // d/dt arccos(2 e^x / (1 + e^2x)) = V0 sech(V0 t) for t > 0
    if (x > 0 && x < 30) {
      const double h = 1e-6;
      auto f = [&](double y) { return std::acos(2 * std::exp(y) / (1 + std::exp(2 * y))); };
      EXPECT_NEAR(s.v0 * (f(x + h) - f(x - h)) / (2 * h), s.pulse[i], 1e-5 * s.v0);
    }
  }
}

TEST(EL2, PulseIsPositiveAndNonincreasing) {
  for (double C : {0.01, 0.3, 0.7, 0.99, 1.0}) {
    const auto s = solve_el2({C, 2.0, 500});
    for (std::size_t i = 0; i < s.pulse.size(); ++i) {
      EXPECT_GT(s.pulse[i], 0.0);
      if (i) EXPECT_LE(s.pulse[i], s.pulse[i - 1]);
    }
    EXPECT_NEAR(s.theta.theta.back(), kPi / 2, 1e-10);
  }
}

TEST(EL2, PendulumResidualIsTruncationLimited) {
  for (double C : {0.3, 0.7, 0.99}) {
    const auto s = solve_el2({C, 1.0, 4000});
    EXPECT_LT(s.residual_norm, 1e-5) << C;
    EXPECT_NEAR(s.pulse.values().back(), s.v0 * std::sqrt(1 - C), 1e-10);
  }
  // Second-order truncation: halving h divides the residual by ~4.
  const double r1 = solve_el2({0.7, 1.0, 500}).residual_norm;
  const double r2 = solve_el2({0.7, 1.0, 1000}).residual_norm;
  EXPECT_NEAR(r1 / r2, 4.0, 0.3);
}

TEST(PendulumResidual, Examples) {
  const TimeGrid g(1.0, 200);
  ThetaTrajectory zero{g, std::vector<double>(g.size(), 0.0), std::nullopt};
  for (double r : pendulum_residual(zero, -3.0)) EXPECT_EQ(r, 0.0);

  ThetaTrajectory lin{g, {}, std::nullopt};
  for (double t : g.times()) lin.theta.push_back(kPi * t / 2);
  const auto r = pendulum_residual(lin, 1.0);
  ASSERT_EQ(r.size(), g.intervals() - 1);
  for (std::size_t i = 0; i < r.size(); ++i) {
    EXPECT_NEAR(r[i], -std::sin(kPi * g.time(i + 1)), 1e-9);
  }
  EXPECT_THROW(pendulum_residual(lin, 0.0), InputError);
  ThetaTrajectory tiny{TimeGrid(1.0, 3), {0, 0.1, 0.2, 0.3}, std::nullopt};
  EXPECT_THROW(pendulum_residual(tiny, 1.0), InputError);
}

TEST(DecoherenceFree, Examples) {
  const TimeGrid g(1.0, 10);
  ThetaTrajectory th{g, std::vector<double>(g.size(), 0.0), std::nullopt};
  th.theta.back() = kPi / 2;
  const auto d = decoherence_free_occupation(th);
  EXPECT_EQ(d.states.front().rho22, 0.0);
  EXPECT_NEAR(d.states.back().rho22, 1.0, 1e-16);

  const auto s = solve_el2({0.5, 1.0, 300});
  const auto occ = decoherence_free_occupation(s.theta);
  for (std::size_t i = 0; i < occ.states.size(); ++i) {
    const double sn = jacobi_am_dn_sn_cn(s.v0 * s.pulse.grid().time(i), EllipticParameter(0.5)).sn;
    EXPECT_NEAR(occ.states[i].rho22, sn * sn, 1e-12);
  }
}

TEST(EL2, EnergyIncreasesWithC) {
  double prev = -1;
  for (int k = 0; k < 20; ++k) {
    const double C = 0.02 + 0.96 * k / 19.0;
    const double e = pulse_energy(solve_el2({C, 1.0, 2000}).pulse);
    EXPECT_GT(e, prev - 1e-8) << C;
    prev = e;
  }
}
