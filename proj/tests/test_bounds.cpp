#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "occopt/bounds.hpp"
#include "occopt/el4.hpp"
#include "occopt/error.hpp"
#include "occopt/functionals.hpp"

using namespace occopt;

namespace {

double simpson(double (*f)(double, const SystemParams&), const SystemParams& p, double T, int n = 20000) {
  const double h = T / n;
  double s = f(0, p) + f(T, p);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h, p);
  return s * h / 3;
}

}  // namespace

TEST(Rho22UpperBound, Examples) {
  const SystemParams p{1, 1, 0.5};
  EXPECT_EQ(rho22_upper_bound(0.0, p), 1.0);
  EXPECT_NEAR(rho22_upper_bound(1e6, p), 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(rho22_upper_bound(1.0, p), (1 + std::exp(-0.75)) / 2);
  EXPECT_THROW(rho22_upper_bound(-0.1, p), InputError);
  for (double t = 0; t < 20; t += 0.5) {
    const double b = rho22_upper_bound(t, p);
    EXPECT_GT(b, 0.5);
    EXPECT_LE(b, 1.0);
  }
}

TEST(N2UpperBound, Examples) {
  EXPECT_DOUBLE_EQ(n2_upper_bound(1.0, {1, 0, 0}), 1.0);
  // g = 2e-10: T/2 + (T/2)(1 - gT/4)
  EXPECT_NEAR(n2_upper_bound(1.0, {1, 1e-10, 1e-10}), 1.0 - 2.5e-11, 1e-15);
  const SystemParams p{1, 1, 0.5};
  const double exact = 0.5 + (1 - std::exp(-0.75)) / 1.5;
  EXPECT_NEAR(n2_upper_bound(1.0, p), exact, 1e-15);
  EXPECT_NEAR(exact, 0.85175, 1e-5);
  EXPECT_NEAR(n2_upper_bound(1e-9, p), 1e-9, 1e-12);
  EXPECT_THROW(n2_upper_bound(1.0, {1, -1, 0}), InputError);
  EXPECT_THROW(n2_upper_bound(0.0, p), InputError);
}

TEST(N2UpperBound, EqualsIntegralOfCeiling) {
  for (double T : {0.1, 1.0, 3.0}) {
    for (double g : {0.0, 0.2, 1.5, 7.0}) {
      const SystemParams p{1, g, g / 2};
      EXPECT_NEAR(n2_upper_bound(T, p), simpson(rho22_upper_bound, p, T), 1e-10) << T << " " << g;
    }
  }
}

TEST(N2UpperBound, BothBranchesMatchExtendedPrecision) {
  for (double g : {1e-12, 0.999e-8, 1.001e-8, 1e-6}) {
    const long double x = 0.5L * g;
    const long double ref = 0.5L - std::expm1(-x) / static_cast<long double>(g);
    EXPECT_NEAR(n2_upper_bound(1.0, {1, g, 0}), static_cast<double>(ref), 1e-15) << g;
  }
}

TEST(N2UpperBound, Monotonicity) {
  const SystemParams p{1, 1, 0.5};
  double prev = 0;
  for (double T = 0.1; T < 5; T += 0.1) {
    const double b = n2_upper_bound(T, p);
    EXPECT_GT(b, prev);
    prev = b;
  }
  prev = INFINITY;
  for (double g = 0; g < 10; g += 0.5) {
    const double b = n2_upper_bound(1.0, {1, g, g / 2});
    EXPECT_LT(b, prev);
    prev = b;
  }
}

TEST(EffectiveDecay, Examples) {
  EXPECT_EQ(effective_decay({1, 5e13, 2.5e13}), 3.75e13);
  EXPECT_EQ(effective_decay({1, 0, 0}), 0.0);
  EXPECT_EQ(lifetime_bound({1, 0, 0}), std::numeric_limits<double>::infinity());
  EXPECT_EQ(effective_decay({1, 1, 0.5}), 0.75);
  EXPECT_DOUBLE_EQ(lifetime_bound({1, 1, 0.5}), 4.0 / 3.0);
}

TEST(Ensemble, ValidationAndDeterminism) {
  EnsembleConfig c;
  c.amplitude_scale = 0.0;
  EXPECT_THROW(c.validate(), InputError);
  c = {};
  c.count = 0;
  EXPECT_THROW(c.validate(), InputError);

  c = {};
  c.count = 1;
  c.seed = 99;
  const TimeGrid g(1.0, 200);
  const auto a = random_pulse_ensemble(c, g);
  const auto b = random_pulse_ensemble(c, g);
  ASSERT_EQ(a.size(), 1u);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(a[0][i], b[0][i]);
  c.seed = 100;
  EXPECT_NE(random_pulse_ensemble(c, g)[0][17], a[0][17]);
}

TEST(Ensemble, ShapeAndScale) {
  EnsembleConfig c;
  c.count = 40;
  c.amplitude_scale = 10.0;
  const TimeGrid g(1.0, 400);
  for (const auto& p : random_pulse_ensemble(c, g)) {
    EXPECT_NEAR(trapezoid(p.values(), g.spacing()), 10.0, 1e-12);
    for (double v : p.values()) EXPECT_GE(v, 0.0);
    EXPECT_NEAR(p[0], 0.0, 1e-12);
  }
}

TEST(Ensemble, StrongFieldFractionForFigureConfiguration) {
  EnsembleConfig c;
  c.count = 40;
  c.seed = 1;
  c.amplitude_scale = 10.0;
  const SystemParams p{1, 1, 0.5};
  const auto pulses = random_pulse_ensemble(c, TimeGrid(1.0, 400));
  double sum = 0;
  for (const auto& q : pulses) sum += strong_field_fraction(p, q);
  EXPECT_GT(sum / 40, 0.8);
}

TEST(BoundCheck, EmptyAndZeroPulses) {
  const SystemParams p{1, 1, 0.5};
  const auto empty = bound_check(p, {});
  EXPECT_TRUE(empty.rows.empty());
  EXPECT_FALSE(empty.has_violation());

  const std::vector<PulseGrid> zero{PulseGrid::sample(TimeGrid(1.0, 100), [](double) { return 0.0; })};
  const auto r = bound_check(p, zero);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_FALSE(r.has_violation());
  EXPECT_EQ(r.rows[0].n2, 0.0);
  EXPECT_LT(r.rows[0].max_excess, -0.49);
}

TEST(BoundCheck, ReportsViolationsWithoutClipping) {
  // A half-sine of area 6/pi overshoots the ceiling near its first Rabi maximum.
  const SystemParams p{1, 1, 0.5};
  const std::vector<PulseGrid> pulses{
      PulseGrid::sample(TimeGrid(1.0, 400), [](double t) { return 3 * std::sin(M_PI * t); })};
  const auto r = bound_check(p, pulses);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_GT(r.rows[0].max_excess, 1e-9);
  EXPECT_GT(r.rows[0].violating_nodes, 0u);
  EXPECT_TRUE(r.has_violation());
  EXPECT_EQ(r.violating_pulses, 1u);
  EXPECT_LE(r.rows[0].n2, r.rows[0].n2_bound);
}

TEST(BoundCheck, OptimalPulseRespectsIntegralBound) {
  const SystemParams p{1, 5, 2.5};
  EL4Config c;
  c.lambda = -0.1;
  c.lambda1 = -1e-3;
  const auto s = solve_el4(c, p);
  ASSERT_TRUE(s.converged);
  const std::vector<PulseGrid> pulses{s.pulse};
  const auto r = bound_check(p, pulses);
  EXPECT_LE(r.rows[0].n2, n2_upper_bound(1.0, p));
  EXPECT_EQ(r.n2_violations, 0u);
}

TEST(BoundCheck, FailuresAreRecordedPerPulse) {
  const SystemParams p{1, 1, 0.5};
  const std::vector<PulseGrid> pulses{
      PulseGrid::sample(TimeGrid(1.0, 50), [](double) { return 1e200; }),
      PulseGrid::sample(TimeGrid(1.0, 50), [](double) { return 0.5; })};
  const auto r = bound_check(p, pulses);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_TRUE(r.rows[0].error.has_value());
  EXPECT_FALSE(r.rows[1].error.has_value());
  EXPECT_EQ(r.failed_pulses, 1u);
}
