#include <gtest/gtest.h>

#include <boost/math/special_functions/jacobi_elliptic.hpp>
#include <cmath>
#include <numbers>

#include "occopt/elliptic.hpp"
#include "occopt/error.hpp"

using namespace occopt;

namespace {

constexpr double kPi = std::numbers::pi;

// Extended-precision AGM oracle for K(m).
long double agm_K(long double m) {
  long double a = 1.0L, b = std::sqrt(1.0L - m);
  for (int i = 0; i < 64; ++i) {
    const long double an = (a + b) / 2;
    b = std::sqrt(a * b);
    a = an;
  }
  return std::numbers::pi_v<long double> / (2 * a);
}

}  // namespace

TEST(EllipticParameter, Range) {
  EXPECT_THROW(EllipticParameter(-0.1), InputError);
  EXPECT_THROW(EllipticParameter(1.1), InputError);
  EXPECT_THROW(EllipticParameter(std::nan("")), InputError);
  EXPECT_TRUE(EllipticParameter(1.0).degenerate());
  EXPECT_TRUE(EllipticParameter(1.0 - 5e-13).degenerate());
  EXPECT_FALSE(EllipticParameter(1.0 - 1e-9).degenerate());
}

TEST(EllipticK, Examples) {
  EXPECT_NEAR(elliptic_K(EllipticParameter(0.0)), kPi / 2, 1e-15);
  const double k5 = elliptic_K(EllipticParameter(0.5));
  EXPECT_NEAR(k5, static_cast<double>(agm_K(0.5L)), 1e-14 * k5);
  const double m = 1.0 - 1e-6;
  const double asym = 0.5 * std::log(16.0 / (1.0 - m));
  EXPECT_NEAR(elliptic_K(EllipticParameter(m)), asym, 1e-5 * asym);
  EXPECT_THROW(elliptic_K(EllipticParameter(1.0)), InputError);
}

TEST(EllipticK, MatchesStandardLibrary) {
  for (double m = 0.0; m < 0.999; m += 0.037) {
    const double ref = std::comp_ellint_1(std::sqrt(m));  // takes the modulus k
    EXPECT_NEAR(elliptic_K(EllipticParameter(m)), ref, 1e-14 * ref) << m;
  }
}

TEST(Jacobi, AtZero) {
  for (double m : {0.0, 0.3, 0.9, 1.0}) {
    const auto j = jacobi_am_dn_sn_cn(0.0, EllipticParameter(m));
    EXPECT_EQ(j.am, 0.0);
    EXPECT_EQ(j.dn, 1.0);
    EXPECT_EQ(j.sn, 0.0);
    EXPECT_EQ(j.cn, 1.0);
  }
}

TEST(Jacobi, CircularCase) {
  for (double u = -5; u < 5; u += 0.31) {
    const auto j = jacobi_am_dn_sn_cn(u, EllipticParameter(0.0));
    EXPECT_EQ(j.am, u);
    EXPECT_EQ(j.dn, 1.0);
    EXPECT_NEAR(j.sn, std::sin(u), 1e-15);
    EXPECT_NEAR(j.cn, std::cos(u), 1e-15);
  }
}

TEST(Jacobi, HyperbolicCase) {
  for (double u = 0; u <= 10; u += 0.25) {
    const auto j = jacobi_am_dn_sn_cn(u, EllipticParameter(1.0));
    EXPECT_NEAR(j.dn, 1.0 / std::cosh(u), 1e-12);
    EXPECT_NEAR(j.cn, 1.0 / std::cosh(u), 1e-12);
    EXPECT_NEAR(j.sn, std::tanh(u), 1e-12);
    EXPECT_NEAR(j.am, std::atan(std::sinh(u)), 1e-12);  // gd(u), second form
  }
}

TEST(Jacobi, MatchesBoost) {
  for (double m : {0.1, 0.5, 0.8, 0.99, 0.999999}) {
    const double k = std::sqrt(m);
    for (double u = -7; u <= 7; u += 0.173) {
      double cn = 0, dn = 0;
      const double sn = boost::math::jacobi_elliptic(k, u, &cn, &dn);
      const auto j = jacobi_am_dn_sn_cn(u, EllipticParameter(m));
      EXPECT_NEAR(j.sn, sn, 1e-12) << m << " " << u;
      EXPECT_NEAR(j.cn, cn, 1e-12) << m << " " << u;
      EXPECT_NEAR(j.dn, dn, 1e-12) << m << " " << u;
    }
  }
}

TEST(Jacobi, Identities) {
  for (double m : {0.05, 0.5, 0.95}) {
    const EllipticParameter p(m);
    for (double u = -4; u <= 4; u += 0.1) {
      const auto j = jacobi_am_dn_sn_cn(u, p);
      EXPECT_NEAR(j.sn * j.sn + j.cn * j.cn, 1.0, 1e-12);
      EXPECT_NEAR(j.dn * j.dn + m * j.sn * j.sn, 1.0, 1e-12);
      EXPECT_NEAR(std::sin(j.am), j.sn, 1e-12);
    }
  }
}

TEST(Jacobi, QuarterPeriodAndPeriodicity) {
  for (double m : {0.1, 0.5, 0.9, 0.999}) {
    const EllipticParameter p(m);
    const double K = elliptic_K(p);
    EXPECT_NEAR(jacobi_am_dn_sn_cn(K, p).dn, std::sqrt(1 - m), 1e-12);
    EXPECT_NEAR(jacobi_am_dn_sn_cn(K, p).am, kPi / 2, 1e-12);
    for (double u = 0; u < 3; u += 0.2) {
      EXPECT_NEAR(jacobi_am_dn_sn_cn(u + 2 * K, p).dn, jacobi_am_dn_sn_cn(u, p).dn, 1e-10);
    }
  }
}

TEST(Jacobi, DerivativeRelations) {
  const double h = 1e-5;
  for (double m : {0.3, 0.8}) {
    const EllipticParameter p(m);
    const double K = elliptic_K(p);
    for (double u = 0; u <= 4 * K; u += K / 7) {
      const auto j = jacobi_am_dn_sn_cn(u, p);
      const auto jp = jacobi_am_dn_sn_cn(u + h, p);
      const auto jm = jacobi_am_dn_sn_cn(u - h, p);
      EXPECT_NEAR((jp.am - jm.am) / (2 * h), j.dn, 1e-6);
      EXPECT_NEAR((jp.dn - jm.dn) / (2 * h), -m * j.sn * j.cn, 1e-6);
    }
  }
}

TEST(Jacobi, RejectsNonFinite) {
  EXPECT_THROW(jacobi_am_dn_sn_cn(INFINITY, EllipticParameter(0.5)), InputError);
}
