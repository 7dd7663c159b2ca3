#include <gtest/gtest.h>

#include <cmath>

#include "semiuniform/real.hpp"

using namespace semiuniform;

namespace {

// Independent check: the exact value must lie in the ball.
bool contains(const Real& x, mpfr_srcptr exact) {
  return mpfr_lessequal_p(x.lower().get(), exact) && mpfr_lessequal_p(exact, x.upper().get());
}

}  // namespace

TEST(Real, SqrtTwoEnclosesReference) {
  Real two = Real::from_long(2, 200);
  Real s = sqrt(two);
  mpfr_t ref;
  mpfr_init2(ref, 400);
  mpfr_sqrt_ui(ref, 2, MPFR_RNDN);
  EXPECT_TRUE(contains(s, ref));
  EXPECT_LT(s.log2_radius(), -190);
  mpfr_clear(ref);
}

TEST(Real, ArithmeticPropagatesRadius) {
  Real a = Real::with_radius(Rational(3, 2), Rational(1, 1000), 128);
  Real b = Real::with_radius(Rational(-7, 3), Rational(1, 500), 128);
  Real p = a * b;
  // [1.499,1.501] * [-2.33533,-2.33133]
  EXPECT_LE(p.lower_double(), 1.499 * -(7.0 / 3 + 0.002) + 1e-12);
  EXPECT_GE(p.upper_double(), 1.501 * -(7.0 / 3 - 0.002) - 1e-12);
  Real q = a / b;
  EXPECT_LE(q.lower_double(), 1.501 / -(7.0 / 3 - 0.002) + 1e-12);
  EXPECT_GE(q.upper_double(), 1.499 / -(7.0 / 3 + 0.002) - 1e-12);
}

TEST(Real, TrigAndExp) {
  Real pi = Real::pi(256);
  Real s = sin(pi);
  EXPECT_TRUE(s.contains_zero());
  Real c = cos(pi);
  EXPECT_NEAR(c.to_double(), -1.0, 1e-15);
  Real e = exp(Real::from_long(1, 256));
  EXPECT_NEAR(e.to_double(), std::exp(1.0), 1e-15);
  Real l = log(e);
  EXPECT_NEAR(l.to_double(), 1.0, 1e-15);
  EXPECT_LT(l.log2_radius(), -240);
}

TEST(Real, DivisionByZeroBallRejected) {
  Real z = Real::with_radius(Rational(0), Rational(1, 10), 64);
  EXPECT_THROW(Real::from_long(1, 64) / z, Error);
}

TEST(Real, CertainCeil) {
  auto c = Real::with_radius(Rational(49, 10), Rational(1, 100), 64).certain_ceil();
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ(*c, 5);
  EXPECT_FALSE(Real::with_radius(Rational(5), Rational(1, 100), 64).certain_ceil().has_value());
}

TEST(Real, AbsOfStraddlingBall) {
  Real x = Real::with_radius(Rational(1, 10), Rational(1, 5), 64);
  Real a = abs(x);
  EXPECT_LE(a.lower_double(), 0.0);
  EXPECT_GE(a.upper_double(), 0.3 - 1e-15);
}
