#include <gtest/gtest.h>

#include <cmath>

#include "semiuniform/alpha_factory.hpp"
#include "semiuniform/diophantine.hpp"

using namespace semiuniform;

namespace {

// Brute-force nearest odd integer in double precision.
long brute_nearest_odd(double x, double* dist) {
  long best = 1;
  double bd = 1e300;
  for (long u = -1001; u <= 100001; u += 2) {
    double d = std::fabs(x - u);
    if (d < bd) {
      bd = d;
      best = u;
    }
  }
  *dist = bd;
  return best;
}

}  // namespace

TEST(MinOddDist, SqrtTwo) {
  auto s2 = IrrationalSpec::sqrt_of(2);
  auto r5 = min_odd_dist(s2, 5, 64);
  EXPECT_EQ(r5.u, 7);
  EXPECT_NEAR(r5.dist.to_double(), 5 * std::sqrt(2.0) - 7, 1e-15);
  auto r1 = min_odd_dist(s2, 1, 64);
  EXPECT_EQ(r1.u, 1);
  EXPECT_NEAR(r1.dist.to_double(), std::sqrt(2.0) - 1, 1e-15);
}

TEST(MinOddDist, MatchesBruteForce) {
  auto s = IrrationalSpec::sqrt_of(3);
  for (long v = 1; v < 2000; v += 2) {
    double d;
    long u = brute_nearest_odd(v * std::sqrt(3.0), &d);
    auto r = min_odd_dist(s, v, 64);
    EXPECT_EQ(r.u, u) << v;
    EXPECT_NEAR(r.dist.to_double(), d, 1e-9);
    EXPECT_LE(r.dist.upper_double(), 1.0);
  }
}

TEST(MinOddDist, RationalAndTie) {
  // 3 * 3/2 = 4.5: nearest odd is 5 at distance 1/2.
  auto r = min_odd_dist(IrrationalSpec::quotients({1, 2}), 3, 64);
  EXPECT_EQ(r.u, 5);
  EXPECT_EQ(r.dist_lo, Rational(1, 2));
  EXPECT_EQ(r.dist_hi, Rational(1, 2));
  // 1 * 2 = 2 sits midway between 1 and 3: the smaller u wins.
  auto t = min_odd_dist(IrrationalSpec::quotients({2}), 1, 64);
  EXPECT_EQ(t.u, 1);
  EXPECT_EQ(t.dist_lo, Rational(1));
  EXPECT_THROW(min_odd_dist(IrrationalSpec::sqrt_of(2), 4, 64), Error);
}

TEST(OddOddStream, SqrtTwo) {
  auto t = expand(IrrationalSpec::sqrt_of(2), 12);
  auto s = odd_odd_stream(t, 3);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].u, 1);
  EXPECT_EQ(s[0].v, 1);
  EXPECT_EQ(s[1].u, 7);
  EXPECT_EQ(s[1].v, 5);
  EXPECT_EQ(s[2].u, 41);
  EXPECT_EQ(s[2].v, 29);
}

TEST(OddOddStream, GoldenAndBound) {
  auto t = expand(IrrationalSpec::golden(), 60);
  auto s = odd_odd_stream(t, 2);
  EXPECT_EQ(s[0].u, 1);
  EXPECT_EQ(s[0].v, 1);
  EXPECT_EQ(s[1].u, 5);
  EXPECT_EQ(s[1].v, 3);
  EXPECT_NEAR(s[1].err.to_double(), 5.0 / 3 - (1 + std::sqrt(5.0)) / 2, 1e-12);
  auto all = odd_odd_stream(t, 15);
  for (std::size_t k = 0; k + 1 < all.size(); ++k) {
    EXPECT_LT(all[k].v, all[k + 1].v);
    EXPECT_TRUE(is_odd(all[k].u) && is_odd(all[k].v));
    EXPECT_LT(all[k].err_hi, Rational(2) / Rational(all[k].v * all[k].v));
  }
}

TEST(OddOddStream, Exhausted) {
  auto t = expand(IrrationalSpec::sqrt_of(2), 3);
  try {
    odd_odd_stream(t, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TableExhausted);
  }
}

TEST(OddOddStream, DifferenceDenominatorBound) {
  // v = q_{n+1} - q_n >= q_{n-1} for every mixed pair.
  auto t = expand(IrrationalSpec::sqrt_of(7), 40);
  auto s = odd_odd_stream(t, 10);
  for (const auto& a : s) {
    if (!a.from_difference || a.from_index == 0) continue;
    EXPECT_GE(a.v, t.c[a.from_index - 1].q);
  }
}

TEST(OddOddStream, BadlyApproximableGrowth) {
  auto t = expand(IrrationalSpec::sqrt_of(3), 40);
  auto prof = badly_approx_profile(t);
  auto s = odd_odd_stream(t, 12);
  BigInt C = prof.max_a + 1;
  C = C * C * C;
  for (std::size_t k = 0; k + 1 < s.size(); ++k) EXPECT_LE(s[k + 1].v, C * s[k].v);
}

TEST(Parity, SqrtTwoPattern) {
  auto rep = parity_audit(expand(IrrationalSpec::sqrt_of(2), 5));
  EXPECT_TRUE(rep.pairs_ok);
  ASSERT_TRUE(rep.pattern_ok.has_value());
  EXPECT_TRUE(*rep.pattern_ok);
  EXPECT_EQ(rep.shapes[0], "odd/odd");
  EXPECT_EQ(rep.shapes[1], "odd/even");
}

TEST(Parity, GoldenAndCorrupted) {
  auto t = expand(IrrationalSpec::golden(), 4);
  auto rep = parity_audit(t);
  EXPECT_TRUE(rep.ok());
  EXPECT_FALSE(rep.pattern_ok.has_value());
  t.c[2].p = 4;
  t.c[3].p = 6;
  auto bad = parity_audit(t);
  EXPECT_FALSE(bad.pairs_ok);
  EXPECT_FALSE(bad.ok());
}

TEST(Profile, BoundedExamples) {
  auto p = badly_approx_profile(expand(IrrationalSpec::sqrt_of(2), 29));
  EXPECT_EQ(p.max_a, 2);
  EXPECT_EQ(p.c_lower, Rational(1, 4));
  EXPECT_TRUE(p.bounded_on_prefix);
  auto g = badly_approx_profile(expand(IrrationalSpec::golden(), 29));
  EXPECT_EQ(g.max_a, 1);
  EXPECT_EQ(g.c_lower, Rational(1, 3));
}

TEST(Profile, ConstructedExponential) {
  auto ca = construct(DecayTarget::exp_decay(1.0), 4096);
  auto p = badly_approx_profile(ca.table);
  EXPECT_EQ(p.max_a, 1327126);
  EXPECT_FALSE(p.bounded_on_prefix);
}

TEST(LargeGaps, Examples) {
  EXPECT_TRUE(large_gap_search(expand(IrrationalSpec::sqrt_of(2), 20), 3).empty());
  auto ca = construct(DecayTarget::exp_decay(1.0), 4096);
  auto g = large_gap_search(ca.table, 100);
  ASSERT_FALSE(g.empty());
  EXPECT_EQ(g, (std::vector<std::size_t>{2}));
  auto t = expand(IrrationalSpec::sqrt_of(2), 10);
  auto all = large_gap_search(t, 1);
  EXPECT_EQ(all, (std::vector<std::size_t>{0, 2, 4, 6, 8}));
}
