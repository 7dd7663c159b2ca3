#include <gtest/gtest.h>

#include <semiuniform/rates.hpp>

using namespace semiuniform;

TEST(MLog, Substitution) {
  auto M = MonotoneFn::power(2);
  EXPECT_NEAR(m_log(M)(1.0), 2 * std::log(2.0), 1e-15);
  auto one = MonotoneFn::custom([](double) { return 1.0; }, 0, INFINITY, "one");
  EXPECT_NEAR(m_log(one)(0.0), std::log(2.0), 1e-15);
}

TEST(MLog, CurveKnots) {
  auto M = MonotoneFn::from_knots({0, 1, 2, 5}, {1, 1.5, 4, 30});
  auto L = m_log(M);
  for (auto [x, m] : std::vector<std::pair<double, double>>{{1, 1.5}, {2, 4}, {5, 30}}) {
    EXPECT_NEAR(L(x), m * (std::log(1 + m) + std::log(1 + x)), 1e-14);
  }
  double prev = -1;
  for (double x = 0; x <= 5; x += 0.05) {
    EXPECT_GE(L(x), prev);
    prev = L(x);
  }
}

TEST(MonotoneFn, CurveEnvelope) {
  auto M = MonotoneFn::from_knots({1, 2, 3}, {5, 4, 6});
  EXPECT_EQ(M(2), 5);
  EXPECT_EQ(M(1.5), 5);
  EXPECT_THROW(M(0.5), Error);
}

TEST(Invert, Basics) {
  auto M = MonotoneFn::power(2);
  EXPECT_NEAR(invert(M, 100), 10, 1e-12);
  auto F = MonotoneFn::power_log(1, 2, 3);
  double y = F(7);
  EXPECT_NEAR(invert(F, y), 7, 7e-9);
  auto G = MonotoneFn::power_log(1, 2, 0, M_E, 1);
  try {
    invert(G, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BelowRange);
  }
}

TEST(Invert, SupConventionOnFlats) {
  auto M = MonotoneFn::from_knots({0, 1, 2, 3}, {0, 1, 1, 2});
  double x = invert(M, 1);
  EXPECT_NEAR(x, 2, 1e-12);
  EXPECT_LE(M(x), 1);
  EXPECT_GT(M(x + 1e-9), 1);
}

TEST(Invert, RoundTrip) {
  for (auto F : {MonotoneFn::power(2), MonotoneFn::power_log(3, 1.5, 2), MonotoneFn::power_log(1, 0, 1)}) {
    for (double x : {0.5, 3.0, 80.0, 1e4}) {
      EXPECT_NEAR(invert(F, F(x)), x, 1e-9 * x) << F.name();
    }
  }
}

TEST(Predict, RSSOnSquare) {
  auto M = MonotoneFn::power(2);
  auto p = predict(M, DecayKind::RSSUpper, 1, 1, {1e2, 1e4, 1e6});
  ASSERT_TRUE(p.certificate);
  EXPECT_NEAR(p.certificate->alpha_hat, 2, 1e-12);
  for (auto [t, b] : p.rows) EXPECT_NEAR(b, 1 / std::sqrt(t), 1e-9 / std::sqrt(t));
  EXPECT_EQ(p.label, "shape-only prediction");
}

TEST(Predict, LowerBoundSquare) {
  auto p = predict(MonotoneFn::power(2), DecayKind::LowerBound, 1, 1, {4, 100});
  EXPECT_NEAR(p.rows[0].second, 0.5, 1e-12);
  EXPECT_NEAR(p.rows[1].second, 0.1, 1e-12);
  auto q = predict(MonotoneFn::power(2), DecayKind::LowerBound, 2, 4, {100});
  EXPECT_NEAR(q.rows[0].second, 2 / 20.0, 1e-12);
}

TEST(Predict, BattyDuyckaerts) {
  const double eps = 0.1;
  auto M = MonotoneFn::power_log(1, 2, 2 + eps, 0, 1.5);
  auto L = m_log(M);
  auto p = predict(M, DecayKind::BattyDuyckaerts, 1, 1, {10, 1e3, 1e5, 1e7});
  double prev = INFINITY;
  for (auto [t, b] : p.rows) {
    double x = 1 / b;
    EXPECT_NEAR(L(x), t, 1e-6 * t);
    EXPECT_LT(b, prev);
    prev = b;
  }
}

TEST(Predict, RSSWithoutIncrease) {
  auto M = MonotoneFn::power_log(1, 0, 1);
  try {
    predict(M, DecayKind::RSSUpper, 1, 1, {10});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingCertificate);
  }
}

TEST(Predict, Decreasing) {
  for (auto k : {DecayKind::BattyDuyckaerts, DecayKind::RSSUpper, DecayKind::LowerBound}) {
    auto p = predict(MonotoneFn::power_log(1, 2, 1), k, 1, 1, {10, 20, 40, 1000, 1e5});
    for (std::size_t i = 1; i < p.rows.size(); ++i) EXPECT_LT(p.rows[i].second, p.rows[i - 1].second);
    for (auto [t, b] : p.rows) EXPECT_GT(b, 0);
  }
}

TEST(PositiveIncrease, ExactPower) {
  auto pi = positive_increase_estimate(MonotoneFn::power(2), {1, 2, 5, 10, 100}, {1, 10, 100, 1000});
  EXPECT_NEAR(pi.alpha_hat, 2, 1e-12);
  EXPECT_NEAR(pi.c, 1, 1e-12);
  EXPECT_TRUE(pi.certified);
  EXPECT_TRUE(pi.flat.empty());
}

TEST(PositiveIncrease, LogRefuted) {
  auto pi = positive_increase_estimate(MonotoneFn::power_log(1, 0, 1), {1, 2, 10, 100, 1000}, {1e2, 1e4, 1e6});
  EXPECT_LT(pi.alpha_hat, 0.1);
  EXPECT_FALSE(pi.certified);
  EXPECT_FALSE(pi.flat.empty());
}

TEST(PositiveIncrease, SandwichTransfer) {
  // d f <= g <= D f with f = eta^1.5, g = f (2 + sin(log eta)) / 2.
  auto f = MonotoneFn::power(1.5);
  auto g = MonotoneFn::custom([](double x) { return std::pow(x, 1.5) * (2 + std::sin(0.3 * std::log(x))) / 2; }, 1,
                              INFINITY, "wiggle");
  const double d = 0.5, D = 1.5;
  std::vector<double> ls = {1, 2, 4, 10, 30}, ts = {1, 3, 10, 30, 100, 300, 1000};
  auto pf = positive_increase_estimate(f, ls, ts);
  double cg = increase_constant_at(g, pf.alpha_hat, ls, ts);
  EXPECT_GE(cg, d / D * pf.c);
  auto pg = positive_increase_estimate(g, ls, ts, 0, d / D * pf.c);
  EXPECT_GE(pg.alpha_hat, pf.alpha_hat - 1e-12);
  EXPECT_GE(pg.c, d / D * pf.c - 1e-15);
}

TEST(PositiveIncrease, CurveStepsRefuted) {
  // a staircase: long flats between jumps
  std::vector<double> xs, ys;
  double y = 1;
  for (int k = 0; k <= 60; ++k) {
    xs.push_back(std::pow(10.0, k / 10.0));
    if (k % 20 == 19) y *= 1e3;
    ys.push_back(y);
  }
  auto M = MonotoneFn::from_knots(xs, ys);
  auto pi = positive_increase_estimate(M, {1, 10, 30}, {2, 3, 20, 30});
  EXPECT_FALSE(pi.certified);
  ASSERT_FALSE(pi.flat.empty());
  EXPECT_GE(pi.flat.front().lambda, 10);
  EXPECT_LT(pi.flat.front().ratio, 2);
}
