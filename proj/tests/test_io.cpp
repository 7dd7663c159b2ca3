#include <gtest/gtest.h>

#include <sstream>

#include <semiuniform/io.hpp>

using namespace semiuniform;

TEST(AlphaJson, RoundTrip) {
  auto ca = construct(DecayTarget::exp_decay(1), 256);
  std::vector<IrrationalSpec> specs = {IrrationalSpec::sqrt_of(2), IrrationalSpec::golden(),
                                       IrrationalSpec::quotients({1, 2, 3}), IrrationalSpec::decimal("1.4142135", 20),
                                       ca.alpha};
  for (const auto& a : specs) {
    auto j = alpha_to_json(a);
    auto b = alpha_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(alpha_to_json(b), j);
    auto ta = expand(a, 2), tb = expand(b, 2);
    ASSERT_EQ(ta.size(), tb.size());
    for (std::size_t n = 0; n < ta.size(); ++n) EXPECT_EQ(ta.c[n].q, tb.c[n].q);
  }
}

TEST(AlphaJson, Rejects) {
  EXPECT_THROW(alpha_from_json(nlohmann::json::parse(R"({"kind": "klein"})")), Error);
  EXPECT_THROW(alpha_from_json(nlohmann::json::parse(R"({"kind": "surd", "D": "x"})")), Error);
  EXPECT_THROW(alpha_from_json(nlohmann::json::array()), Error);
}

TEST(GrowthCsv, OutwardRoundTrip) {
  auto gc = growth_curve(IrrationalSpec::sqrt_of(2), {10, 100}, 1e-3);
  std::ostringstream os;
  write_growth_csv(os, gc);
  std::istringstream is(os.str());
  auto back = read_growth_csv(is);
  ASSERT_EQ(back.points.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back.points[i].eta, gc.points[i].eta);
    // Printed values enclose the certified bracket.
    EXPECT_LE(back.points[i].m_lower.to_double(), gc.points[i].m_lower.lower_double());
    EXPECT_GE(back.points[i].m_upper.to_double(), gc.points[i].m_upper.upper_double());
    EXPECT_NEAR(back.points[i].m_upper.to_double() / gc.points[i].m_upper.to_double(), 1, 1e-10);
  }
  std::istringstream bad("eta,m\n1,2\n");
  EXPECT_THROW(read_growth_csv(bad), Error);
}

TEST(Csv, Headers) {
  std::vector<BigInt> vs = {1, 3};
  auto rows = sandwich_report(IrrationalSpec::sqrt_of(2), vs);
  std::ostringstream os;
  write_sandwich_csv(os, rows);
  std::string s = os.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "v,u,dist,inf_lower,inf_upper,ratio_lo,ratio_hi");
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 3);

  auto p = predict(MonotoneFn::power(2), DecayKind::LowerBound, 1, 1, {4});
  std::ostringstream ps;
  write_prediction_csv(ps, p);
  EXPECT_EQ(ps.str(), "t,bound,kind\n4,0.5,LowerBound\n");
}

TEST(Csv, ConvergentsWithBounds) {
  auto t = expand(IrrationalSpec::sqrt_of(2), 3);
  auto b = check_bounds(t);
  std::ostringstream os;
  write_convergents_csv(os, t, &b);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "n,a,p,q,lower_ok,upper_ok,lower_margin,upper_margin");
  std::getline(is, line);
  EXPECT_EQ(line.substr(0, 12), "0,1,1,1,1,1,");
}
