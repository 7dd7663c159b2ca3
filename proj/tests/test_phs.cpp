#include <gtest/gtest.h>

#include <semiuniform/phs.hpp>
#include <semiuniform/spectral.hpp>

using namespace semiuniform;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidArgument;  // not thrown; callers compare against something else
}

// RK4 for v' = G(x) v on [a, b], v(a) = I.
MatC rk4_oracle(const PHSystem& s, double t, double x_end, int steps_per_piece = 20000) {
  const MatC P1inv = s.P1.inverse().cast<cplx>();
  MatC v = MatC::Identity(s.d, s.d);
  for (std::size_t k = 0; k < s.pieces(); ++k) {
    double x0 = s.breaks[k], x1 = std::min(s.breaks[k + 1], x_end);
    if (x1 <= x0) break;
    MatC G = -P1inv * (cplx(0, t) * s.H[k].inverse().cast<cplx>() + s.P0.cast<cplx>());
    double h = (x1 - x0) / steps_per_piece;
    for (int i = 0; i < steps_per_piece; ++i) {
      MatC k1 = G * v, k2 = G * (v + 0.5 * h * k1), k3 = G * (v + 0.5 * h * k2), k4 = G * (v + h * k3);
      v += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
  }
  return v;
}

PHSystem two_piece() {
  PHSystem s;
  s.d = 2;
  s.P0 = MatR(2, 2);
  s.P0 << 0, 0.7, -0.7, 0;
  s.P1 = MatR(2, 2);
  s.P1 << 2, 0.5, 0.5, -1;
  s.breaks = {0.0, 0.4, 1.5};
  MatR H1(2, 2), H2(2, 2);
  H1 << 1.0, 0.2, 0.2, 0.8;
  H2 << 2.0, -0.3, -0.3, 0.5;
  s.H = {H1, H2};
  s.W = MatR(2, 4);
  s.W << 1, 0, 0.3, 0, 0, 1, 0, 0.4;
  return s;
}

PHSystem scalar_system(double h) {
  PHSystem s;
  s.d = 1;
  s.P0 = MatR::Zero(1, 1);
  s.P1 = MatR::Identity(1, 1);
  s.breaks = {0.0, 1.0};
  s.H = {MatR::Constant(1, 1, h)};
  s.W = MatR(1, 2);
  s.W << 1, 1;
  return s;
}

// (i t + A) on the scalar system is i t plus a skew-adjoint operator with
// eigenvalues i h pi (2k+1): ||R|| = 1 / dist.
double scalar_resolvent_norm(double t, double h) {
  double best = INFINITY;
  for (int m = -201; m <= 201; m += 2) best = std::min(best, std::fabs(t + h * M_PI * m));
  return 1 / best;
}

}  // namespace

TEST(Validate, UniversalOk) {
  EXPECT_TRUE(validation_errors(universal_system(std::sqrt(2.0))).empty());
  EXPECT_TRUE(validation_errors(two_piece()).empty());
}

TEST(Validate, Violations) {
  auto s = universal_system(2.0);
  s.P0 = MatR::Identity(2, 2);
  EXPECT_EQ(kind_of([&] { validate(s); }), ErrorKind::SkewnessViolation);
  s = universal_system(2.0);
  s.W.block(0, 2, 2, 2).setConstant(0.5);
  EXPECT_EQ(kind_of([&] { validate(s); }), ErrorKind::RankViolation);
  s = universal_system(2.0);
  s.H[0](1, 1) = -1;
  EXPECT_EQ(kind_of([&] { validate(s); }), ErrorKind::DefinitenessViolation);
  s = universal_system(2.0);
  s.P1(0, 1) = 1;
  EXPECT_EQ(kind_of([&] { validate(s); }), ErrorKind::SymmetryViolation);
  s = universal_system(2.0);
  s.P0 = MatR::Identity(2, 2);
  s.W.block(0, 2, 2, 2).setConstant(0.5);
  EXPECT_EQ(validation_errors(s).size(), 2u);
}

TEST(MoorePenrose, Cases) {
  MatR W = MatR::Zero(2, 4);
  W.block(0, 0, 2, 2).setIdentity();
  MatR Wp = moore_penrose(W);
  MatR want = MatR::Zero(4, 2);
  want.block(0, 0, 2, 2).setIdentity();
  EXPECT_LT((Wp - want).norm(), 1e-15);
  MatR U = universal_system(1.3).W;
  EXPECT_LT((U * moore_penrose(U) - MatR::Identity(2, 2)).norm(), 1e-12);
  MatR R(2, 4);
  R << 1, 2, 3, 4, 2, 4, 6, 8;
  EXPECT_EQ(kind_of([&] { moore_penrose(R); }), ErrorKind::RankDeficient);
}

TEST(Fundamental, DiagonalPhases) {
  const double alpha = std::sqrt(2.0);
  auto s = universal_system(alpha);
  for (double t : {0.0, 1.0, 7.5, -3.0}) {
    FundamentalMatrix fm(s, t);
    EXPECT_TRUE(fm.at(0.0) == MatC::Identity(2, 2));
    MatC P = fm.at_b();
    EXPECT_LT(std::abs(P(0, 0) - std::polar(1.0, -t)), 1e-14);
    EXPECT_LT(std::abs(P(1, 1) - std::polar(1.0, -alpha * t)), 1e-14);
    EXPECT_LT(std::abs(P(0, 1)) + std::abs(P(1, 0)), 1e-14);
    EXPECT_NEAR(fm.B(), 1.0, 1e-13);
  }
}

TEST(Fundamental, TwoPieceAgainstIntegrator) {
  auto s = two_piece();
  for (double t : {0.0, 1.0, 5.0}) {
    FundamentalMatrix fm(s, t);
    for (double x : {0.2, 0.4, 0.9, 1.5}) {
      MatC ref = rk4_oracle(s, t, x);
      EXPECT_LT((fm.at(x) - ref).norm(), 1e-10 * std::max(1.0, ref.norm())) << t << " " << x;
      EXPECT_LT((fm.inv_at(x) * fm.at(x) - MatC::Identity(2, 2)).norm(), 1e-11);
    }
  }
}

TEST(Fundamental, InverseBound) {
  auto s = two_piece();
  const double np1 = detail::opnorm(s.P1), np1i = detail::opnorm(MatR(s.P1.inverse()));
  for (double t : {0.5, 3.0, 20.0}) {
    FundamentalMatrix fm(s, t);
    for (int j = 0; j <= 30; ++j) {
      double x = 1.5 * j / 30;
      EXPECT_LE(detail::opnorm(fm.inv_at(x)), fm.B() * np1 * np1i * (1 + 1e-9));
    }
  }
}

TEST(Boundary, UniversalConvention) {
  auto s = universal_system(std::sqrt(2.0));
  MatC T0 = boundary_matrix(s, 0.0);
  EXPECT_NEAR(std::abs(T0.determinant() - cplx(2, 0)), 0, 1e-14);
  auto alpha = IrrationalSpec::sqrt_of(2);
  for (double t : {0.5, M_PI, 17.0, 99.0}) {
    cplx got = boundary_matrix(s, t).determinant();
    // W [Phi(b); I] = M diag(e^{-it}, e^{-i alpha t}) + I: the conjugate of T_t.
    Complex want = det_t(alpha, -t);
    EXPECT_LT(std::abs(got - cplx(want.re.to_double(), want.im.to_double())), 1e-12) << t;
  }
}

TEST(Scan, RationalFlagged) {
  auto s = universal_system(1.0 / 3.0);
  std::vector<double> grid;
  for (int i = 0; i <= 120; ++i) grid.push_back(0.1 * i);
  auto rep = stability_scan(s, grid);
  EXPECT_FALSE(rep.invertible_on_grid);
  EXPECT_NEAR(rep.t_at_min, 3 * M_PI, 1e-6);
  EXPECT_LT(rep.min_det, 1e-12);
  EXPECT_NE(rep.verdict.find("grid singularity"), std::string::npos);
}

TEST(Scan, SqrtTwoInvertible) {
  auto s = universal_system(std::sqrt(2.0));
  std::vector<double> grid;
  for (int i = 0; i <= 1000; ++i) grid.push_back(0.1 * i);
  auto rep = stability_scan(s, grid);
  EXPECT_TRUE(rep.invertible_on_grid);
  EXPECT_GT(rep.min_sigma, 1e-4);
  EXPECT_NEAR(rep.resolution, 0.1, 1e-12);
}

TEST(Resolvent, ZeroForcing) {
  auto s = universal_system(std::sqrt(2.0));
  auto r = resolvent_solve(s, 1.0, [](double) { return VecC(VecC::Zero(2)); });
  EXPECT_EQ(r.wa.norm(), 0.0);
  EXPECT_EQ(r.boundary_residual, 0.0);
  EXPECT_EQ(r.ode_residual, 0.0);
}

TEST(Resolvent, UniversalConstantForcing) {
  auto s = universal_system(std::sqrt(2.0));
  for (double t : {1.0, 10.0, 100.0}) {
    auto r = resolvent_solve(s, t, [](double) { return VecC(VecC::Ones(2)); });
    EXPECT_EQ(r.nodes, 4096u);
    EXPECT_LE(r.boundary_residual, 1e-8);
    EXPECT_LE(r.ode_residual, 1e-8);
  }
}

TEST(Resolvent, TwoPieceConverges) {
  auto s = two_piece();
  auto f = [](double x) {
    VecC v(2);
    v << std::cos(3 * x), cplx(0, x * x);
    return v;
  };
  auto hist = resolvent_convergence(s, 4.0, f, 16, 1024);
  ASSERT_GE(hist.size(), 3u);
  EXPECT_GT(hist.front().ode_residual, hist.back().ode_residual);
  EXPECT_LE(hist.back().ode_residual, 1e-8);
}

TEST(Resolvent, NearSingular) {
  auto s = universal_system(1.0 / 3.0);
  EXPECT_EQ(kind_of([&] { resolvent_solve(s, 3 * M_PI, [](double) { return VecC(VecC::Ones(2)); }); }),
            ErrorKind::SingularBoundaryMatrix);
}

TEST(Resolvent, ScalarClosedForm) {
  const double h = 1.3;
  auto s = scalar_system(h);
  for (double t : {0.5, 2.0, 4.0, 11.0}) {
    FundamentalMatrix fm(s, t);
    double exact = scalar_resolvent_norm(t, h);
    double est = resolvent_norm_estimate(s, fm, 4096);
    EXPECT_NEAR(est, exact, 1e-3 * exact) << t;
    for (const auto& p : default_probes(s, fm)) {
      EXPECT_LE(probe_ratio(s, fm, p.f, 2048), exact * (1 + 1e-9)) << p.name;
    }
  }
}

TEST(CharConstants, ScalarBothSides) {
  const double h = 0.8;
  auto s = scalar_system(h);
  CharOptions o;
  o.upper_estimate = true;
  auto cc = char_constants(s, {0.5, 1.0, 2.0, 3.0, 5.0}, o);
  EXPECT_TRUE(cc.ok());
  for (const auto& r : cc.rows) {
    double R = scalar_resolvent_norm(r.t, h);
    EXPECT_LE(R, cc.Ctilde * (r.inv_norm_T + 1));
    EXPECT_LE(r.inv_norm_T, cc.C * (R + 1));
    ASSERT_TRUE(r.upper_ok.has_value());
  }
  EXPECT_GT(cc.Ctilde, 0);
  EXPECT_GT(cc.C, 0);
  ASSERT_TRUE(cc.structural_B.has_value());
  EXPECT_NEAR(*cc.structural_B, 1.0, 0);
}

TEST(CharConstants, UniversalLowerSide) {
  auto s = universal_system(std::sqrt(2.0));
  auto cc = char_constants(s, {1, 2, 3, 4, 5});
  EXPECT_TRUE(cc.ok());
  EXPECT_NEAR(cc.B, 1.0, 1e-12);
  EXPECT_NEAR(cc.normS, std::pow(2.0, 0.25), 1e-12);
  EXPECT_FALSE(cc.b_growing);
  EXPECT_EQ(cc.warnings.size(), 1u);
}

TEST(CharConstants, GrowthFlag) {
  EXPECT_FALSE(b_growth_flag({1, 1, 1, 1, 1, 1}));
  EXPECT_TRUE(b_growth_flag({1, 1.2, 1.4, 2, 4, 8}));
}

TEST(Config, JsonRoundTrip) {
  nlohmann::json j = nlohmann::json::parse(R"({
    "d": 2, "P0": [["0","0"],["0","0"]], "P1": [["1","0"],["0","1"]],
    "H": {"breaks": ["0", "0.5", "1"], "pieces": [[["1","0"],["0","0.7071067811865475"]], [["2","0"],["0","1e-1"]]]},
    "W": [["0.5","0.5","1","0"],["0.5","0.5","0","1"]], "interval": ["0","1"]})");
  PHSystem s = phs_from_json(j);
  EXPECT_TRUE(validation_errors(s).empty());
  EXPECT_EQ(s.pieces(), 2u);
  EXPECT_EQ(s.H[1](1, 1), 0.1);
  PHSystem r = phs_from_json(to_json(s));
  EXPECT_EQ(r.breaks, s.breaks);
  EXPECT_EQ((r.H[0] - s.H[0]).norm(), 0.0);
  EXPECT_EQ((r.W - s.W).norm(), 0.0);
  j["interval"] = {"0", "2"};
  EXPECT_EQ(kind_of([&] { phs_from_json(j); }), ErrorKind::ParseError);
}
