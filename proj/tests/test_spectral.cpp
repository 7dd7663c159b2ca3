#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <complex>

#include <semiuniform/spectral.hpp>

using namespace semiuniform;
using cd = std::complex<double>;

namespace {

Eigen::Matrix2cd naive_T(double t, double alpha) {
  Eigen::Matrix2cd M;
  M << 0.5, 0.5, 0.5, 0.5;
  Eigen::Matrix2cd D = Eigen::Matrix2cd::Zero();
  D(0, 0) = std::polar(1.0, t);
  D(1, 1) = std::polar(1.0, alpha * t);
  return M * D + Eigen::Matrix2cd::Identity();
}

double naive_inv_norm(double t, double alpha) {
  Eigen::JacobiSVD<Eigen::Matrix2cd> svd(naive_T(t, alpha));
  return 1.0 / svd.singularValues()(1);
}

cd entry(const BoundaryMatrix2& m, int i) { return {m.entries[i].re.to_double(), m.entries[i].im.to_double()}; }

}  // namespace

TEST(TMatrix, AtZero) {
  auto m = t_matrix(IrrationalSpec::sqrt_of(2), 0.0);
  EXPECT_NEAR(std::abs(entry(m, 0) - cd(1.5, 0)), 0, 1e-15);
  EXPECT_NEAR(std::abs(entry(m, 1) - cd(0.5, 0)), 0, 1e-15);
  EXPECT_NEAR(std::abs(entry(m, 2) - cd(0.5, 0)), 0, 1e-15);
  EXPECT_NEAR(std::abs(entry(m, 3) - cd(1.5, 0)), 0, 1e-15);
  EXPECT_NEAR(m.det.re.to_double(), 2.0, 1e-15);
  EXPECT_NEAR(m.det.im.to_double(), 0.0, 1e-15);
}

TEST(TMatrix, MatchesNaiveProduct) {
  const double alpha = std::sqrt(2.0);
  for (double t : {0.3, 1.0, M_PI, 5.5, -2.25, 40.0, -117.0}) {
    auto m = t_matrix(IrrationalSpec::sqrt_of(2), t);
    Eigen::Matrix2cd T = naive_T(t, alpha);
    for (int i = 0; i < 4; ++i) {
      EXPECT_NEAR(std::abs(entry(m, i) - T(i / 2, i % 2)), 0, 1e-12) << "t=" << t << " i=" << i;
    }
    cd det(m.det.re.to_double(), m.det.im.to_double());
    EXPECT_NEAR(std::abs(det - T.determinant()), 0, 1e-12);
    cd det2(m.det_from_entries.re.to_double(), m.det_from_entries.im.to_double());
    EXPECT_NEAR(std::abs(det - det2), 0, 1e-14);
  }
}

TEST(TMatrix, SqrtTwoAtPi) {
  // det = (1 + e^{i pi sqrt 2}) / 2 at t = pi; sin(pi sqrt 2) is negative.
  Complex d = det_t(IrrationalSpec::sqrt_of(2), M_PI);
  cd z = std::polar(1.0, M_PI * std::sqrt(2.0));
  EXPECT_NEAR(z.real(), -0.26625, 1e-5);
  EXPECT_NEAR(z.imag(), -0.96390, 1e-5);
  EXPECT_NEAR(d.re.to_double(), 0.5 + 0.5 * z.real(), 1e-12);
  EXPECT_NEAR(d.im.to_double(), 0.5 * z.imag(), 1e-12);
  double h = h_eval(IrrationalSpec::sqrt_of(2), Rational(1)).to_double();
  EXPECT_NEAR(h, std::abs(1.0 + z), 1e-12);
  EXPECT_NEAR(h, 1.21140, 1e-5);
  EXPECT_NEAR(h / 2, 0.60570, 1e-5);
}

TEST(TMatrix, ThirdAtThreePi) {
  auto m = t_matrix_tau(IrrationalSpec::rational(1, 3), Rational(3));
  EXPECT_NEAR(std::abs(entry(m, 0) - cd(0.5, 0)), 0, 1e-15);
  EXPECT_NEAR(std::abs(entry(m, 1) - cd(-0.5, 0)), 0, 1e-15);
  EXPECT_NEAR(std::abs(entry(m, 2) - cd(-0.5, 0)), 0, 1e-15);
  EXPECT_NEAR(std::abs(entry(m, 3) - cd(0.5, 0)), 0, 1e-15);
  EXPECT_EQ(h_eval(IrrationalSpec::golden(), Rational(0)).to_double(), 4.0);
  EXPECT_EQ(g_eval(IrrationalSpec::golden(), 0.0).to_double(), 2.0);
  EXPECT_NEAR(inv_norm(IrrationalSpec::golden(), 0.0).to_double(), 1.0, 1e-15);
}

TEST(TMatrix, RationalSingularity) {
  // alpha = 1/3: at t = 3 pi both phases are odd multiples of pi.
  auto a = IrrationalSpec::rational(1, 3);
  Real h = h_eval(a, Rational(3));
  EXPECT_TRUE(h.is_exact());
  EXPECT_EQ(h.to_double(), 0.0);
  try {
    inv_norm_tau(a, Rational(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularMatrix);
  }
}

TEST(TMatrix, EvenAndConjugate) {
  auto a = IrrationalSpec::golden();
  for (double t : {0.7, 12.0, 301.5}) {
    Complex p = det_t(a, t), m = det_t(a, -t);
    EXPECT_NEAR(p.re.to_double(), m.re.to_double(), 1e-13);
    EXPECT_NEAR(p.im.to_double(), -m.im.to_double(), 1e-13);
    EXPECT_NEAR(g_eval(a, t).to_double(), g_eval(a, -t).to_double(), 1e-13);
  }
}

TEST(TMatrix, GIsHalfH) {
  auto a = IrrationalSpec::sqrt_of(3);
  for (double tau : {0.25, 1.5, 7.0, 33.125}) {
    double h = h_eval(a, Rational(tau)).to_double();
    double g = g_eval(a, M_PI * tau).to_double();
    EXPECT_NEAR(g, h / 2, 1e-12);
  }
}

TEST(InvNorm, MatchesSvd) {
  const double alpha = std::sqrt(2.0);
  for (double t : {0.0, 0.5, M_PI, 10.0, 100.0, -3.0}) {
    double got = inv_norm(IrrationalSpec::sqrt_of(2), t).to_double();
    EXPECT_NEAR(got, naive_inv_norm(t, alpha), 1e-10 * got) << t;
  }
}

TEST(InvNorm, NormIdentities) {
  // ||T^{-1}|| >= 1 / ||T|| and ||T^{-1}|| <= ||T||_F / |det|.
  for (double t : {0.1, 2.0, 9.0}) {
    Eigen::Matrix2cd T = naive_T(t, std::sqrt(5.0));
    double inv = inv_norm(IrrationalSpec::sqrt_of(5), t).to_double();
    EXPECT_GE(inv * 1.0000001, 1.0 / T.operatorNorm());
    EXPECT_LE(inv, T.norm() / std::abs(T.determinant()) * 1.0000001);
  }
}

TEST(InfH, Brackets) {
  auto a = IrrationalSpec::sqrt_of(2);
  InfOptions o;
  o.tol = 1e-8;
  CertifiedInf r = inf_h_interval(a, Rational(0), Rational(2), o);
  EXPECT_LE(r.lower.upper_double(), r.upper.lower_double() + 1e-8 + 1e-15);
  EXPECT_LE(r.upper.to_double() - r.lower.to_double(), 1e-8);
  // brute force oracle on a fine grid
  double best = 1e9, arg = 0;
  for (int i = 0; i <= 200000; ++i) {
    double tau = 2.0 * i / 200000;
    double h = std::abs(2.0 + std::polar(1.0, M_PI * tau) + std::polar(1.0, M_PI * std::sqrt(2.0) * tau));
    if (h < best) best = h, arg = tau;
  }
  EXPECT_LE(r.lower.to_double(), best);
  EXPECT_GE(r.upper.to_double(), best - 1e-4);
  EXPECT_NEAR(r.witness_tau(), arg, 1e-3);
  // the shifted candidate 1 - (sqrt2 - 1)/(1 + sqrt2) is close but not the minimizer
  EXPECT_NEAR(r.witness_tau(), 0.8284, 1e-2);
  EXPECT_NEAR(r.lipschitz, M_PI * (1 + std::sqrt(2.0)), 1e-12);
}

TEST(InfH, RationalZero) {
  auto r = inf_h_interval(IrrationalSpec::rational(1, 3), Rational(2), Rational(4));
  EXPECT_EQ(r.lower.to_double(), 0.0);
  EXPECT_EQ(r.upper.to_double(), 0.0);
  EXPECT_NEAR(r.witness_tau(), 3.0, 0);
}

TEST(InfH, RejectsEmpty) {
  EXPECT_THROW(inf_h_interval(IrrationalSpec::sqrt_of(2), Rational(3), Rational(3)), Error);
  EXPECT_THROW(inf_h_interval(IrrationalSpec::sqrt_of(2), Rational(3), Rational(1)), Error);
}

TEST(InfH, TinyValuesAtLargeV) {
  // v = 985 is an odd/odd denominator for sqrt 2 (p = 1393): h is small near tau = 985.
  auto a = IrrationalSpec::sqrt_of(2);
  InfOptions o;
  o.tol = 1e-12;
  o.rel = 1e-6;
  auto r = inf_h_interval(a, Rational(984), Rational(986), o);
  ASSERT_GT(r.lower.to_double(), 0);
  double eps = std::fabs(985 * std::sqrt(2.0) - 1393);
  // h ~ pi^2 ... second order: compare with the odd distance squared scale
  EXPECT_LT(r.upper.to_double(), 40 * eps * eps);
  EXPECT_GT(r.lower.to_double(), 0.01 * eps * eps);
  EXPECT_LE(r.upper.to_double() - r.lower.to_double(), 1e-6 * r.upper.to_double() * 1.000001);
}

TEST(Growth, RationalRaises) {
  try {
    growth_curve(IrrationalSpec::rational(1, 3), {10.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularMatrix);
  }
}

TEST(Growth, MonotoneAndBracketsGrid) {
  auto a = IrrationalSpec::sqrt_of(2);
  std::vector<double> etas = {0.0, 1.0, 3.0, 10.0, 30.0};
  auto gc = growth_curve(a, etas, 1e-3);
  ASSERT_EQ(gc.points.size(), etas.size());
  EXPECT_NEAR(gc.points[0].m_lower.to_double(), 1.0, 1e-12);
  double prev = 0;
  for (std::size_t i = 0; i < etas.size(); ++i) {
    const auto& p = gc.points[i];
    EXPECT_LE(p.m_lower.to_double(), p.m_upper.to_double());
    EXPECT_LE(p.m_upper.to_double(), p.m_lower.to_double() * (1 + 1e-3) * 1.000001);
    EXPECT_GE(p.m_lower.to_double(), prev);
    prev = p.m_lower.to_double();
    double grid = 0;
    for (int k = 0; k <= 20000; ++k) grid = std::max(grid, naive_inv_norm(etas[i] * k / 20000, std::sqrt(2.0)));
    EXPECT_GE(p.m_upper.to_double() * (1 + 1e-9), grid) << etas[i];
  }
}

TEST(Sandwich, UpperHoldsForSqrtTwo) {
  std::vector<BigInt> vs = {1, 5, 29, 169};
  auto rows = sandwich_report(IrrationalSpec::sqrt_of(2), vs, {}, 128, 2);
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.upper_ok) << r.v.get_str();
    EXPECT_LE(r.ratio_lo.to_double(), r.ratio_hi.to_double());
    EXPECT_GT(r.ratio_lo.to_double(), sandwich_trace_lower(std::sqrt(2.0)) * 0.5);
  }
  EXPECT_EQ(rows[1].u, 7);
  EXPECT_EQ(rows[2].u, 41);
}
