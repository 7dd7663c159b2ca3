#pragma once

/**
 * @file spectral.hpp
 * @brief The universal 2x2 example
 *
 *     T_t = M diag(e^{it}, e^{i alpha t}) + I,   M = 1/2 [[1,1],[1,1]],
 *     det T_t = 1 + (e^{it} + e^{i alpha t}) / 2,
 *
 * together with h(tau) = |2 + e^{i pi tau} + e^{i pi alpha tau}|,
 * g(t) = h(t/pi)/2, the resolvent proxy ||T_t^{-1}||, certified infima of h
 * and the growth function m(eta) = sup_{|t| <= eta} ||T_t^{-1}||.
 *
 * Evaluation happens in local coordinates. With tau = v + s for an odd v,
 * u the odd integer nearest v alpha and eps = v alpha - u (exact from the
 * rational enclosure of alpha),
 *
 *     e^{i pi tau} = -e^{ia},  a = pi s,
 *     e^{i pi alpha tau} = -e^{ib},  b = pi (eps + alpha s),
 *
 * so det = sin^2(a/2) + sin^2(b/2) - i sin((a+b)/2) cos((a-b)/2) without
 * cancellation even when |det| is far below the working precision.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "contfrac.hpp"
#include "diophantine.hpp"
#include "parallel.hpp"

namespace semiuniform {

/// tau = v + s, with v odd and u, eps describing v alpha = u + eps.
struct LocalFrame {
  BigInt v;
  BigInt u;
  Real eps;
};

struct UniversalSample {
  Real a, b;  // local phases
  Complex det;
  Real det2;  // |det|^2
  Real det_abs;
  Real fro2;  // ||T||_F^2
  Real smax;  // largest singular value of T
  Real dG;  // d/dtau |det|^2
  bool singular = false;  // the det ball contains zero
};

struct BoundaryMatrix2 {
  Real tau;  // t / pi
  std::array<Complex, 4> entries;  // row-major
  Complex det;  // closed form
  Complex det_from_entries;  // T11 T22 - T12 T21
};

namespace detail {

using Dir = Mpfr;  // 64-bit directed-rounding scratch values

inline Dir dir_dn(mpfr_srcptr x) {
  Dir r(kRadiusPrec);
  mpfr_set(r.get(), x, MPFR_RNDD);
  return r;
}
inline Dir dir_up(mpfr_srcptr x) {
  Dir r(kRadiusPrec);
  mpfr_set(r.get(), x, MPFR_RNDU);
  return r;
}
inline Dir dir_d(double x, mpfr_rnd_t rnd) {
  Dir r(kRadiusPrec);
  mpfr_set_d(r.get(), x, rnd);
  return r;
}
inline bool less(const Dir& a, const Dir& b) { return mpfr_less_p(a.get(), b.get()) != 0; }

}  // namespace detail

class UniversalExample {
 public:
  /// `target_bits` is the working precision of the local evaluation.
  explicit UniversalExample(IrrationalSpec alpha, long target_bits = 128)
      : spec_(std::move(alpha)), prec_(static_cast<mpfr_prec_t>(std::max(64L, target_bits + 32))) {
    Enclosure e = enclose_best(spec_, prec_ + 16);
    alpha_ = e.to_real(prec_);
    pi_ = Real::pi(prec_);
    const double al = alpha_.upper_double();
    // |d det/dtau| <= pi (1 + alpha) / 2, |d^2 |det|^2 / dtau^2| <= K, ||dT/dtau|| <= pi max(1, alpha).
    lip_h_ = M_PI * (1 + al);
    lip_det_ = detail::dir_d(M_PI * (1 + al) / 2 * (1 + 1e-15), MPFR_RNDU);
    k2_ = detail::dir_d(M_PI * M_PI * (1 + al * al + 0.5 * (1 - al) * (1 - al)) * (1 + 1e-15) + 1e-300,
                        MPFR_RNDU);
    lip_t_ = detail::dir_d(M_PI * std::max(1.0, al) * (1 + 1e-15), MPFR_RNDU);
  }

  const IrrationalSpec& spec() const { return spec_; }
  mpfr_prec_t prec() const { return prec_; }
  const Real& alpha() const { return alpha_; }
  const Real& pi() const { return pi_; }
  double lipschitz_h() const { return lip_h_; }
  mpfr_srcptr lip_det() const { return lip_det_.get(); }
  mpfr_srcptr second_order() const { return k2_.get(); }
  mpfr_srcptr lip_t() const { return lip_t_.get(); }

  /// Local frame at odd v. The enclosure of alpha is tightened until eps
  /// has a small relative radius, or the source runs out of bits.
  LocalFrame frame(const BigInt& v) const {
    require(v >= 1 && is_odd(v), ErrorKind::InvalidArgument, "frame needs an odd v >= 1");
    long bits = 2 * static_cast<long>(bit_length(v)) + static_cast<long>(prec_);
    const long cap = 64 * static_cast<long>(prec_) + 8 * static_cast<long>(bit_length(v));
    LocalFrame f;
    f.v = v;
    for (;;) {
      Enclosure e = enclose_best(spec_, bits);
      f.u = nearest_odd(Rational(v) * e.center);
      Rational c = Rational(v) * e.center - f.u;
      f.eps = Real::with_radius(c, Rational(v) * e.radius, prec_);
      if (e.exact() || f.eps.relative_radius() < std::ldexp(1.0, -static_cast<int>(prec_ / 2))) break;
      Enclosure e2 = enclose_best(spec_, bits * 2);
      if (e2.radius >= e.radius || bits > cap) break;
      bits *= 2;
    }
    return f;
  }

  /// Frame whose v is the odd integer nearest to an exact tau.
  LocalFrame frame_near(const Rational& tau) const {
    BigInt v = nearest_odd(tau);
    if (v < 1) v = 1;
    return frame(v);
  }

  UniversalSample at(const LocalFrame& f, const Real& s) const {
    UniversalSample x;
    x.a = pi_ * s;
    x.b = pi_ * (f.eps + alpha_ * s);
    Real sa = sin(mul_2exp(x.a, -1));
    Real sb = sin(mul_2exp(x.b, -1));
    Real sa2 = sqr(sa), sb2 = sqr(sb);
    Real re = sa2 + sb2;
    Real im = -(sin(mul_2exp(x.a + x.b, -1)) * cos(mul_2exp(x.a - x.b, -1)));
    x.det = {re, im};
    x.det2 = sqr(re) + sqr(im);
    x.singular = x.det2.contains_zero() || !x.det2.positive();
    x.det_abs = sqrt(abs(x.det2));
    // ||T||_F^2 = 3 - cos a - cos b = 1 + 2 sin^2(a/2) + 2 sin^2(b/2).
    x.fro2 = Real::from_long(1, prec_) + mul_2exp(re, 1);
    Real disc = sqr(x.fro2) - mul_2exp(x.det2, 2);
    Real root = sqrt(abs(disc));
    x.smax = sqrt(mul_2exp(x.fro2 + root, -1));
    Real one_minus_alpha = Real::from_long(1, prec_) - alpha_;
    x.dG = pi_ * (sin(x.a) + alpha_ * sin(x.b) - mul_2exp(one_minus_alpha * sin(x.a - x.b), -1));
    return x;
  }

  /// Entries of T at local coordinates.
  std::array<Complex, 4> entries(const UniversalSample& x) const {
    Real one = Real::from_long(1, prec_);
    Complex ea = expi(x.a), eb = expi(x.b);
    Complex half_a{mul_2exp(ea.re, -1), mul_2exp(ea.im, -1)};
    Complex half_b{mul_2exp(eb.re, -1), mul_2exp(eb.im, -1)};
    Complex one_c{one, Real(prec_)};
    return {one_c - half_a, Complex{-half_b.re, -half_b.im}, Complex{-half_a.re, -half_a.im}, one_c - half_b};
  }

  /// tau = t / pi as a ball, split into a frame and an offset.
  std::pair<LocalFrame, Real> locate(const Real& tau) const {
    Rational tm = tau.mid_q();
    LocalFrame f = frame_near(tm < 0 ? Rational(-tm) : tm);
    Real t = tm < 0 ? -tau : tau;
    Real s = t - Real::from_int(f.v, prec_ + static_cast<mpfr_prec_t>(bit_length(f.v)));
    return {f, Real::from_mpfr(s.mid(), prec_) + Real::with_radius(0, s.rad_q(), prec_)};
  }

  Real tau_of_t(double t) const {
    mpfr_prec_t p = prec_ + 64;
    return Real::from_double(t, p) / Real::pi(p);
  }

 private:
  IrrationalSpec spec_;
  mpfr_prec_t prec_;
  Real alpha_;
  Real pi_;
  double lip_h_ = 0;
  detail::Dir lip_det_{detail::kRadiusPrec}, k2_{detail::kRadiusPrec}, lip_t_{detail::kRadiusPrec};
};

namespace detail {

// h and T are even in t up to conjugation; negative tau folds onto |tau|.
inline std::pair<LocalFrame, Real> locate_tau(const UniversalExample& ue, const Rational& tau) {
  Rational at = abs_q(tau);
  LocalFrame f = ue.frame_near(at);
  Real s = Real::from_rational(at - f.v, ue.prec());
  return {f, s};
}

inline BoundaryMatrix2 boundary_matrix(const UniversalExample& ue, const LocalFrame& f, const Real& s, bool conj_out,
                                       Real tau) {
  UniversalSample x = ue.at(f, s);
  BoundaryMatrix2 m;
  m.tau = std::move(tau);
  m.entries = ue.entries(x);
  m.det = x.det;
  m.det_from_entries = m.entries[0] * m.entries[3] - m.entries[1] * m.entries[2];
  if (conj_out) {
    for (auto& e : m.entries) e = conj(e);
    m.det = conj(m.det);
    m.det_from_entries = conj(m.det_from_entries);
  }
  return m;
}

}  // namespace detail

/// T_{t, alpha} at a real time t (taken as an exact binary value).
inline BoundaryMatrix2 t_matrix(const IrrationalSpec& alpha, double t, long bits = 128) {
  require(std::isfinite(t), ErrorKind::InvalidArgument, "t must be finite");
  UniversalExample ue(alpha, bits + static_cast<long>(std::max(0.0, std::log2(std::fabs(t) + 1))));
  Real tau = ue.tau_of_t(t);
  auto [f, s] = ue.locate(tau);
  return detail::boundary_matrix(ue, f, s, t < 0, tau);
}

/// T at t = pi tau for an exact rational tau.
inline BoundaryMatrix2 t_matrix_tau(const IrrationalSpec& alpha, const Rational& tau, long bits = 128) {
  UniversalExample ue(alpha, bits);
  auto [f, s] = detail::locate_tau(ue, tau);
  return detail::boundary_matrix(ue, f, s, tau < 0, Real::from_rational(tau, ue.prec()));
}

inline Complex det_t(const IrrationalSpec& alpha, double t, long bits = 128) { return t_matrix(alpha, t, bits).det; }
inline Complex det_tau(const IrrationalSpec& alpha, const Rational& tau, long bits = 128) {
  return t_matrix_tau(alpha, tau, bits).det;
}

/// h(tau) = |2 + e^{i pi tau} + e^{i pi alpha tau}| = 2 |det T_{pi tau}|.
inline Real h_eval(const IrrationalSpec& alpha, const Rational& tau, long bits = 128) {
  UniversalExample ue(alpha, bits);
  auto [f, s] = detail::locate_tau(ue, tau);
  return mul_2exp(ue.at(f, s).det_abs, 1);
}
inline Real h_eval(const IrrationalSpec& alpha, double tau, long bits = 128) {
  return h_eval(alpha, Rational(tau), bits);
}

/// g(t) = |1 + (e^{it} + e^{i alpha t}) / 2| = h(t / pi) / 2.
inline Real g_eval(const IrrationalSpec& alpha, double t, long bits = 128) {
  UniversalExample ue(alpha, bits + static_cast<long>(std::max(0.0, std::log2(std::fabs(t) + 1))));
  auto [f, s] = ue.locate(ue.tau_of_t(t));
  return ue.at(f, s).det_abs;
}

namespace detail {

inline void require_regular(const UniversalExample& ue, const UniversalSample& x, const std::string& where) {
  if (!x.singular) return;
  if (ue.spec().is_rational()) fail(ErrorKind::SingularMatrix, "det T contains 0 at " + where);
  fail(ErrorKind::InsufficientPrecision, "det T not separated from 0 at " + where);
}

}  // namespace detail

/// ||T_t^{-1}|| (spectral norm) = sigma_max(T) / |det T|.
inline Real inv_norm(const IrrationalSpec& alpha, double t, long bits = 128) {
  UniversalExample ue(alpha, bits + static_cast<long>(std::max(0.0, std::log2(std::fabs(t) + 1))));
  auto [f, s] = ue.locate(ue.tau_of_t(t));
  UniversalSample x = ue.at(f, s);
  if (x.singular) fail(ErrorKind::SingularMatrix, "det T_t contains 0 at t=" + std::to_string(t));
  return x.smax / x.det_abs;
}

inline Real inv_norm_tau(const IrrationalSpec& alpha, const Rational& tau, long bits = 128) {
  UniversalExample ue(alpha, bits);
  auto [f, s] = detail::locate_tau(ue, tau);
  UniversalSample x = ue.at(f, s);
  if (x.singular) fail(ErrorKind::SingularMatrix, "det T contains 0 at tau=" + tau.get_str());
  return x.smax / x.det_abs;
}

struct CertifiedInf {
  Rational a, b;  // interval in tau = t / pi
  Real lower;  // exact-valued bounds, rounded outward
  Real upper;
  BigInt witness_v;  // witness tau* = v + s
  Real witness_s;
  double lipschitz = 0;  // pi (1 + alpha), the constant used for h
  double min_cell = 0;  // smallest half-width refined to
  std::size_t evaluations = 0;

  double witness_tau() const { return witness_v.get_d() + witness_s.to_double(); }
};

struct InfOptions {
  double tol = 1e-6;  // absolute gap upper - lower
  double rel = 1e-3;  // and relative gap (keeps the lower bound positive)
  std::size_t max_evaluations = 4000000;
  bool seed_candidate = true;  // evaluate tau0 = v - eps/(1+alpha) first
};

namespace detail {

struct Cell {
  std::size_t frame = 0;
  Real c;  // center offset s
  Dir w{kRadiusPrec};  // half width (upper bound)
  Dir key{kRadiusPrec};
};

// Lower bound on |det| over [c - w, c + w] from first and second order data.
inline Dir det_lower_bound(const UniversalExample& ue, const UniversalSample& x, const Cell& cell) {
  Dir w(kRadiusPrec);
  mpfr_add(w.get(), cell.w.get(), cell.c.rad(), MPFR_RNDU);
  // |det(c)| - L w
  Dir lb1 = dir_dn(x.det_abs.lower().get());
  Dir t(kRadiusPrec);
  mpfr_mul(t.get(), ue.lip_det(), w.get(), MPFR_RNDU);
  mpfr_sub(lb1.get(), lb1.get(), t.get(), MPFR_RNDD);
  // |det|^2(c) - |G'(c)| w - K w^2 / 2
  Dir g = dir_dn(x.det2.lower().get());
  Dir gp = dir_up(abs(x.dG).upper().get());
  mpfr_mul(t.get(), gp.get(), w.get(), MPFR_RNDU);
  mpfr_sub(g.get(), g.get(), t.get(), MPFR_RNDD);
  mpfr_sqr(t.get(), w.get(), MPFR_RNDU);
  mpfr_mul(t.get(), t.get(), ue.second_order(), MPFR_RNDU);
  mpfr_div_2ui(t.get(), t.get(), 1, MPFR_RNDU);
  mpfr_sub(g.get(), g.get(), t.get(), MPFR_RNDD);
  Dir lb2(kRadiusPrec);
  if (mpfr_sgn(g.get()) > 0) {
    mpfr_sqrt(lb2.get(), g.get(), MPFR_RNDD);
  }
  Dir out(kRadiusPrec);
  mpfr_max(out.get(), lb1.get(), lb2.get(), MPFR_RNDD);
  if (mpfr_sgn(out.get()) < 0) mpfr_set_zero(out.get(), 1);
  return out;
}

// Upper bound on sigma_max(T) over the cell.
inline Dir smax_upper_bound(const UniversalExample& ue, const UniversalSample& x, const Cell& cell) {
  Dir w(kRadiusPrec);
  mpfr_add(w.get(), cell.w.get(), cell.c.rad(), MPFR_RNDU);
  Dir ub = dir_up(x.smax.upper().get());
  Dir t(kRadiusPrec);
  mpfr_mul(t.get(), ue.lip_t(), w.get(), MPFR_RNDU);
  mpfr_add(ub.get(), ub.get(), t.get(), MPFR_RNDU);
  return ub;
}

// Cells covering [lo, hi] (tau-scale), one frame per odd v.
struct Cover {
  std::vector<LocalFrame> frames;
  std::vector<Cell> cells;
};

inline Cover make_cover(const UniversalExample& ue, const Rational& lo, const Rational& hi) {
  Cover cv;
  auto add = [&](const BigInt& v, const Rational& clo, const Rational& chi) {
    cv.frames.push_back(ue.frame(v));
    Cell c;
    c.frame = cv.frames.size() - 1;
    c.c = Real::from_rational((clo + chi) / 2 - v, ue.prec());
    Rational half = (chi - clo) / 2;
    mpfr_set_q(c.w.get(), half.get_mpq_t(), MPFR_RNDU);
    cv.cells.push_back(std::move(c));
  };
  if (lo == hi) {
    BigInt v = nearest_odd(lo);
    if (v < 1) v = 1;
    add(v, lo, hi);
    return cv;
  }
  // odd v with v - 1 <= lo < v + 1
  for (BigInt v = 2 * floor_q(lo / 2) + 1; Rational(v - 1) < hi; v += 2) {
    add(v, std::max(lo, Rational(v - 1)), std::min(hi, Rational(v + 1)));
  }
  return cv;
}

inline Cell split_child(const Cell& p, int sign, mpfr_prec_t prec) {
  Cell c;
  c.frame = p.frame;
  mpfr_div_2ui(c.w.get(), p.w.get(), 1, MPFR_RNDU);
  Real off = Real::from_mpfr(c.w.get(), prec);
  c.c = sign > 0 ? p.c + off : p.c - off;
  return c;
}

// Tie-break witnesses by smaller tau.
inline bool tau_less(const BigInt& v1, const Real& s1, const BigInt& v2, const Real& s2) {
  if (v1 != v2) return v1 < v2;
  return mpfr_less_p(s1.mid(), s2.mid()) != 0;
}

inline Real bound_value(mpfr_srcptr x, mpfr_prec_t prec) {
  Real r(prec);
  mpfr_set(r.mid_mut(), x, MPFR_RNDN);
  Dir d(kRadiusPrec);
  mpfr_sub(d.get(), r.mid(), x, MPFR_RNDU);
  mpfr_abs(d.get(), d.get(), MPFR_RNDU);
  r.inflate(d.get());
  return r;
}

}  // namespace detail

/// Certified infimum of h over [a, b] (tau-scale), by branch and bound with
/// first- and second-order lower bounds; upper - lower <= min(tol, rel*upper).
inline CertifiedInf inf_h_interval(const UniversalExample& ue, const Rational& a, const Rational& b,
                                   const InfOptions& opt = {}) {
  using namespace detail;
  require(b > a, ErrorKind::InvalidArgument, "inf_h_interval needs b > a");
  require(a >= 0, ErrorKind::InvalidArgument, "inf_h_interval works on tau >= 0 (h is even)");
  require(opt.tol > 0, ErrorKind::InvalidArgument, "tol must be positive");
  const mpfr_prec_t prec = ue.prec();
  Cover cv = make_cover(ue, a, b);

  CertifiedInf out;
  out.a = a;
  out.b = b;
  out.lipschitz = ue.lipschitz_h();
  Dir best_ub(kRadiusPrec);
  mpfr_set_inf(best_ub.get(), 1);
  double min_cell = INFINITY;

  auto consider = [&](std::size_t fi, const Real& s, const UniversalSample& x) {
    ++out.evaluations;
    Dir ub = dir_up(x.det_abs.upper().get());
    const BigInt& v = cv.frames[fi].v;
    if (less(ub, best_ub) ||
        (mpfr_equal_p(ub.get(), best_ub.get()) && tau_less(v, s, out.witness_v, out.witness_s))) {
      best_ub = ub;
      out.witness_v = v;
      out.witness_s = s;
    }
  };

  auto cmp = [](const Cell& x, const Cell& y) { return mpfr_greater_p(x.key.get(), y.key.get()) != 0; };
  std::priority_queue<Cell, std::vector<Cell>, decltype(cmp)> heap(cmp);

  auto push = [&](Cell c) {
    UniversalSample x = ue.at(cv.frames[c.frame], c.c);
    consider(c.frame, c.c, x);
    c.key = det_lower_bound(ue, x, c);
    min_cell = std::min(min_cell, mpfr_get_d(c.w.get(), MPFR_RNDU));
    heap.push(std::move(c));
  };

  if (opt.seed_candidate) {
    Real one = Real::from_long(1, prec);
    for (std::size_t fi = 0; fi < cv.frames.size(); ++fi) {
      // tau0 = v + delta, delta = -eps / (1 + alpha)
      Real delta = -(cv.frames[fi].eps / (one + ue.alpha()));
      Rational t0 = Rational(cv.frames[fi].v) + delta.mid_q();
      if (t0 < a || t0 > b) continue;
      consider(fi, delta, ue.at(cv.frames[fi], delta));
    }
  }
  for (auto& c : cv.cells) push(std::move(c));

  for (;;) {
    require(out.evaluations <= opt.max_evaluations, ErrorKind::InsufficientPrecision,
            "inf_h_interval exceeded its evaluation budget");
    Dir lb(kRadiusPrec);
    if (heap.empty()) {
      lb = best_ub;
    } else {
      lb = heap.top().key;
    }
    // gap <= min(tol, rel * ub), in units of |det| (h = 2 |det|)
    Dir gap(kRadiusPrec), lim(kRadiusPrec), lim2(kRadiusPrec);
    mpfr_sub(gap.get(), best_ub.get(), lb.get(), MPFR_RNDU);
    mpfr_set_d(lim.get(), opt.tol / 2, MPFR_RNDD);
    mpfr_mul_d(lim2.get(), best_ub.get(), opt.rel, MPFR_RNDD);
    mpfr_min(lim.get(), lim.get(), lim2.get(), MPFR_RNDD);
    if (heap.empty() || mpfr_lessequal_p(gap.get(), lim.get())) {
      Dir lo2(kRadiusPrec), hi2(kRadiusPrec);
      mpfr_mul_2ui(lo2.get(), lb.get(), 1, MPFR_RNDD);
      mpfr_mul_2ui(hi2.get(), best_ub.get(), 1, MPFR_RNDU);
      out.lower = bound_value(lo2.get(), prec);
      out.upper = bound_value(hi2.get(), prec);
      out.min_cell = min_cell;
      return out;
    }
    Cell c = heap.top();
    heap.pop();
    require(mpfr_get_exp(c.w.get()) >= -static_cast<mpfr_exp_t>(prec) - 64, ErrorKind::InsufficientPrecision,
            "inf_h_interval refined below the working precision");
    push(split_child(c, -1, prec));
    push(split_child(c, +1, prec));
  }
}

inline CertifiedInf inf_h_interval(const IrrationalSpec& alpha, const Rational& a, const Rational& b,
                                   const InfOptions& opt = {}, long bits = 128) {
  require(b > a, ErrorKind::InvalidArgument, "inf_h_interval needs b > a");
  UniversalExample ue(alpha, bits);
  return inf_h_interval(ue, a, b, opt);
}

struct SupResult {
  Real lower;  // certified lower bound on the sup of ||T^{-1}||
  Real upper;  // certified upper bound
  BigInt witness_v;
  Real witness_s;
  std::size_t evaluations = 0;
};

struct SupOptions {
  double rel = 1e-3;  // stop when upper <= (1 + rel) lower
  std::size_t max_evaluations = 20000000;
};

/// Certified sup of ||T_{pi tau}^{-1}|| over tau in [lo, hi]. `floor_lb` is a
/// known lower bound on the answer from elsewhere (0 if none).
inline SupResult sup_inv_norm(const UniversalExample& ue, const Rational& lo, const Rational& hi,
                              const Real* floor_lb = nullptr, const SupOptions& opt = {}) {
  using namespace detail;
  require(hi >= lo && lo >= 0, ErrorKind::InvalidArgument, "sup_inv_norm needs 0 <= lo <= hi");
  const mpfr_prec_t prec = ue.prec();
  Cover cv = make_cover(ue, lo, hi);

  SupResult out;
  Dir best_lb(kRadiusPrec);
  mpfr_set_zero(best_lb.get(), 1);
  if (floor_lb) best_lb = dir_dn(floor_lb->lower().get());
  bool have_witness = false;

  auto consider = [&](std::size_t fi, const Real& s, const UniversalSample& x) {
    ++out.evaluations;
    if (x.singular) {
      std::string where = "tau = " + cv.frames[fi].v.get_str() + " + " + s.to_string(8);
      if (ue.spec().is_rational()) fail(ErrorKind::SingularMatrix, "det T contains 0 at " + where);
      return;  // no information from this point; its cell keeps splitting
    }
    Real n = x.smax / x.det_abs;
    Dir lb = dir_dn(n.lower().get());
    const BigInt& v = cv.frames[fi].v;
    bool same = mpfr_equal_p(lb.get(), best_lb.get()) != 0;
    if (less(best_lb, lb) || (same && (!have_witness || tau_less(v, s, out.witness_v, out.witness_s)))) {
      best_lb = lb;
      out.witness_v = v;
      out.witness_s = s;
      have_witness = true;
    }
  };

  auto cmp = [](const Cell& x, const Cell& y) { return mpfr_less_p(x.key.get(), y.key.get()) != 0; };
  std::priority_queue<Cell, std::vector<Cell>, decltype(cmp)> heap(cmp);

  auto push = [&](Cell c) {
    UniversalSample x = ue.at(cv.frames[c.frame], c.c);
    consider(c.frame, c.c, x);
    Dir dl = det_lower_bound(ue, x, c);
    if (mpfr_sgn(dl.get()) <= 0) {
      mpfr_set_inf(c.key.get(), 1);
    } else {
      Dir su = smax_upper_bound(ue, x, c);
      mpfr_div(c.key.get(), su.get(), dl.get(), MPFR_RNDU);
    }
    heap.push(std::move(c));
  };

  Real one = Real::from_long(1, prec);
  for (std::size_t fi = 0; fi < cv.frames.size(); ++fi) {
    Real delta = -(cv.frames[fi].eps / (one + ue.alpha()));
    Rational t0 = Rational(cv.frames[fi].v) + delta.mid_q();
    if (t0 < lo || t0 > hi) continue;
    consider(fi, delta, ue.at(cv.frames[fi], delta));
  }
  for (auto& c : cv.cells) {
    if (lo == hi) {
      consider(c.frame, c.c, ue.at(cv.frames[c.frame], c.c));
      continue;
    }
    push(std::move(c));
  }

  for (;;) {
    if (out.evaluations > opt.max_evaluations) {
      fail(ErrorKind::InsufficientPrecision, "sup of ||T^-1|| exceeded its evaluation budget");
    }
    Dir top(kRadiusPrec);
    if (heap.empty()) {
      top = best_lb;
    } else {
      top = heap.top().key;
    }
    Dir lim(kRadiusPrec);
    mpfr_mul_d(lim.get(), best_lb.get(), 1 + opt.rel, MPFR_RNDD);
    if (heap.empty() || mpfr_lessequal_p(top.get(), lim.get())) {
      Dir up(kRadiusPrec);
      mpfr_max(up.get(), top.get(), best_lb.get(), MPFR_RNDU);
      out.lower = bound_value(best_lb.get(), prec);
      out.upper = bound_value(up.get(), prec);
      return out;
    }
    Cell c = heap.top();
    heap.pop();
    if (mpfr_zero_p(c.w.get()) || mpfr_get_exp(c.w.get()) < -static_cast<mpfr_exp_t>(prec) - 64) {
      fail(ue.spec().is_rational() ? ErrorKind::SingularMatrix : ErrorKind::InsufficientPrecision,
           "refinement reached the working precision near tau = " + cv.frames[c.frame].v.get_str());
    }
    push(split_child(c, -1, prec));
    push(split_child(c, +1, prec));
  }
}

struct GrowthPoint {
  double eta = 0;
  Real m_lower;
  Real m_upper;
};

struct GrowthCurve {
  std::vector<GrowthPoint> points;
  std::string alpha;  // description of the source
  double rel_tol = 0;
  long bits = 0;
  std::size_t evaluations = 0;
};

/// m(eta) = sup_{|t| <= eta} ||T_t^{-1}|| bracketed at each eta (endpoint
/// included). Evenness reduces the range to [0, eta].
inline GrowthCurve growth_curve(const IrrationalSpec& alpha, const std::vector<double>& etas, double rel_tol = 1e-3,
                                long bits = 128) {
  require(!etas.empty(), ErrorKind::InvalidArgument, "growth_curve needs at least one eta");
  for (std::size_t i = 0; i < etas.size(); ++i) {
    require(etas[i] >= 0 && std::isfinite(etas[i]), ErrorKind::InvalidArgument, "eta must be finite and >= 0");
    if (i > 0) require(etas[i] > etas[i - 1], ErrorKind::InvalidArgument, "etas must increase");
  }
  const double emax = etas.back();
  UniversalExample ue(alpha, bits + static_cast<long>(std::log2(emax + 2)));
  GrowthCurve gc;
  gc.alpha = alpha.describe();
  gc.rel_tol = rel_tol;
  gc.bits = bits;

  SupOptions so;
  so.rel = rel_tol;
  // tau = 0 first: only t = 0.
  SupResult at0 = sup_inv_norm(ue, Rational(0), Rational(0), nullptr, so);
  Real best_lo = at0.lower, best_hi = at0.upper;
  gc.evaluations += at0.evaluations;
  Rational prev(0);
  for (double eta : etas) {
    Real tau = ue.tau_of_t(eta);
    // Outward: cover up to the upper end of tau.
    Rational hi = tau.upper_q();
    if (hi > prev) {
      SupResult r = sup_inv_norm(ue, prev, hi, &best_lo, so);
      gc.evaluations += r.evaluations;
      if (mpfr_greater_p(r.lower.mid(), best_lo.mid())) best_lo = r.lower;
      if (mpfr_greater_p(r.upper.mid(), best_hi.mid())) best_hi = r.upper;
      prev = hi;
    }
    gc.points.push_back({eta, best_lo, best_hi});
  }
  return gc;
}

struct SandwichRow {
  BigInt v;
  BigInt u;
  Rational dist_lo, dist_hi;
  CertifiedInf inf;
  Real ratio_lo;  // inf_lower / dist_hi^2
  Real ratio_hi;  // inf_upper / dist_lo^2
  Real constant;  // 36 pi^2 / min{(1+alpha)^2, 1}
  bool upper_ok = false;  // ratio_hi <= constant
};

/// 36 pi^2 / min{(1+alpha)^2, 1}.
inline Real sandwich_constant(const Real& alpha) {
  mpfr_prec_t p = alpha.prec();
  Real pi = Real::pi(p);
  Real one = Real::from_long(1, p);
  Real s = sqr(one + alpha);
  Real den = s.upper_double() < 1.0 ? s : one;
  return Real::from_long(36, p) * sqr(pi) / den;
}

/// A lower constant derived by hand from the local expansion of h near a
/// resonance: min{1 - cos(1/16), pi^2 / (64 max{(1+alpha)^2, 1})}.
/// Reported as a proof-trace value, not an asserted bound.
inline double sandwich_trace_lower(double alpha) {
  return std::min(1 - std::cos(1.0 / 16), M_PI * M_PI / (64 * std::max((1 + alpha) * (1 + alpha), 1.0)));
}

inline std::vector<SandwichRow> sandwich_report(const IrrationalSpec& alpha, const std::vector<BigInt>& vs,
                                                const InfOptions& opt = {}, long bits = 128, unsigned jobs = 1) {
  for (const auto& v : vs) require(v >= 1 && is_odd(v), ErrorKind::InvalidArgument, "odd v >= 1 required");
  BigInt vmax = vs.empty() ? BigInt(1) : *std::max_element(vs.begin(), vs.end());
  UniversalExample ue(alpha, bits + static_cast<long>(bit_length(vmax)));
  Real constant = sandwich_constant(ue.alpha());
  std::vector<SandwichRow> rows(vs.size());
  parallel_for(vs.size(), jobs, [&](std::size_t i) {
    const BigInt& v = vs[i];
    SandwichRow& r = rows[i];
    r.v = v;
    OddDistance od = min_odd_dist(alpha, v, static_cast<long>(ue.prec()));
    r.u = od.u;
    r.dist_lo = od.dist_lo;
    r.dist_hi = od.dist_hi;
    r.inf = inf_h_interval(ue, Rational(v - 1), Rational(v + 1), opt);
    const mpfr_prec_t p = ue.prec();
    Real dlo = Real::from_rational(od.dist_lo, p), dhi = Real::from_rational(od.dist_hi, p);
    r.ratio_lo = Real::from_mpfr(r.inf.lower.lower().get(), p) / sqr(Real::from_mpfr(dhi.upper().get(), p));
    if (od.dist_lo > 0) {
      r.ratio_hi = Real::from_mpfr(r.inf.upper.upper().get(), p) / sqr(Real::from_mpfr(dlo.lower().get(), p));
      r.upper_ok = mpfr_lessequal_p(r.ratio_hi.upper().get(), constant.lower().get()) != 0;
    } else {
      r.ratio_hi = Real::from_long(0, p);
      mpfr_set_inf(r.ratio_hi.mid_mut(), 1);
      r.upper_ok = mpfr_zero_p(r.inf.upper.mid()) != 0;
    }
    r.constant = constant;
  });
  return rows;
}

}  // namespace semiuniform
