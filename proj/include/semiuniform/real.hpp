#pragma once

/**
 * @file real.hpp
 * @brief Midpoint-radius ("ball") real arithmetic on top of MPFR.
 *
 * A Real stores a midpoint m at a working precision and a radius r kept at
 * 64 bits and always rounded upward, so that the exact quantity it stands
 * for lies in [m - r, m + r]. Every operation adds its own rounding error to
 * the radius; no operation ever shrinks the enclosure it was handed.
 *
 * Exponent range is MPFR's, so radii like 2^-30000000 are representable.
 */

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "error.hpp"

namespace semiuniform {

using BigInt = mpz_class;
using Rational = mpq_class;

inline std::size_t bit_length(const BigInt& z) {
  return z == 0 ? 0 : mpz_sizeinbase(z.get_mpz_t(), 2);
}
inline bool is_odd(const BigInt& z) { return mpz_odd_p(z.get_mpz_t()) != 0; }
inline bool is_even(const BigInt& z) { return !is_odd(z); }

inline BigInt floor_q(const Rational& q) {
  BigInt r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}
inline BigInt ceil_q(const Rational& q) {
  BigInt r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}
inline Rational pow2_q(long e) {
  Rational r(1);
  if (e >= 0) {
    mpz_mul_2exp(r.get_num_mpz_t(), r.get_num_mpz_t(), static_cast<mp_bitcnt_t>(e));
  } else {
    mpz_mul_2exp(r.get_den_mpz_t(), r.get_den_mpz_t(), static_cast<mp_bitcnt_t>(-e));
  }
  r.canonicalize();
  return r;
}
inline Rational abs_q(const Rational& q) { return q < 0 ? Rational(-q) : q; }

namespace detail {

constexpr mpfr_prec_t kRadiusPrec = 64;

/// RAII owner of one mpfr_t.
class Mpfr {
 public:
  explicit Mpfr(mpfr_prec_t prec) {
    mpfr_init2(v_, prec);
    mpfr_set_zero(v_, 1);
  }
  Mpfr(const Mpfr& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Mpfr(Mpfr&& o) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, o.v_);
  }
  Mpfr& operator=(const Mpfr& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  Mpfr& operator=(Mpfr&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Mpfr() { mpfr_clear(v_); }

  mpfr_ptr get() noexcept { return v_; }
  mpfr_srcptr get() const noexcept { return v_; }

 private:
  mpfr_t v_;
};

// |x| rounded up into a radius-precision temporary.
inline Mpfr abs_up(mpfr_srcptr x) {
  Mpfr u(kRadiusPrec);
  mpfr_abs(u.get(), x, MPFR_RNDU);
  return u;
}

inline Mpfr abs_down(mpfr_srcptr x) {
  Mpfr u(kRadiusPrec);
  if (mpfr_sgn(x) >= 0) {
    mpfr_set(u.get(), x, MPFR_RNDD);
  } else {
    mpfr_neg(u.get(), x, MPFR_RNDD);
  }
  return u;
}

}  // namespace detail

class Real {
 public:
  explicit Real(mpfr_prec_t prec = 128) : mid_(prec), rad_(detail::kRadiusPrec) {}

  static Real from_int(const BigInt& z, mpfr_prec_t prec) {
    Real r(prec);
    int t = mpfr_set_z(r.mid_.get(), z.get_mpz_t(), MPFR_RNDN);
    r.add_rounding(t);
    return r;
  }
  static Real from_long(long v, mpfr_prec_t prec) {
    Real r(prec);
    int t = mpfr_set_si(r.mid_.get(), v, MPFR_RNDN);
    r.add_rounding(t);
    return r;
  }
  static Real from_rational(const Rational& q, mpfr_prec_t prec) {
    Real r(prec);
    int t = mpfr_set_q(r.mid_.get(), q.get_mpq_t(), MPFR_RNDN);
    r.add_rounding(t);
    return r;
  }
  /// The double is taken as an exact binary value.
  static Real from_double(double v, mpfr_prec_t prec) {
    Real r(prec);
    int t = mpfr_set_d(r.mid_.get(), v, MPFR_RNDN);
    r.add_rounding(t);
    return r;
  }
  static Real from_mpfr(mpfr_srcptr x, mpfr_prec_t prec) {
    Real r(prec);
    int t = mpfr_set(r.mid_.get(), x, MPFR_RNDN);
    r.add_rounding(t);
    return r;
  }
  static Real with_radius(const Rational& center, const Rational& radius, mpfr_prec_t prec) {
    Real r = from_rational(center, prec);
    detail::Mpfr rq(detail::kRadiusPrec);
    mpfr_set_q(rq.get(), radius.get_mpq_t(), MPFR_RNDU);
    mpfr_abs(rq.get(), rq.get(), MPFR_RNDU);
    mpfr_add(r.rad_.get(), r.rad_.get(), rq.get(), MPFR_RNDU);
    return r;
  }
  static Real pi(mpfr_prec_t prec) {
    Real r(prec);
    int t = mpfr_const_pi(r.mid_.get(), MPFR_RNDN);
    r.add_rounding(t);
    return r;
  }

  mpfr_prec_t prec() const { return mpfr_get_prec(mid_.get()); }
  mpfr_srcptr mid() const { return mid_.get(); }
  mpfr_srcptr rad() const { return rad_.get(); }
  bool is_exact() const { return mpfr_zero_p(rad_.get()) != 0; }

  /// Widen the radius by a non-negative amount.
  void inflate(mpfr_srcptr extra) { mpfr_add(rad_.get(), rad_.get(), extra, MPFR_RNDU); }
  void inflate(double extra) {
    detail::Mpfr e(detail::kRadiusPrec);
    mpfr_set_d(e.get(), std::fabs(extra), MPFR_RNDU);
    inflate(e.get());
  }

  detail::Mpfr lower() const {
    detail::Mpfr lo(prec() + 8);
    mpfr_sub(lo.get(), mid_.get(), rad_.get(), MPFR_RNDD);
    return lo;
  }
  detail::Mpfr upper() const {
    detail::Mpfr hi(prec() + 8);
    mpfr_add(hi.get(), mid_.get(), rad_.get(), MPFR_RNDU);
    return hi;
  }
  Rational lower_q() const { return to_q(lower().get()); }
  Rational upper_q() const { return to_q(upper().get()); }
  Rational mid_q() const { return to_q(mid_.get()); }
  Rational rad_q() const { return to_q(rad_.get()); }

  bool contains_zero() const { return !positive() && !negative(); }
  bool positive() const { return mpfr_sgn(lower().get()) > 0; }
  bool negative() const { return mpfr_sgn(upper().get()) < 0; }

  double to_double() const { return mpfr_get_d(mid_.get(), MPFR_RNDN); }
  double lower_double() const { return mpfr_get_d(lower().get(), MPFR_RNDD); }
  double upper_double() const { return mpfr_get_d(upper().get(), MPFR_RNDU); }
  double rad_double() const { return mpfr_get_d(rad_.get(), MPFR_RNDU); }

  /// floor(log2(radius)); a large negative sentinel for exact values.
  long log2_radius() const {
    if (is_exact()) return -(1L << 40);
    return static_cast<long>(mpfr_get_exp(rad_.get())) - 1;
  }

  /// Relative radius r/|m| as a double (infinity if the ball touches zero).
  double relative_radius() const {
    if (is_exact()) return 0.0;
    if (contains_zero()) return INFINITY;
    detail::Mpfr q(detail::kRadiusPrec);
    detail::Mpfr m = detail::abs_down(mid_.get());
    mpfr_div(q.get(), rad_.get(), m.get(), MPFR_RNDU);
    return mpfr_get_d(q.get(), MPFR_RNDU);
  }

  /// Certified ceiling, if the ball does not straddle an integer boundary.
  std::optional<BigInt> certain_ceil() const {
    BigInt lo, hi;
    mpfr_get_z(lo.get_mpz_t(), lower().get(), MPFR_RNDU);
    mpfr_get_z(hi.get_mpz_t(), upper().get(), MPFR_RNDU);
    if (lo != hi) return std::nullopt;
    return lo;
  }
  std::optional<BigInt> certain_floor() const {
    BigInt lo, hi;
    mpfr_get_z(lo.get_mpz_t(), lower().get(), MPFR_RNDD);
    mpfr_get_z(hi.get_mpz_t(), upper().get(), MPFR_RNDD);
    if (lo != hi) return std::nullopt;
    return lo;
  }

  /// "mid +/- rad" in scientific notation.
  std::string to_string(int digits = 17) const {
    return format(mid_.get(), digits) + " +/- " + format(rad_.get(), 3);
  }
  /// Midpoint only, scientific notation.
  std::string mid_string(int digits = 17) const { return format(mid_.get(), digits); }

  /// Decimal strings rounded outward, for certified output.
  std::string lower_string(int digits = 12) const { return format_dir(lower().get(), digits, 'D'); }
  std::string upper_string(int digits = 12) const { return format_dir(upper().get(), digits, 'U'); }

  static std::string format_dir(mpfr_srcptr x, int digits, char dir) {
    char* s = nullptr;
    if (dir == 'D') {
      mpfr_asprintf(&s, "%.*RDe", std::max(1, digits - 1), x);
    } else {
      mpfr_asprintf(&s, "%.*RUe", std::max(1, digits - 1), x);
    }
    std::string out(s);
    mpfr_free_str(s);
    return out;
  }

  static std::string format(mpfr_srcptr x, int digits) {
    char* s = nullptr;
    mpfr_asprintf(&s, "%.*Re", std::max(1, digits - 1), x);
    std::string out(s);
    mpfr_free_str(s);
    return out;
  }

  // Internal mutators used by the free-function operations.
  mpfr_ptr mid_mut() { return mid_.get(); }
  mpfr_ptr rad_mut() { return rad_.get(); }

  /// Add one ulp of the midpoint when the last midpoint operation was inexact.
  void add_rounding(int ternary) {
    if (ternary == 0) return;
    if (mpfr_zero_p(mid_.get()) || !mpfr_regular_p(mid_.get())) {
      detail::Mpfr tiny(detail::kRadiusPrec);
      mpfr_set_ui_2exp(tiny.get(), 1, mpfr_get_emin(), MPFR_RNDU);
      inflate(tiny.get());
      return;
    }
    detail::Mpfr ulp(detail::kRadiusPrec);
    mpfr_set_ui_2exp(ulp.get(), 1, mpfr_get_exp(mid_.get()) - prec(), MPFR_RNDU);
    inflate(ulp.get());
  }

 private:
  static Rational to_q(mpfr_srcptr x) {
    Rational q;
    mpfr_get_q(q.get_mpq_t(), x);
    return q;
  }

  detail::Mpfr mid_;
  detail::Mpfr rad_;
};

inline mpfr_prec_t max_prec(const Real& a, const Real& b) { return std::max(a.prec(), b.prec()); }

inline Real operator-(const Real& a) {
  Real r(a.prec());
  mpfr_neg(r.mid_mut(), a.mid(), MPFR_RNDN);
  mpfr_set(r.rad_mut(), a.rad(), MPFR_RNDU);
  return r;
}

inline Real operator+(const Real& a, const Real& b) {
  Real r(max_prec(a, b));
  int t = mpfr_add(r.mid_mut(), a.mid(), b.mid(), MPFR_RNDN);
  mpfr_add(r.rad_mut(), a.rad(), b.rad(), MPFR_RNDU);
  r.add_rounding(t);
  return r;
}

inline Real operator-(const Real& a, const Real& b) {
  Real r(max_prec(a, b));
  int t = mpfr_sub(r.mid_mut(), a.mid(), b.mid(), MPFR_RNDN);
  mpfr_add(r.rad_mut(), a.rad(), b.rad(), MPFR_RNDU);
  r.add_rounding(t);
  return r;
}

inline Real operator*(const Real& a, const Real& b) {
  Real r(max_prec(a, b));
  int t = mpfr_mul(r.mid_mut(), a.mid(), b.mid(), MPFR_RNDN);
  detail::Mpfr ma = detail::abs_up(a.mid());
  detail::Mpfr mb = detail::abs_up(b.mid());
  detail::Mpfr x(detail::kRadiusPrec);
  mpfr_mul(x.get(), ma.get(), b.rad(), MPFR_RNDU);
  r.inflate(x.get());
  mpfr_mul(x.get(), mb.get(), a.rad(), MPFR_RNDU);
  r.inflate(x.get());
  mpfr_mul(x.get(), a.rad(), b.rad(), MPFR_RNDU);
  r.inflate(x.get());
  r.add_rounding(t);
  return r;
}

inline Real operator/(const Real& a, const Real& b) {
  detail::Mpfr mb_lo = detail::abs_down(b.mid());
  detail::Mpfr den(detail::kRadiusPrec);
  mpfr_sub(den.get(), mb_lo.get(), b.rad(), MPFR_RNDD);
  require(mpfr_sgn(den.get()) > 0, ErrorKind::InsufficientPrecision, "division by a ball containing zero");
  Real r(max_prec(a, b));
  int t = mpfr_div(r.mid_mut(), a.mid(), b.mid(), MPFR_RNDN);
  if (!a.is_exact() || !b.is_exact()) {
    detail::Mpfr ma = detail::abs_up(a.mid());
    detail::Mpfr mb = detail::abs_up(b.mid());
    detail::Mpfr num(detail::kRadiusPrec), x(detail::kRadiusPrec);
    mpfr_mul(num.get(), ma.get(), b.rad(), MPFR_RNDU);
    mpfr_mul(x.get(), mb.get(), a.rad(), MPFR_RNDU);
    mpfr_add(num.get(), num.get(), x.get(), MPFR_RNDU);
    mpfr_mul(x.get(), mb_lo.get(), den.get(), MPFR_RNDD);
    mpfr_div(num.get(), num.get(), x.get(), MPFR_RNDU);
    r.inflate(num.get());
  }
  r.add_rounding(t);
  return r;
}

inline Real& operator+=(Real& a, const Real& b) { return a = a + b; }
inline Real& operator-=(Real& a, const Real& b) { return a = a - b; }
inline Real& operator*=(Real& a, const Real& b) { return a = a * b; }

inline Real mul_2exp(const Real& a, long e) {
  Real r(a.prec());
  mpfr_mul_2si(r.mid_mut(), a.mid(), e, MPFR_RNDN);
  mpfr_mul_2si(r.rad_mut(), a.rad(), e, MPFR_RNDU);
  return r;
}

inline Real sqr(const Real& a) {
  Real r(a.prec());
  int t = mpfr_sqr(r.mid_mut(), a.mid(), MPFR_RNDN);
  detail::Mpfr ma = detail::abs_up(a.mid());
  detail::Mpfr x(detail::kRadiusPrec);
  mpfr_mul(x.get(), ma.get(), a.rad(), MPFR_RNDU);
  mpfr_mul_2ui(x.get(), x.get(), 1, MPFR_RNDU);
  r.inflate(x.get());
  mpfr_sqr(x.get(), a.rad(), MPFR_RNDU);
  r.inflate(x.get());
  r.add_rounding(t);
  return r;
}

inline Real abs(const Real& a) {
  if (!a.contains_zero()) {
    return mpfr_sgn(a.mid()) < 0 ? -a : a;
  }
  // Ball touches zero: result is [0, |m| + r].
  detail::Mpfr hi = a.upper();
  detail::Mpfr lo = a.lower();
  detail::Mpfr top(a.prec() + 8);
  mpfr_neg(lo.get(), lo.get(), MPFR_RNDU);
  mpfr_max(top.get(), hi.get(), lo.get(), MPFR_RNDU);
  Real r(a.prec());
  int t = mpfr_div_2ui(r.mid_mut(), top.get(), 1, MPFR_RNDN);
  mpfr_div_2ui(r.rad_mut(), top.get(), 1, MPFR_RNDU);
  r.add_rounding(t);
  return r;
}

inline Real sqrt(const Real& a) {
  require(mpfr_sgn(a.upper().get()) >= 0, ErrorKind::InvalidArgument, "sqrt of a negative ball");
  detail::Mpfr lo = a.lower();
  if (mpfr_sgn(lo.get()) <= 0) {
    detail::Mpfr top(a.prec() + 8);
    mpfr_sqrt(top.get(), a.upper().get(), MPFR_RNDU);
    Real r(a.prec());
    int t = mpfr_div_2ui(r.mid_mut(), top.get(), 1, MPFR_RNDN);
    mpfr_div_2ui(r.rad_mut(), top.get(), 1, MPFR_RNDU);
    r.add_rounding(t);
    return r;
  }
  Real r(a.prec());
  int t = mpfr_sqrt(r.mid_mut(), a.mid(), MPFR_RNDN);
  if (!a.is_exact()) {
    // |sqrt(x) - sqrt(m)| <= r / sqrt(m - r)
    detail::Mpfr s(detail::kRadiusPrec);
    mpfr_set(s.get(), lo.get(), MPFR_RNDD);
    mpfr_sqrt(s.get(), s.get(), MPFR_RNDD);
    detail::Mpfr x(detail::kRadiusPrec);
    mpfr_div(x.get(), a.rad(), s.get(), MPFR_RNDU);
    r.inflate(x.get());
  }
  r.add_rounding(t);
  return r;
}

inline Real sin(const Real& a) {
  Real r(a.prec());
  int t = mpfr_sin(r.mid_mut(), a.mid(), MPFR_RNDN);
  mpfr_set(r.rad_mut(), a.rad(), MPFR_RNDU);
  r.add_rounding(t);
  return r;
}

inline Real cos(const Real& a) {
  Real r(a.prec());
  int t = mpfr_cos(r.mid_mut(), a.mid(), MPFR_RNDN);
  mpfr_set(r.rad_mut(), a.rad(), MPFR_RNDU);
  r.add_rounding(t);
  return r;
}

inline Real exp(const Real& a) {
  Real r(a.prec());
  int t = mpfr_exp(r.mid_mut(), a.mid(), MPFR_RNDN);
  require(mpfr_number_p(r.mid()) != 0, ErrorKind::ExpOverflow, "exp overflow");
  if (!a.is_exact()) {
    // exp(m + d) - exp(m) <= exp(m) * expm1(r)
    detail::Mpfr em(detail::kRadiusPrec), x(detail::kRadiusPrec);
    mpfr_exp(em.get(), a.mid(), MPFR_RNDU);
    mpfr_expm1(x.get(), a.rad(), MPFR_RNDU);
    mpfr_mul(x.get(), x.get(), em.get(), MPFR_RNDU);
    r.inflate(x.get());
  }
  r.add_rounding(t);
  return r;
}

inline Real log(const Real& a) {
  detail::Mpfr lo = a.lower();
  require(mpfr_sgn(lo.get()) > 0, ErrorKind::InsufficientPrecision, "log of a ball touching zero");
  Real r(a.prec());
  int t = mpfr_log(r.mid_mut(), a.mid(), MPFR_RNDN);
  if (!a.is_exact()) {
    // |log x - log m| <= r / (m - r)
    detail::Mpfr x(detail::kRadiusPrec), d(detail::kRadiusPrec);
    mpfr_set(d.get(), lo.get(), MPFR_RNDD);
    mpfr_div(x.get(), a.rad(), d.get(), MPFR_RNDU);
    r.inflate(x.get());
  }
  r.add_rounding(t);
  return r;
}

/// x^y for a positive ball x and exact exponent y.
inline Real pow(const Real& x, const Real& y) { return exp(y * log(x)); }

inline Real hypot(const Real& a, const Real& b) {
  Real r(max_prec(a, b));
  int t = mpfr_hypot(r.mid_mut(), a.mid(), b.mid(), MPFR_RNDN);
  mpfr_add(r.rad_mut(), a.rad(), b.rad(), MPFR_RNDU);
  r.add_rounding(t);
  return r;
}

inline Real min(const Real& a, const Real& b) {
  // Hull of the pointwise minimum.
  detail::Mpfr lo(max_prec(a, b) + 8), hi(max_prec(a, b) + 8);
  mpfr_min(lo.get(), a.lower().get(), b.lower().get(), MPFR_RNDD);
  mpfr_min(hi.get(), a.upper().get(), b.upper().get(), MPFR_RNDU);
  Real r(max_prec(a, b));
  int t = mpfr_add(r.mid_mut(), lo.get(), hi.get(), MPFR_RNDN);
  mpfr_div_2ui(r.mid_mut(), r.mid_mut(), 1, MPFR_RNDN);
  detail::Mpfr w(detail::kRadiusPrec);
  mpfr_sub(w.get(), hi.get(), lo.get(), MPFR_RNDU);
  mpfr_div_2ui(w.get(), w.get(), 1, MPFR_RNDU);
  r.inflate(w.get());
  r.add_rounding(t);
  return r;
}

/// Certainly a < b.
inline bool certainly_less(const Real& a, const Real& b) {
  return mpfr_less_p(a.upper().get(), b.lower().get()) != 0;
}

struct Complex {
  Real re;
  Real im;
};

inline Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
inline Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }
inline Complex operator*(const Complex& a, const Complex& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline Real abs(const Complex& z) { return hypot(z.re, z.im); }
inline Real norm2(const Complex& z) { return sqr(z.re) + sqr(z.im); }
inline Complex conj(const Complex& z) { return {z.re, -z.im}; }
inline Complex expi(const Real& x) { return {cos(x), sin(x)}; }

}  // namespace semiuniform
