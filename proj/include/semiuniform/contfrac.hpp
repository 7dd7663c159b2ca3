#pragma once

/**
 * @file contfrac.hpp
 * @brief Exact continued fractions: expansion, convergents, rational
 * enclosures and the classical convergent inequalities.
 *
 * An IrrationalSpec is never turned into a float. Downstream code asks for a
 * rational enclosure (center, radius) or a Real ball at a requested number of
 * bits, and every quotient is either exact or refused.
 */

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "real.hpp"

namespace semiuniform {

/// (p + sqrt(D)) / q with D a positive non-square.
struct QuadraticSurd {
  BigInt D, p, q;
};

/// [a_0; a_1, ..., a_k], a finite (hence rational) continued fraction.
struct ExplicitQuotients {
  std::vector<BigInt> a;
};

/// Quotients produced by a named rule. The rule has already been run up to
/// its budget; `prefix` holds every certain quotient and `next_log2_lower`
/// is a certified k with a_{N+1} >= 2^k for the first quotient not stored.
struct RuleQuotients {
  std::string name;
  nlohmann::json params;
  std::vector<BigInt> prefix;
  long next_log2_lower = 0;
};

/// A decimal string whose value is within 2^-bits of the number meant.
struct DecimalLiteral {
  std::string digits;
  long bits = 0;
};

/// A rational ball [center - radius, center + radius].
struct Enclosure {
  Rational center;
  Rational radius;

  Rational lo() const { return center - radius; }
  Rational hi() const { return center + radius; }
  bool exact() const { return radius == 0; }

  Real to_real(mpfr_prec_t prec) const { return Real::with_radius(center, radius, prec); }
};

namespace detail {

inline BigInt isqrt(const BigInt& n) {
  BigInt r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

inline bool is_square(const BigInt& n) { return mpz_perfect_square_p(n.get_mpz_t()) != 0; }

inline Rational parse_decimal(const std::string& s) {
  require(!s.empty(), ErrorKind::ParseError, "empty decimal literal");
  BigInt num = 0;
  long frac_digits = 0;
  bool seen_dot = false;
  bool any_digit = false;
  for (char c : s) {
    if (c == '.') {
      require(!seen_dot, ErrorKind::ParseError, "two decimal points in '" + s + "'");
      seen_dot = true;
      continue;
    }
    require(std::isdigit(static_cast<unsigned char>(c)) != 0, ErrorKind::ParseError,
            "bad character in decimal literal '" + s + "'");
    num = num * 10 + (c - '0');
    any_digit = true;
    if (seen_dot) ++frac_digits;
  }
  require(any_digit, ErrorKind::ParseError, "no digits in '" + s + "'");
  BigInt den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, static_cast<unsigned long>(frac_digits));
  Rational q(num, den);
  q.canonicalize();
  return q;
}

// Canonical form: a trailing 1 (beyond a_0) is folded into its predecessor.
inline std::vector<BigInt> normalize_quotients(std::vector<BigInt> a) {
  while (a.size() >= 2 && a.back() == 1) {
    a.pop_back();
    a.back() += 1;
  }
  return a;
}

}  // namespace detail

class IrrationalSpec {
 public:
  using Variant = std::variant<QuadraticSurd, ExplicitQuotients, RuleQuotients, DecimalLiteral>;

  IrrationalSpec() : v_(ExplicitQuotients{{BigInt(1)}}) {}

  static IrrationalSpec surd(const BigInt& D, const BigInt& p, const BigInt& q) {
    require(D > 0, ErrorKind::InvalidArgument, "surd needs D > 0");
    require(!detail::is_square(D), ErrorKind::InvalidArgument, "surd needs non-square D");
    require(q != 0, ErrorKind::InvalidArgument, "surd needs q != 0");
    bool positive = (q > 0) ? (p >= 0 || p * p < D) : (p < 0 && p * p > D);
    require(positive, ErrorKind::InvalidArgument, "surd value must be positive");
    return IrrationalSpec(QuadraticSurd{D, p, q});
  }
  static IrrationalSpec sqrt_of(long D) { return surd(D, 0, 1); }
  static IrrationalSpec golden() { return surd(5, 1, 2); }

  static IrrationalSpec quotients(std::vector<BigInt> a) {
    require(!a.empty(), ErrorKind::InvalidArgument, "empty quotient list");
    require(a[0] >= 0, ErrorKind::InvalidArgument, "a_0 must be >= 0 for a positive value");
    for (std::size_t i = 1; i < a.size(); ++i) {
      require(a[i] >= 1, ErrorKind::InvalidArgument, "a_n must be >= 1 for n >= 1");
    }
    a = detail::normalize_quotients(std::move(a));
    require(!(a.size() == 1 && a[0] == 0), ErrorKind::InvalidArgument, "value must be positive");
    return IrrationalSpec(ExplicitQuotients{std::move(a)});
  }

  /// The positive rational p/q, stored through its finite expansion.
  static IrrationalSpec rational(const BigInt& p, const BigInt& q) {
    require(q > 0 && p > 0, ErrorKind::InvalidArgument, "rational needs p, q > 0");
    std::vector<BigInt> a;
    BigInt n = p, d = q;
    while (d != 0) {
      BigInt r;
      mpz_fdiv_qr(a.emplace_back().get_mpz_t(), r.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
      n = d;
      d = r;
    }
    return quotients(std::move(a));
  }

  static IrrationalSpec rule(std::string name, nlohmann::json params, std::vector<BigInt> prefix,
                             long next_log2_lower) {
    require(!prefix.empty(), ErrorKind::InvalidArgument, "rule needs at least a_0");
    require(prefix[0] >= 0, ErrorKind::InvalidArgument, "a_0 must be >= 0");
    for (std::size_t i = 1; i < prefix.size(); ++i) {
      require(prefix[i] >= 1, ErrorKind::InvalidArgument, "a_n must be >= 1 for n >= 1");
    }
    return IrrationalSpec(
        RuleQuotients{std::move(name), std::move(params), std::move(prefix), std::max(0L, next_log2_lower)});
  }

  static IrrationalSpec decimal(std::string digits, long bits) {
    require(bits >= 1, ErrorKind::InvalidArgument, "decimal needs bits >= 1");
    Rational c = detail::parse_decimal(digits);
    require(c - pow2_q(-bits) > 0, ErrorKind::InvalidArgument, "decimal value must be positive");
    return IrrationalSpec(DecimalLiteral{std::move(digits), bits});
  }

  const Variant& variant() const { return v_; }

  bool is_rational() const { return std::holds_alternative<ExplicitQuotients>(v_); }

  std::string describe() const {
    struct V {
      std::string operator()(const QuadraticSurd& s) const {
        return "(" + s.p.get_str() + "+sqrt(" + s.D.get_str() + "))/" + s.q.get_str();
      }
      std::string operator()(const ExplicitQuotients& e) const {
        std::string out = "[" + e.a[0].get_str();
        for (std::size_t i = 1; i < e.a.size(); ++i) out += (i == 1 ? "; " : ", ") + e.a[i].get_str();
        return out + "]";
      }
      std::string operator()(const RuleQuotients& r) const { return "rule:" + r.name + " " + r.params.dump(); }
      std::string operator()(const DecimalLiteral& d) const {
        return d.digits + " (+/- 2^-" + std::to_string(d.bits) + ")";
      }
    };
    return std::visit(V{}, v_);
  }

 private:
  explicit IrrationalSpec(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

struct Convergent {
  std::size_t n = 0;
  BigInt p;
  BigInt q;
};

struct ConvergentTable {
  std::vector<BigInt> a;
  std::vector<Convergent> c;
  IrrationalSpec source;
  bool terminated = false;  // rational source ran out before the requested count

  std::size_t size() const { return c.size(); }
  const Convergent& last() const { return c.back(); }
};

/// Convergents of a quotient list by the three-term recurrence.
inline std::vector<Convergent> convergents_of(const std::vector<BigInt>& a) {
  std::vector<Convergent> out;
  out.reserve(a.size());
  BigInt p2 = 0, p1 = 1, q2 = 1, q1 = 0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    BigInt p = a[n] * p1 + p2;
    BigInt q = a[n] * q1 + q2;
    out.push_back({n, p, q});
    p2 = std::move(p1);
    p1 = p;
    q2 = std::move(q1);
    q1 = q;
  }
  return out;
}

namespace detail {

struct QuotientRun {
  std::vector<BigInt> a;
  bool terminated = false;
};

inline QuotientRun surd_quotients(const QuadraticSurd& s, std::size_t count) {
  // x = (P + sqrt(Dn)) / Q with Q | Dn - P^2.
  BigInt absq = s.q < 0 ? BigInt(-s.q) : s.q;
  BigInt P = s.p * absq;
  BigInt Q = s.q * absq;
  BigInt Dn = s.D * s.q * s.q;
  BigInt root = isqrt(Dn);
  QuotientRun run;
  run.a.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    BigInt num = P + root + (Q < 0 ? 1 : 0);
    BigInt a;
    mpz_fdiv_q(a.get_mpz_t(), num.get_mpz_t(), Q.get_mpz_t());
    run.a.push_back(a);
    P = a * Q - P;
    BigInt t = Dn - P * P;
    mpz_divexact(Q.get_mpz_t(), t.get_mpz_t(), Q.get_mpz_t());
  }
  return run;
}

inline QuotientRun decimal_quotients(const DecimalLiteral& d, std::size_t count) {
  Rational c = parse_decimal(d.digits);
  Rational r = pow2_q(-d.bits);
  Rational lo = c - r, hi = c + r;
  bool hi_infinite = false;
  QuotientRun run;
  for (std::size_t k = 0; k < count; ++k) {
    BigInt a = floor_q(lo);
    require(!hi_infinite && floor_q(hi) == a, ErrorKind::InsufficientPrecision,
            "quotient a_" + std::to_string(k) + " is not determined by " + std::to_string(d.bits) +
                " guaranteed bits");
    run.a.push_back(a);
    Rational dlo = lo - a, dhi = hi - a;
    // x -> 1/(x - a) reverses the interval.
    lo = 1 / dhi;
    if (dlo == 0) {
      hi_infinite = true;
    } else {
      hi = 1 / dlo;
    }
  }
  return run;
}

inline QuotientRun quotient_run(const IrrationalSpec& spec, std::size_t count) {
  struct V {
    std::size_t count;
    QuotientRun operator()(const QuadraticSurd& s) const { return surd_quotients(s, count); }
    QuotientRun operator()(const ExplicitQuotients& e) const {
      QuotientRun run;
      std::size_t m = std::min(count, e.a.size());
      run.a.assign(e.a.begin(), e.a.begin() + static_cast<long>(m));
      run.terminated = e.a.size() < count;
      return run;
    }
    QuotientRun operator()(const RuleQuotients& r) const {
      require(count <= r.prefix.size(), ErrorKind::BitBudgetExceeded,
              "rule '" + r.name + "' has " + std::to_string(r.prefix.size()) +
                  " quotients within its bit budget; " + std::to_string(count) + " requested");
      QuotientRun run;
      run.a.assign(r.prefix.begin(), r.prefix.begin() + static_cast<long>(count));
      return run;
    }
    QuotientRun operator()(const DecimalLiteral& d) const { return decimal_quotients(d, count); }
  };
  return std::visit(V{count}, spec.variant());
}

}  // namespace detail

/// Quotients a_0..a_n and their convergents. For a rational source the table
/// may be shorter, with `terminated` set.
inline ConvergentTable expand(const IrrationalSpec& alpha, std::size_t n) {
  detail::QuotientRun run = detail::quotient_run(alpha, n + 1);
  ConvergentTable t;
  t.a = std::move(run.a);
  t.c = convergents_of(t.a);
  t.source = alpha;
  t.terminated = run.terminated;
  return t;
}

namespace detail {

// Smallest index m whose convergent error bound is <= 2^-target, with the bound.
inline Enclosure quotient_enclosure(const std::vector<BigInt>& a, long target, long next_log2_lower,
                                    bool exact_tail) {
  std::vector<Convergent> c = convergents_of(a);
  const std::size_t N = c.size() - 1;
  if (exact_tail) {
    return {Rational(c[N].p, c[N].q), Rational(0)};
  }
  for (std::size_t m = 0; m < N; ++m) {
    // |alpha - p_m/q_m| < 1 / (q_m q_{m+1})
    long lg = static_cast<long>(bit_length(c[m].q) + bit_length(c[m + 1].q)) - 2;
    if (lg >= target) {
      Rational center(c[m].p, c[m].q);
      center.canonicalize();
      return {center, Rational(BigInt(1), c[m].q * c[m + 1].q)};
    }
  }
  // Tail bound from the certified lower bound on a_{N+1}.
  long lg = next_log2_lower + 2 * (static_cast<long>(bit_length(c[N].q)) - 1);
  Rational center(c[N].p, c[N].q);
  center.canonicalize();
  if (lg >= target) {
    return {center, pow2_q(-target)};
  }
  Rational r = pow2_q(-next_log2_lower) / Rational(c[N].q * c[N].q);
  return {center, r};
}

inline Enclosure surd_enclosure(const QuadraticSurd& s, long target) {
  long mag = static_cast<long>(bit_length(s.D)) / 2 + static_cast<long>(bit_length(s.p)) + 2;
  mpfr_prec_t prec = static_cast<mpfr_prec_t>(std::max(64L, target + mag + 16));
  for (int attempt = 0; attempt < 8; ++attempt) {
    Real x = (sqrt(Real::from_int(s.D, prec)) + Real::from_int(s.p, prec)) / Real::from_int(s.q, prec);
    if (x.log2_radius() < -target) {
      return {x.mid_q(), pow2_q(-target)};
    }
    prec *= 2;
  }
  fail(ErrorKind::InsufficientPrecision, "surd enclosure did not converge");
}

}  // namespace detail

/// Tightest rational enclosure available with radius at most 2^-bits when
/// the source allows; otherwise the best the source certifies.
inline Enclosure enclose_best(const IrrationalSpec& alpha, long bits) {
  struct V {
    long bits;
    Enclosure operator()(const QuadraticSurd& s) const { return detail::surd_enclosure(s, bits); }
    Enclosure operator()(const ExplicitQuotients& e) const {
      return detail::quotient_enclosure(e.a, bits, 0, true);
    }
    Enclosure operator()(const RuleQuotients& r) const {
      return detail::quotient_enclosure(r.prefix, bits, r.next_log2_lower, false);
    }
    Enclosure operator()(const DecimalLiteral& d) const {
      return {detail::parse_decimal(d.digits), pow2_q(-d.bits)};
    }
  };
  return std::visit(V{bits}, alpha.variant());
}

/// Rational enclosure with radius <= 2^-bits, or an error.
inline Enclosure enclose(const IrrationalSpec& alpha, long bits) {
  require(bits >= 1, ErrorKind::InvalidArgument, "bits must be >= 1");
  if (const auto* d = std::get_if<DecimalLiteral>(&alpha.variant())) {
    require(bits <= d->bits, ErrorKind::InsufficientPrecision,
            "decimal literal guarantees " + std::to_string(d->bits) + " bits; " + std::to_string(bits) +
                " requested");
  }
  Enclosure e = enclose_best(alpha, bits);
  if (e.radius > pow2_q(-bits)) {
    fail(std::holds_alternative<RuleQuotients>(alpha.variant()) ? ErrorKind::BitBudgetExceeded
                                                                : ErrorKind::InsufficientPrecision,
         "cannot enclose alpha to 2^-" + std::to_string(bits));
  }
  return e;
}

/// alpha as a ball of radius <= 2^-bits.
inline Real eval_alpha(const IrrationalSpec& alpha, long bits) {
  Enclosure e = enclose(alpha, bits + 2);
  long mag = static_cast<long>(bit_length(floor_q(abs_q(e.center)))) + 2;
  Real r = e.to_real(static_cast<mpfr_prec_t>(bits + mag + 8));
  return r;
}

struct BoundCheck {
  std::size_t n = 0;
  bool lower_ok = false;
  bool upper_ok = false;
  double lower_margin = 0;  // q_n^2 |alpha - p_n/q_n| - 1/(a_{n+1}+2)
  double upper_margin = 0;  // 1/a_{n+1} - q_n^2 |alpha - p_n/q_n|
};

struct BoundsReport {
  std::vector<BoundCheck> rows;
  bool all_ok() const {
    return std::all_of(rows.begin(), rows.end(), [](const BoundCheck& b) { return b.lower_ok && b.upper_ok; });
  }
};

/// Checks 1/((a_{n+1}+2) q_n^2) < |alpha - p_n/q_n| < 1/(a_{n+1} q_n^2) for
/// every n with a successor, in exact rational arithmetic.
inline BoundsReport check_bounds(const ConvergentTable& table) {
  require(table.size() >= 2, ErrorKind::InvalidArgument, "check_bounds needs at least two convergents");
  std::size_t amax_bits = 0;
  for (const auto& a : table.a) amax_bits = std::max(amax_bits, bit_length(a));
  long bits = 2 * static_cast<long>(bit_length(table.last().q)) + 2 * static_cast<long>(amax_bits) + 64;

  for (int attempt = 0; attempt < 6; ++attempt, bits *= 2) {
    Enclosure e = enclose_best(table.source, bits);
    const Rational lo = e.lo(), hi = e.hi();
    BoundsReport rep;
    bool undecided = false;
    for (std::size_t n = 0; n + 1 < table.size(); ++n) {
      const Convergent& cn = table.c[n];
      const BigInt& a1 = table.a[n + 1];
      Rational x(cn.p, cn.q);
      x.canonicalize();
      Rational q2(cn.q * cn.q);
      // |alpha - x| ranges over an interval.
      Rational dlo = lo - x, dhi = hi - x;
      Rational mn, mx;
      if (dlo > 0) {
        mn = dlo;
        mx = dhi;
      } else if (dhi < 0) {
        mn = -dhi;
        mx = -dlo;
      } else {
        mn = 0;
        mx = std::max(Rational(-dlo), dhi);
      }
      Rational lower_bound = 1 / ((Rational(a1) + 2) * q2);
      Rational upper_bound = 1 / (Rational(a1) * q2);
      BoundCheck b;
      b.n = n;
      if (mn > lower_bound) {
        b.lower_ok = true;
      } else if (mx <= lower_bound) {
        b.lower_ok = false;
      } else {
        undecided = true;
      }
      if (mx < upper_bound) {
        b.upper_ok = true;
      } else if (mn >= upper_bound) {
        b.upper_ok = false;
      } else {
        undecided = true;
      }
      Rational mid = (mn + mx) / 2 * q2;
      b.lower_margin = Rational(mid - 1 / (Rational(a1) + 2)).get_d();
      b.upper_margin = Rational(1 / Rational(a1) - mid).get_d();
      rep.rows.push_back(b);
    }
    if (!undecided) return rep;
    if (e.exact()) return rep;
  }
  fail(ErrorKind::InsufficientPrecision, "enclosure of alpha too wide to decide the convergent bounds");
}

/// True iff p/q is among the convergents with denominator <= q.
inline bool legendre_is_convergent(const BigInt& p, const BigInt& q, const IrrationalSpec& alpha) {
  require(q > 0, ErrorKind::InvalidArgument, "q must be positive");
  BigInt g;
  mpz_gcd(g.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
  require(g == 1, ErrorKind::InvalidArgument, "p and q must be coprime");

  // Grow the table until it passes q or terminates.
  std::size_t n = 8;
  ConvergentTable t;
  for (;;) {
    t = expand(alpha, n);
    if (t.terminated || t.last().q > q) break;
    n *= 2;
  }
  bool found = false;
  for (const auto& c : t.c) {
    if (c.q > q) break;
    if (c.p == p && c.q == q) found = true;
  }

  // Legendre: |alpha - p/q| < 1/(2q^2) forces a convergent.
  long bits = 2 * static_cast<long>(bit_length(q)) + 64;
  Enclosure e = enclose_best(alpha, bits);
  Rational x(p, q);
  Rational dmax = std::max(abs_q(e.lo() - x), abs_q(e.hi() - x));
  Rational bound = 1 / (2 * Rational(q * q));
  if (dmax < bound && !found) {
    throw std::logic_error("Legendre criterion violated for " + p.get_str() + "/" + q.get_str());
  }
  return found;
}

namespace detail {

struct RationalInterval {
  Rational lo, hi;
};

inline RationalInterval abs_iv(const Rational& lo, const Rational& hi) {
  if (lo >= 0) return {lo, hi};
  if (hi <= 0) return {-hi, -lo};
  return {Rational(0), std::max(Rational(-lo), hi)};
}

inline RationalInterval min_iv(const RationalInterval& a, const RationalInterval& b) {
  return {std::min(a.lo, b.lo), std::min(a.hi, b.hi)};
}

}  // namespace detail

/// Brute force over 0 < q <= qmax: no |q alpha - p| beats |q_n alpha - p_n|
/// for q < q_{n+1}. Uses the table's own p_n, so a corrupted entry fails.
inline bool best_approx_check(const ConvergentTable& table, long qmax) {
  using detail::RationalInterval;
  require(qmax >= 1 && qmax <= 100000, ErrorKind::InvalidArgument, "qmax must be in [1, 1e5]");
  require(BigInt(qmax) <= table.last().q, ErrorKind::InvalidArgument, "qmax exceeds the table");

  long bits = 2 * 17 + 2 * static_cast<long>(bit_length(table.last().q)) + 64;
  for (int attempt = 0; attempt < 5; ++attempt, bits *= 2) {
    Enclosure e = enclose_best(table.source, bits);
    const Rational lo = e.lo(), hi = e.hi();
    auto dist = [&](long q, const BigInt& p) {
      return detail::abs_iv(Rational(q) * lo - p, Rational(q) * hi - p);
    };
    auto nearest = [&](long q, const BigInt* exclude) {
      BigInt fl = floor_q(Rational(q) * e.center);
      std::optional<RationalInterval> best;
      for (BigInt p = fl - 1; p <= fl + 2; ++p) {
        if (exclude && p == *exclude) continue;
        RationalInterval d = dist(q, p);
        best = best ? detail::min_iv(*best, d) : d;
      }
      return *best;
    };

    // Prefix minima of the distance to the nearest integer.
    std::vector<RationalInterval> prefix(static_cast<std::size_t>(qmax) + 1);
    for (long q = 1; q <= qmax; ++q) {
      RationalInterval d = nearest(q, nullptr);
      prefix[static_cast<std::size_t>(q)] = q == 1 ? d : detail::min_iv(prefix[static_cast<std::size_t>(q - 1)], d);
    }

    bool undecided = false;
    for (std::size_t n = 0; n + 1 < table.size(); ++n) {
      const BigInt& qn1 = table.c[n + 1].q;
      if (qn1 - 1 > qmax) break;
      const long upto = qn1.get_si() - 1;
      const Convergent& cn = table.c[n];
      const long qn = cn.q.get_si();
      if (upto < 1) continue;
      RationalInterval target = dist(qn, cn.p);
      // Every pair except (q_n, p_n) itself.
      std::optional<RationalInterval> m;
      if (qn - 1 >= 1) m = prefix[static_cast<std::size_t>(std::min(qn - 1, upto))];
      for (long q = qn; q <= upto; ++q) {
        RationalInterval d = nearest(q, q == qn ? &cn.p : nullptr);
        m = m ? detail::min_iv(*m, d) : d;
      }
      if (!m) continue;
      if (m->hi < target.lo) return false;
      if (!(m->lo >= target.hi)) undecided = true;
    }
    if (!undecided) return true;
    if (e.exact()) return true;
  }
  fail(ErrorKind::InsufficientPrecision, "best-approximation comparison undecided");
}

}  // namespace semiuniform
