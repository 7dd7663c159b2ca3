#pragma once

/**
 * @file diophantine.hpp
 * @brief Odd/odd rational approximation: distance of v*alpha to the odd
 * integers, odd/odd approximant streams built from convergents, parity
 * audits and finite-prefix approximation profiles.
 */

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "contfrac.hpp"

namespace semiuniform {

struct OddDistance {
  BigInt u;  // nearest odd integer to v*alpha (ties toward the smaller one)
  Real dist;  // |v*alpha - u|
  Rational dist_lo, dist_hi;  // the same quantity as a rational interval
};

/// Nearest odd integer to x: 2k+1 with k = ceil((x-1)/2 - 1/2).
inline BigInt nearest_odd(const Rational& x) {
  Rational y = (x - 1) / 2 - Rational(1, 2);
  return 2 * ceil_q(y) + 1;
}

/// Distance from v*alpha to the nearest odd integer.
inline OddDistance min_odd_dist(const IrrationalSpec& alpha, const BigInt& v, long bits) {
  require(v >= 1 && is_odd(v), ErrorKind::InvalidArgument, "v must be an odd positive integer");
  long want = bits + static_cast<long>(bit_length(v)) + 8;
  for (int attempt = 0; attempt < 6; ++attempt, want *= 2) {
    Enclosure e = enclose_best(alpha, want);
    Rational lo = Rational(v) * e.lo(), hi = Rational(v) * e.hi();
    BigInt ulo = nearest_odd(lo), uhi = nearest_odd(hi);
    if (ulo != uhi) {
      if (e.exact()) break;
      if (std::holds_alternative<DecimalLiteral>(alpha.variant())) break;
      continue;
    }
    OddDistance out;
    out.u = ulo;
    Rational c = Rational(v) * e.center - ulo;
    Rational r = Rational(v) * e.radius;
    Rational a = c - r, b = c + r;
    if (a >= 0) {
      out.dist_lo = a;
      out.dist_hi = b;
    } else if (b <= 0) {
      out.dist_lo = -b;
      out.dist_hi = -a;
    } else {
      out.dist_lo = 0;
      out.dist_hi = std::max(Rational(-a), b);
    }
    Rational mid = (out.dist_lo + out.dist_hi) / 2;
    Rational rad = (out.dist_hi - out.dist_lo) / 2;
    out.dist = Real::with_radius(mid, rad, static_cast<mpfr_prec_t>(std::max(64L, bits + 16)));
    return out;
  }
  fail(ErrorKind::InsufficientPrecision,
       "enclosure of v*alpha straddles the midpoint between two odd integers (v=" + v.get_str() + ")");
}

struct OddOddApproximant {
  BigInt u;
  BigInt v;
  Real err;  // |alpha - u/v|
  Rational err_hi;  // rational upper bound on err
  std::size_t from_index = 0;  // convergent index the approximant came from
  bool from_difference = false;  // built as (p_{n+1}-p_n)/(q_{n+1}-q_n)
};

namespace detail {

inline bool odd_odd(const Convergent& c) { return is_odd(c.p) && is_odd(c.q); }

inline Rational dist_hi(const Enclosure& e, const Rational& x) {
  return std::max(abs_q(e.lo() - x), abs_q(e.hi() - x));
}

}  // namespace detail

/// The first `count` odd/odd approximants, by increasing v, taken from the
/// table: odd/odd convergents directly, and for a mixed-parity pair of
/// consecutive convergents the difference (p_{n+1}-p_n)/(q_{n+1}-q_n).
/// Only v <= q_{N-1} are emitted, since later convergents cannot add
/// smaller denominators.
inline std::vector<OddOddApproximant> odd_odd_stream(const ConvergentTable& table, std::size_t count) {
  require(table.size() >= 2 || table.terminated, ErrorKind::TableExhausted, "table too short for a stream");
  const std::size_t N = table.size() - 1;
  const BigInt vmax = table.terminated ? table.last().q : table.c[N - 1].q;
  long bits = 2 * static_cast<long>(bit_length(table.last().q)) + 64;
  Enclosure e = enclose_best(table.source, bits);

  std::map<BigInt, OddOddApproximant> by_v;
  auto offer = [&](const BigInt& u, const BigInt& v, std::size_t n, bool diff) {
    if (v > vmax) return;
    Rational x(u, v);
    x.canonicalize();
    Rational eh = detail::dist_hi(e, x);
    // Strict 2/v^2 test against the whole enclosure.
    if (!(eh < Rational(2) / Rational(v * v))) return;
    auto it = by_v.find(v);
    if (it != by_v.end() && it->second.err_hi <= eh) return;
    OddOddApproximant a;
    a.u = u;
    a.v = v;
    a.err_hi = eh;
    a.from_index = n;
    a.from_difference = diff;
    by_v[v] = a;
  };
  for (std::size_t n = 0; n <= N; ++n) {
    const Convergent& c = table.c[n];
    if (detail::odd_odd(c)) offer(c.p, c.q, n, false);
    if (n + 1 <= N) {
      const Convergent& d = table.c[n + 1];
      if (!detail::odd_odd(c) && !detail::odd_odd(d)) {
        offer(d.p - c.p, d.q - c.q, n, true);
      }
    }
  }
  std::vector<OddOddApproximant> out;
  for (auto& [v, a] : by_v) {
    if (out.size() == count) break;
    Rational x(a.u, a.v);
    x.canonicalize();
    Rational c = abs_q(e.center - x);
    a.err = Real::with_radius(c, e.radius, static_cast<mpfr_prec_t>(bits + 16));
    out.push_back(a);
  }
  require(out.size() == count, ErrorKind::TableExhausted,
          "table yields " + std::to_string(out.size()) + " odd/odd approximants; " + std::to_string(count) +
              " requested");
  return out;
}

struct ParityReport {
  bool pairs_ok = true;  // no consecutive q's (or p's) both even
  std::vector<std::size_t> violations;  // first index of each offending pair
  bool all_quotients_even = false;  // a_n even for n >= 1 (and a_0 odd)
  std::optional<bool> pattern_ok;  // even n odd/odd, odd n odd/even; only for all-even tables
  std::vector<std::string> shapes;  // "odd/odd", "odd/even", "even/odd"

  bool ok() const { return pairs_ok && pattern_ok.value_or(true); }
};

inline std::string parity_shape(const Convergent& c) {
  return std::string(is_odd(c.p) ? "odd" : "even") + "/" + (is_odd(c.q) ? "odd" : "even");
}

inline ParityReport parity_audit(const ConvergentTable& table) {
  ParityReport rep;
  for (const auto& c : table.c) rep.shapes.push_back(parity_shape(c));
  for (std::size_t n = 0; n + 1 < table.size(); ++n) {
    const auto& c = table.c[n];
    const auto& d = table.c[n + 1];
    if ((is_even(c.q) && is_even(d.q)) || (is_even(c.p) && is_even(d.p))) {
      rep.pairs_ok = false;
      rep.violations.push_back(n);
    }
  }
  bool all_even = !table.a.empty() && is_odd(table.a[0]) && table.a.size() >= 2;
  for (std::size_t n = 1; n < table.a.size(); ++n) all_even = all_even && is_even(table.a[n]);
  rep.all_quotients_even = all_even;
  if (all_even) {
    bool ok = true;
    for (std::size_t n = 0; n < table.size(); ++n) {
      const char* want = (n % 2 == 0) ? "odd/odd" : "odd/even";
      ok = ok && rep.shapes[n] == want;
    }
    rep.pattern_ok = ok;
  }
  return rep;
}

struct ApproxProfile {
  BigInt max_a;  // over a_1..a_N
  std::size_t argmax = 0;
  Rational c_lower;  // min over n of 1/(a_{n+1}+2), a lower bound on q_n |q_n alpha - p_n|
  std::size_t prefix_len = 0;
  bool bounded_on_prefix = false;
  std::string verdict;  // prefix evidence only
};

/// Partial-quotient profile of a finite prefix. The verdict is evidence
/// about the prefix and says so: "bounded" means the largest quotient
/// already appeared in the first half of the prefix.
inline ApproxProfile badly_approx_profile(const ConvergentTable& table) {
  require(table.size() >= 3, ErrorKind::InvalidArgument, "profile needs at least three convergents");
  ApproxProfile p;
  p.prefix_len = table.size();
  p.max_a = 0;
  for (std::size_t n = 1; n < table.a.size(); ++n) {
    if (table.a[n] > p.max_a) {
      p.max_a = table.a[n];
      p.argmax = n;
    }
  }
  p.c_lower = Rational(1);
  for (std::size_t n = 0; n + 1 < table.a.size(); ++n) {
    Rational b(BigInt(1), table.a[n + 1] + 2);
    if (b < p.c_lower) p.c_lower = b;
  }
  p.bounded_on_prefix = 2 * p.argmax <= p.prefix_len;
  p.verdict = p.bounded_on_prefix ? "bounded quotients so far (prefix evidence, " + std::to_string(p.prefix_len) +
                                        " terms)"
                                  : "not badly approximable on prefix (quotients still growing at " +
                                        std::to_string(p.prefix_len) + " terms)";
  return p;
}

/// Indices n with p_n/q_n odd/odd and a_{n+1} >= threshold. For the last
/// entry of a rule-generated table the certified lower bound on the next
/// quotient is used.
inline std::vector<std::size_t> large_gap_search(const ConvergentTable& table, const BigInt& threshold) {
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < table.size(); ++n) {
    if (!detail::odd_odd(table.c[n])) continue;
    if (n + 1 < table.a.size()) {
      if (table.a[n + 1] >= threshold) out.push_back(n);
      continue;
    }
    const auto* r = std::get_if<RuleQuotients>(&table.source.variant());
    if (r && table.a.size() == r->prefix.size() && r->next_log2_lower > 0) {
      // 2^k >= threshold; decided on bit lengths when k is large.
      const auto k = static_cast<std::size_t>(r->next_log2_lower);
      bool big = k >= bit_length(threshold);
      if (!big && k < 4096) {
        BigInt lb = 1;
        mpz_mul_2exp(lb.get_mpz_t(), lb.get_mpz_t(), static_cast<mp_bitcnt_t>(k));
        big = lb >= threshold;
      }
      if (big) out.push_back(n);
    }
  }
  return out;
}

}  // namespace semiuniform
