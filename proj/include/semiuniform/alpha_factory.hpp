#pragma once

/**
 * @file alpha_factory.hpp
 * @brief Build alpha = [1; a_1, a_2, ...] from a decreasing target f by
 *
 *     a_n = 2 * ceil( 1 / (sqrt(f(pi q_{n-1})) q_{n-1}) ),
 *
 * with every ceiling taken over a certified enclosure. Depth is limited by
 * a bit budget on q_n rather than a term count.
 */

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "contfrac.hpp"
#include "diophantine.hpp"

namespace semiuniform {

struct DecayTarget {
  enum class Kind { Exp, PowerLog, Table };
  Kind kind = Kind::Exp;
  double beta = 1.0;  // Exp: f(t) = exp(-beta t)
  double p = 4.0;  // PowerLog: f(t) = t^-p (log(e + t))^-s
  double s = 0.0;
  std::vector<std::pair<double, double>> pts;  // Table: (t, f), log-linear in between

  static DecayTarget exp_decay(double beta) {
    require(beta > 0 && std::isfinite(beta), ErrorKind::InvalidArgument, "exp target needs beta > 0");
    DecayTarget f;
    f.kind = Kind::Exp;
    f.beta = beta;
    return f;
  }
  static DecayTarget power_log(double p, double s) {
    require(p > 0 && s >= 0 && std::isfinite(p) && std::isfinite(s), ErrorKind::InvalidArgument,
            "powerlog target needs p > 0 and s >= 0");
    DecayTarget f;
    f.kind = Kind::PowerLog;
    f.p = p;
    f.s = s;
    return f;
  }
  static DecayTarget table(std::vector<std::pair<double, double>> pts) {
    require(pts.size() >= 2, ErrorKind::InvalidArgument, "table target needs at least two points");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      require(pts[i].first > 0 && pts[i].second > 0, ErrorKind::InvalidArgument,
              "table target needs t > 0 and f > 0");
      if (i > 0) {
        require(pts[i].first > pts[i - 1].first, ErrorKind::InvalidArgument, "table t values must increase");
        require(pts[i].second <= pts[i - 1].second, ErrorKind::MonotonicityViolation,
                "table target increases between t=" + std::to_string(pts[i - 1].first) + " and t=" +
                    std::to_string(pts[i].first));
      }
    }
    DecayTarget f;
    f.kind = Kind::Table;
    f.pts = std::move(pts);
    return f;
  }

  /// Largest t at which f is defined (infinite for the closed forms).
  double t_max() const { return kind == Kind::Table ? pts.back().first : INFINITY; }
};

inline nlohmann::json to_json(const DecayTarget& f) {
  switch (f.kind) {
    case DecayTarget::Kind::Exp: return {{"kind", "exp"}, {"beta", f.beta}};
    case DecayTarget::Kind::PowerLog: return {{"kind", "powerlog"}, {"p", f.p}, {"s", f.s}};
    case DecayTarget::Kind::Table: {
      nlohmann::json pts = nlohmann::json::array();
      for (const auto& [t, v] : f.pts) pts.push_back({t, v});
      return {{"kind", "table"}, {"pts", pts}};
    }
  }
  return {};
}

inline DecayTarget decay_target_from_json(const nlohmann::json& j) {
  require(j.is_object() && j.contains("kind"), ErrorKind::ParseError, "decay target needs a 'kind'");
  const std::string k = j.at("kind").get<std::string>();
  if (k == "exp") return DecayTarget::exp_decay(j.value("beta", 1.0));
  if (k == "powerlog") return DecayTarget::power_log(j.at("p").get<double>(), j.value("s", 0.0));
  if (k == "table") {
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : j.at("pts")) {
      require(row.is_array() && row.size() == 2, ErrorKind::ParseError, "table rows are [t, f]");
      pts.emplace_back(row[0].get<double>(), row[1].get<double>());
    }
    return DecayTarget::table(std::move(pts));
  }
  fail(ErrorKind::ParseError, "unknown decay target kind '" + k + "'");
}

/// log f(t) as a ball, for t > 0.
inline Real log_f(const DecayTarget& f, const Real& t) {
  const mpfr_prec_t prec = t.prec();
  switch (f.kind) {
    case DecayTarget::Kind::Exp: return -(Real::from_double(f.beta, prec) * t);
    case DecayTarget::Kind::PowerLog: {
      Real e = exp(Real::from_long(1, prec));
      Real r = -(Real::from_double(f.p, prec) * log(t));
      if (f.s != 0) r = r - Real::from_double(f.s, prec) * log(log(e + t));
      return r;
    }
    case DecayTarget::Kind::Table: {
      const double tm = t.to_double();
      require(t.lower_double() >= f.pts.front().first && t.upper_double() <= f.pts.back().first,
              ErrorKind::OutOfRange, "t outside the tabulated range");
      std::size_t i = 0;
      while (i + 2 < f.pts.size() && f.pts[i + 1].first <= tm) ++i;
      Real t0 = Real::from_double(f.pts[i].first, prec), t1 = Real::from_double(f.pts[i + 1].first, prec);
      Real l0 = log(Real::from_double(f.pts[i].second, prec));
      Real l1 = log(Real::from_double(f.pts[i + 1].second, prec));
      return l0 + (t - t0) / (t1 - t0) * (l1 - l0);
    }
  }
  fail(ErrorKind::InvalidArgument, "bad target");
}

inline Real f_at(const DecayTarget& f, const Real& t) { return exp(log_f(f, t)); }

inline double f_value(const DecayTarget& f, double t) {
  return f_at(f, Real::from_double(t, 80)).to_double();
}

struct ConstructedAlpha {
  DecayTarget f;
  long bit_budget = 0;
  IrrationalSpec alpha;
  ConvergentTable table;
  std::size_t depth = 0;  // index of the last quotient
  std::string stop_reason;
};

namespace detail {

// log x_n where x_n = 1 / (sqrt(f(pi q)) q).
inline Real log_x(const DecayTarget& f, const BigInt& q, mpfr_prec_t prec) {
  Real qr = Real::from_int(q, prec);
  Real t = Real::pi(prec) * qr;
  return -mul_2exp(log_f(f, t), -1) - log(qr);
}

}  // namespace detail

/// Runs the recursion until bits(q_n) would exceed the budget.
inline ConstructedAlpha construct(const DecayTarget& f, long bit_budget) {
  require(bit_budget >= 64, ErrorKind::InvalidArgument, "bit budget must be >= 64");
  ConstructedAlpha ca;
  ca.f = f;
  ca.bit_budget = bit_budget;

  std::vector<BigInt> a = {BigInt(1)};
  BigInt q_prev2 = 0, q_prev = 1;  // q_{-1}, q_0
  long next_log2_lower = 0;
  const double ln2 = std::log(2.0);
  for (;;) {
    const BigInt& q = q_prev;
    if (f.kind == DecayTarget::Kind::Table && !(M_PI * q.get_d() < f.t_max())) {
      ca.stop_reason = "target table ends before pi*q_n";
      break;
    }
    // Certified size estimate before committing to a full evaluation.
    Real lx = detail::log_x(f, q, 128);
    double lx_up = lx.upper_double();
    long est_bits = static_cast<long>(std::ceil(std::max(0.0, lx_up) / ln2)) + 2;
    long qbits = static_cast<long>(bit_length(q));
    if (std::max(1L, static_cast<long>(std::floor(lx.lower_double() / ln2)) + 1) + qbits - 1 > bit_budget) {
      // a_n >= 2 x_n: 2^(floor(log2 x_n) + 1) is a certified lower bound.
      next_log2_lower = std::max(1L, static_cast<long>(std::floor(lx.lower_double() / ln2)) + 1);
      ca.stop_reason = "bit budget";
      break;
    }
    // Tighten until the ceiling is certain, up to 4 x budget.
    mpfr_prec_t prec = static_cast<mpfr_prec_t>(est_bits + 64);
    std::optional<BigInt> c;
    while (!c) {
      require(prec <= 4 * static_cast<mpfr_prec_t>(bit_budget) + 256, ErrorKind::CeilingUndecidable,
              "ceiling for a_" + std::to_string(a.size()) + " undecided at " + std::to_string(prec) + " bits");
      Real x = exp(detail::log_x(f, q, prec));
      c = x.certain_ceil();
      prec *= 2;
    }
    BigInt an = 2 * *c;
    BigInt qn = an * q_prev + q_prev2;
    if (static_cast<long>(bit_length(qn)) > bit_budget) {
      next_log2_lower = static_cast<long>(bit_length(an)) - 1;
      ca.stop_reason = "bit budget";
      break;
    }
    a.push_back(an);
    q_prev2 = q_prev;
    q_prev = qn;
  }

  nlohmann::json params = {{"f", to_json(f)}, {"bits", bit_budget}};
  ca.alpha = IrrationalSpec::rule("construction", params, a, next_log2_lower);
  ca.table = expand(ca.alpha, a.size() - 1);
  ca.depth = a.size() - 1;
  return ca;
}

struct PredictedBounds {
  Real lower;  // c f(t + pi)
  std::optional<Real> upper;  // C f(t - pi); empty when t <= pi (f is unbounded there)
};

/// (c f(t+pi), C f(t-pi)) for t within the constructed depth.
inline PredictedBounds predicted_bounds(const ConstructedAlpha& ca, double t, double c = 1.0, double C = 1.0) {
  require(t >= 0 && std::isfinite(t), ErrorKind::InvalidArgument, "t must be finite and >= 0");
  Real qlast = Real::from_int(ca.table.last().q, 128);
  require(t <= (Real::pi(128) * qlast).lower_double(), ErrorKind::OutOfRange,
          "t beyond pi * q_last of the constructed depth");
  const mpfr_prec_t prec = 128;
  Real pi = Real::pi(prec);
  Real tr = Real::from_double(t, prec);
  PredictedBounds b{Real::from_double(c, prec) * f_at(ca.f, tr + pi), std::nullopt};
  Real tm = tr - pi;
  if (tm.positive()) b.upper = Real::from_double(C, prec) * f_at(ca.f, tm);
  return b;
}

}  // namespace semiuniform
