#pragma once

/**
 * @file rates.hpp
 * @brief From resolvent growth M(eta) to decay-rate shapes:
 *
 *   Batty-Duyckaerts    c / M_log^{-1}(t / c),  M_log = M (log(1+M) + log(1+eta))
 *   RSS upper           C / M^{-1}(t)           (M of positive increase)
 *   lower bound         c / M^{-1}(C t)
 *
 * Inverses use the sup convention inv(y) = sup{eta : M(eta) <= y}, so that
 * M(inv(y)) <= y with equality on the range.
 */

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "spectral.hpp"

namespace semiuniform {

class MonotoneFn {
 public:
  /// c * eta^p * log(b + eta)^s on [lo, inf). Increasing when c > 0, p, s >= 0
  /// and log(b + lo) > 0 whenever s > 0.
  static MonotoneFn power_log(double c, double p, double s = 0, double b = M_E, double lo = 0) {
    require(c > 0 && p >= 0 && s >= 0 && (p > 0 || s > 0), ErrorKind::InvalidArgument,
            "power_log needs c > 0, p, s >= 0, not both zero");
    require(s == 0 || b + lo >= 1, ErrorKind::InvalidArgument, "log(b + eta) must be >= 0 on the domain");
    MonotoneFn f;
    f.lo_ = lo;
    f.hi_ = INFINITY;
    f.eval_ = [=](double x) {
      double v = c * std::pow(x, p);
      if (s != 0) v *= std::pow(std::log(b + x), s);
      return v;
    };
    f.name_ = "power_log(c=" + fmt(c) + ",p=" + fmt(p) + ",s=" + fmt(s) + ",b=" + fmt(b) + ")";
    return f;
  }

  static MonotoneFn power(double p, double c = 1) { return power_log(c, p, 0); }

  /// Piecewise-linear interpolation of knots (eta_i, m_i), after taking the
  /// running max so the result is nondecreasing.
  static MonotoneFn from_knots(std::vector<double> xs, std::vector<double> ys, std::string name = "curve") {
    require(xs.size() == ys.size() && xs.size() >= 2, ErrorKind::InvalidArgument, "curve needs >= 2 knots");
    for (std::size_t i = 1; i < xs.size(); ++i) {
      require(xs[i] > xs[i - 1], ErrorKind::InvalidArgument, "curve knots must increase");
      ys[i] = std::max(ys[i], ys[i - 1]);
    }
    MonotoneFn f;
    f.lo_ = xs.front();
    f.hi_ = xs.back();
    auto X = std::make_shared<std::vector<double>>(std::move(xs));
    auto Y = std::make_shared<std::vector<double>>(std::move(ys));
    f.eval_ = [X, Y](double x) {
      const auto& xs = *X;
      const auto& ys = *Y;
      if (x <= xs.front()) return ys.front();
      if (x >= xs.back()) return ys.back();
      std::size_t i = std::upper_bound(xs.begin(), xs.end(), x) - xs.begin();
      double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
      return ys[i - 1] + w * (ys[i] - ys[i - 1]);
    };
    f.knots_ = X;
    f.name_ = std::move(name);
    return f;
  }

  enum class Side { Lower, Upper, Mid };

  static MonotoneFn from_curve(const GrowthCurve& gc, Side side = Side::Upper) {
    std::vector<double> xs, ys;
    for (const auto& p : gc.points) {
      xs.push_back(p.eta);
      double lo = p.m_lower.lower_double(), hi = p.m_upper.upper_double();
      ys.push_back(side == Side::Lower ? lo : side == Side::Upper ? hi : 0.5 * (lo + hi));
    }
    const char* tag = side == Side::Lower ? "lower" : side == Side::Upper ? "upper" : "mid";
    return from_knots(std::move(xs), std::move(ys), std::string("m_alpha[") + tag + "](" + gc.alpha + ")");
  }

  static MonotoneFn custom(std::function<double(double)> f, double lo, double hi, std::string name) {
    MonotoneFn m;
    m.eval_ = std::move(f);
    m.lo_ = lo;
    m.hi_ = hi;
    m.name_ = std::move(name);
    return m;
  }

  double operator()(double x) const {
    require(x >= lo_ && x <= hi_, ErrorKind::OutOfRange,
            name_ + " evaluated outside [" + fmt(lo_) + ", " + fmt(hi_) + "] at " + fmt(x));
    return eval_(x);
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::string& name() const { return name_; }
  bool in_domain(double x) const { return x >= lo_ && x <= hi_; }
  const std::vector<double>* knots() const { return knots_.get(); }

 private:
  static std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
  }

  std::function<double(double)> eval_;
  double lo_ = 0, hi_ = INFINITY;
  std::string name_;
  std::shared_ptr<std::vector<double>> knots_;
};

/// M_log(eta) = M(eta) (log(1 + M(eta)) + log(1 + eta)).
inline MonotoneFn m_log(const MonotoneFn& M) {
  auto f = [M](double x) {
    double m = M(x);
    return m * (std::log1p(m) + std::log1p(x));
  };
  return MonotoneFn::custom(f, std::max(M.lo(), 0.0), M.hi(), "log_envelope(" + M.name() + ")");
}

/// sup{eta in domain : fn(eta) <= y}, by bisection to relative 1e-13
/// (well past the 1e-9 that callers rely on).
inline double invert(const MonotoneFn& fn, double y, double rel_tol = 1e-13) {
  require(std::isfinite(y), ErrorKind::InvalidArgument, "invert needs a finite y");
  double lo = fn.lo();
  require(fn(lo) <= y, ErrorKind::BelowRange, "y below the range of " + fn.name());
  double hi;
  if (std::isfinite(fn.hi())) {
    hi = fn.hi();
    if (fn(hi) <= y) {
      require(fn(hi) == y, ErrorKind::OutOfRange, "y above the range of " + fn.name() + " on its domain");
      return hi;
    }
  } else {
    hi = std::max(1.0, 2 * lo);
    while (fn(hi) <= y) {
      lo = hi;
      hi *= 2;
      require(std::isfinite(hi), ErrorKind::OutOfRange, "inverse diverges");
    }
  }
  // invariant: fn(lo) <= y < fn(hi)
  for (int it = 0; it < 400 && hi - lo > rel_tol * std::max(std::fabs(hi), 1e-300); ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (fn(mid) <= y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

enum class DecayKind { BattyDuyckaerts, RSSUpper, LowerBound };

inline std::string to_string(DecayKind k) {
  switch (k) {
    case DecayKind::BattyDuyckaerts: return "BattyDuyckaerts";
    case DecayKind::RSSUpper: return "RSS-upper";
    case DecayKind::LowerBound: return "LowerBound";
  }
  return "?";
}

inline DecayKind decay_kind_from_string(const std::string& s) {
  if (s == "BattyDuyckaerts" || s == "bd") return DecayKind::BattyDuyckaerts;
  if (s == "RSS-upper" || s == "rss") return DecayKind::RSSUpper;
  if (s == "LowerBound" || s == "lower") return DecayKind::LowerBound;
  fail(ErrorKind::InvalidArgument, "unknown prediction kind '" + s + "'");
}

struct PositiveIncrease {
  double alpha_hat = 0;  // largest exponent with r(lambda, t) >= c lambda^alpha on the grid
  double c = 1;
  double c_floor = 1;
  bool certified = false;  // alpha_hat > margin
  double margin = 0.1;
  std::vector<double> lambdas, ts;
  std::size_t pairs_used = 0, pairs_skipped = 0;
  struct Witness {
    double lambda, t, ratio;
  };
  std::vector<Witness> flat;  // lambda >= 10 with r < 2
  std::vector<Witness> worst;  // smallest ratio for each lambda
  std::string note;
};

/// Lower envelope of r(lambda, t) = fn(lambda t) / fn(t) by a power law.
/// With c_floor fixed, alpha_hat = min over lambda > 1 of
/// (log r - log c_floor) / log lambda, and c = min(1, min r lambda^-alpha_hat).
/// A finite grid is evidence, not proof; the grids are carried along.
inline PositiveIncrease positive_increase_estimate(const MonotoneFn& fn, std::vector<double> lambdas,
                                                   std::vector<double> ts, double t0 = 0, double c_floor = 1,
                                                   double margin = 0.1) {
  require(!lambdas.empty() && !ts.empty(), ErrorKind::InvalidArgument, "grids must be nonempty");
  require(c_floor > 0 && c_floor <= 1, ErrorKind::InvalidArgument, "c_floor must lie in (0, 1]");
  for (double l : lambdas) require(l >= 1 && std::isfinite(l), ErrorKind::InvalidArgument, "lambda must be >= 1");
  PositiveIncrease pi;
  pi.c_floor = c_floor;
  pi.margin = margin;
  std::sort(lambdas.begin(), lambdas.end());
  std::sort(ts.begin(), ts.end());
  ts.erase(std::remove_if(ts.begin(), ts.end(), [&](double t) { return t < t0; }), ts.end());
  pi.lambdas = lambdas;
  pi.ts = ts;
  double alpha = INFINITY;
  struct Pair {
    double l, t, r;
  };
  std::vector<Pair> pairs;
  for (double l : lambdas) {
    PositiveIncrease::Witness worst{l, 0, INFINITY};
    for (double t : ts) {
      if (!fn.in_domain(t) || !fn.in_domain(l * t)) {
        ++pi.pairs_skipped;
        continue;
      }
      double base = fn(t);
      if (!(base > 0)) {
        ++pi.pairs_skipped;
        continue;
      }
      double r = fn(l * t) / base;
      ++pi.pairs_used;
      pairs.push_back({l, t, r});
      if (r < worst.ratio) worst = {l, t, r};
      if (l > 1) alpha = std::min(alpha, (std::log(r) - std::log(c_floor)) / std::log(l));
      if (l >= 10 && r < 2) pi.flat.push_back({l, t, r});
    }
    if (std::isfinite(worst.ratio)) pi.worst.push_back(worst);
  }
  require(pi.pairs_used > 0, ErrorKind::InvalidArgument, "no grid pair lies inside the domain");
  if (!std::isfinite(alpha)) alpha = 0;  // only lambda = 1 was usable
  pi.alpha_hat = std::max(0.0, alpha);
  double c = 1;
  for (const auto& p : pairs) c = std::min(c, p.r * std::pow(p.l, -pi.alpha_hat));
  pi.c = c;
  pi.certified = pi.alpha_hat > margin;
  if (pi.certified)
    pi.note = "positive increase on the grid (evidence only)";
  else if (!pi.flat.empty())
    pi.note = "refutation evidence: ratios stay below 2 for lambda >= 10";
  else
    pi.note = "exponent at or below the margin with c floor " + std::to_string(c_floor) +
              " (short flats; a smaller floor may certify)";
  return pi;
}

/// c(alpha) = min(1, min r lambda^-alpha) at a fixed exponent.
inline double increase_constant_at(const MonotoneFn& fn, double alpha, const std::vector<double>& lambdas,
                                   const std::vector<double>& ts) {
  double c = 1;
  for (double l : lambdas)
    for (double t : ts)
      if (fn.in_domain(t) && fn.in_domain(l * t)) c = std::min(c, fn(l * t) / fn(t) * std::pow(l, -alpha));
  return c;
}

struct DecayPrediction {
  DecayKind kind{};
  double c = 1, C = 1;
  std::string theorem;
  std::string label;  // "shape-only prediction" when the constants are defaults
  std::string fn_name;
  std::vector<std::pair<double, double>> rows;  // (t, bound)
  std::optional<PositiveIncrease> certificate;
};

inline std::string theorem_of(DecayKind k) {
  switch (k) {
    case DecayKind::BattyDuyckaerts: return "||U(t)A^-1|| <= c / M_log^-1(t/c)";
    case DecayKind::RSSUpper: return "||U(t)A^-1|| <= C / M^-1(t), M of positive increase";
    case DecayKind::LowerBound: return "||U(t)A^-1|| >= c / M^-1(C t)";
  }
  return "";
}

/// Evaluates the rate shape. RSS-upper requires a positive-increase
/// certificate; pass one, or an estimate is run on the default grids.
inline DecayPrediction predict(const MonotoneFn& M, DecayKind kind, double c, double C, const std::vector<double>& ts,
                               std::optional<PositiveIncrease> cert = std::nullopt) {
  require(c > 0 && C > 0, ErrorKind::InvalidArgument, "constants must be positive");
  DecayPrediction p;
  p.kind = kind;
  p.c = c;
  p.C = C;
  p.theorem = theorem_of(kind);
  p.label = (c == 1 && C == 1) ? "shape-only prediction" : "caller constants";
  p.fn_name = M.name();
  if (kind == DecayKind::RSSUpper) {
    if (!cert) {
      double lo = std::max(M.lo(), 1.0);
      double hi = std::isfinite(M.hi()) ? M.hi() : 1e6;
      std::vector<double> grid;
      for (double t = lo; t * 10 <= hi * (1 + 1e-12); t *= std::sqrt(10.0)) grid.push_back(t);
      if (grid.empty()) grid.push_back(lo);
      cert = positive_increase_estimate(M, {1, 2, 4, 10}, grid);
    }
    require(cert->certified, ErrorKind::MissingCertificate,
            "RSS-upper needs M of positive increase; " + cert->note);
    p.certificate = cert;
  }
  MonotoneFn inv_src = kind == DecayKind::BattyDuyckaerts ? m_log(M) : M;
  for (double t : ts) {
    require(t > 0 && std::isfinite(t), ErrorKind::InvalidArgument, "t must be positive");
    double b = 0;
    switch (kind) {
      case DecayKind::BattyDuyckaerts: b = c / invert(inv_src, t / c); break;
      case DecayKind::RSSUpper: b = C / invert(inv_src, t); break;
      case DecayKind::LowerBound: b = c / invert(inv_src, C * t); break;
    }
    p.rows.emplace_back(t, b);
  }
  return p;
}

inline nlohmann::json to_json(const PositiveIncrease& pi) {
  nlohmann::json j = {{"alpha_hat", pi.alpha_hat}, {"c", pi.c},           {"c_floor", pi.c_floor},
                      {"margin", pi.margin},       {"certified", pi.certified}, {"lambdas", pi.lambdas},
                      {"ts", pi.ts},               {"pairs_used", pi.pairs_used}, {"pairs_skipped", pi.pairs_skipped},
                      {"note", pi.note}};
  auto w = [](const std::vector<PositiveIncrease::Witness>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& x : v) a.push_back({{"lambda", x.lambda}, {"t", x.t}, {"ratio", x.ratio}});
    return a;
  };
  j["flat"] = w(pi.flat);
  j["worst"] = w(pi.worst);
  return j;
}

}  // namespace semiuniform
