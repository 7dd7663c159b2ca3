#pragma once

/**
 * @file verify.hpp
 * @brief Verification suites with pass/fail results.
 *
 * Suites: appendix, sandwich, growth, rational, construction, gaps, rates,
 * phs, sampled, all. Each check carries its own runtime limit; exceeding it
 * fails the check.
 */

#include <chrono>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "alpha_factory.hpp"
#include "contfrac.hpp"
#include "diophantine.hpp"
#include "phs.hpp"
#include "rates.hpp"
#include "spectral.hpp"

namespace semiuniform {

struct CheckResult {
  std::string id;  // "1" .. "12", "S"
  std::string name;
  bool passed = false;
  bool flagged = false;  // outliers worth a look, not a failure
  std::string detail;
  double seconds = 0;
  double limit_seconds = 0;
  nlohmann::json data = nlohmann::json::object();
};

struct VerifyOptions {
  unsigned jobs = 1;
  long sampled_count = 20;
  std::uint64_t seed = 20240607;
};

inline nlohmann::json to_json(const CheckResult& r) {
  return {{"id", r.id},           {"name", r.name},       {"passed", r.passed},
          {"flagged", r.flagged}, {"detail", r.detail},   {"seconds", r.seconds},
          {"limit_seconds", r.limit_seconds}, {"data", r.data}};
}

/// "[criterion N] PASS name: detail (1.23 s)".
inline std::string summary_line(const CheckResult& r) {
  std::ostringstream os;
  os << "[criterion " << r.id << "] " << (r.passed ? "PASS" : "FAIL") << (r.flagged ? " (flagged)" : "") << ' '
     << r.name << ": " << r.detail;
  char buf[64];
  std::snprintf(buf, sizeof buf, " (%.2f s, limit %.0f s)", r.seconds, r.limit_seconds);
  os << buf;
  return os.str();
}

namespace detail {

using Body = std::function<void(CheckResult&)>;

inline CheckResult timed(std::string id, std::string name, double limit, const Body& body) {
  CheckResult r;
  r.id = std::move(id);
  r.name = std::move(name);
  r.limit_seconds = limit;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const Error& e) {
    r.passed = false;
    r.detail = "error " + std::string(to_string(e.kind())) + ": " + e.what();
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.seconds >= limit) {
    r.passed = false;
    r.detail += "; runtime over limit";
  }
  return r;
}

inline std::string num(double x, int digits = 6) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

// |(p + sqrt D)/q - x| < d decided in integers and rationals only.
inline bool surd_within(const QuadraticSurd& s, const Rational& x, const Rational& d) {
  Rational q(s.q);
  Rational y = q * x - Rational(s.p);
  Rational e = abs_q(q) * d;
  Rational D(s.D);
  Rational hi = y + e, lo = y - e;
  bool below_hi = hi > 0 && hi * hi > D;
  bool above_lo = lo < 0 || lo * lo < D;
  return below_hi && above_lo;
}

inline double slope_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline const std::vector<double>& c5_etas() {
  static const std::vector<double> e = {10, 31.6, 100, 316, 1000, 3162, 10000};
  return e;
}

inline ConstructedAlpha c1_constructed() { return construct(DecayTarget::power_log(2, 2), 512); }

struct SandwichSweep {
  std::vector<SandwichRow> rows;
  double seconds = 0;
};

inline SandwichSweep sqrt2_sweep(unsigned jobs) {
  auto t0 = std::chrono::steady_clock::now();
  std::vector<BigInt> vs;
  for (int v = 1; v <= 999; v += 2) vs.push_back(v);
  InfOptions o;
  o.tol = 1e-6;
  SandwichSweep s;
  s.rows = sandwich_report(IrrationalSpec::sqrt_of(2), vs, o, 128, jobs);
  s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return s;
}

}  // namespace detail

// 1: determinant identity and the two-sided convergent bounds.
inline CheckResult check_convergent_identities() {
  return detail::timed("1", "convergent identities", 5, [](CheckResult& r) {
    auto ca = detail::c1_constructed();
    std::vector<std::pair<std::string, IrrationalSpec>> alphas = {
        {"sqrt2", IrrationalSpec::sqrt_of(2)}, {"golden", IrrationalSpec::golden()}, {"constructed", ca.alpha}};
    r.passed = true;
    std::ostringstream det;
    for (const auto& [name, a] : alphas) {
      ConvergentTable t = expand(a, 50);
      require(t.size() == 51, ErrorKind::TableExhausted, name + ": fewer than 51 convergents");
      std::size_t det_bad = 0;
      for (std::size_t n = 0; n < 50; ++n) {
        BigInt lhs = t.c[n].p * t.c[n + 1].q - t.c[n + 1].p * t.c[n].q;
        BigInt want = (n % 2 == 0) ? BigInt(-1) : BigInt(1);
        if (lhs != want) ++det_bad;
      }
      BoundsReport b = check_bounds(t);
      std::size_t lo_bad = 0, hi_bad = 0;
      for (std::size_t n = 0; n < 50; ++n) {
        lo_bad += !b.rows[n].lower_ok;
        hi_bad += !b.rows[n].upper_ok;
      }
      bool ok = det_bad == 0 && lo_bad == 0 && hi_bad == 0 && b.rows.size() == 50;
      r.passed = r.passed && ok;
      det << name << (ok ? " ok" : " bad") << " (det " << det_bad << ", lower " << lo_bad << ", upper " << hi_bad
          << "); ";
      r.data[name] = {{"det_failures", det_bad}, {"lower_failures", lo_bad}, {"upper_failures", hi_bad}};
    }
    r.detail = det.str() + "n = 0..49";
  });
}

// 2: |alpha - u/v| < 2/v^2 for the first 15 odd/odd approximants.
inline CheckResult check_odd_odd_stream() {
  return detail::timed("2", "odd/odd approximant stream", 5, [](CheckResult& r) {
    r.passed = true;
    std::ostringstream os;
    for (const auto& [name, a] :
         std::vector<std::pair<std::string, IrrationalSpec>>{{"sqrt2", IrrationalSpec::sqrt_of(2)},
                                                            {"golden", IrrationalSpec::golden()}}) {
      ConvergentTable t = expand(a, 80);
      auto stream = odd_odd_stream(t, 15);
      const auto& s = std::get<QuadraticSurd>(a.variant());
      std::size_t bad = 0;
      nlohmann::json vs = nlohmann::json::array();
      for (const auto& x : stream) {
        Rational q(x.u, x.v);
        q.canonicalize();
        bool ok = is_odd(x.u) && is_odd(x.v) && detail::surd_within(s, q, Rational(2) / Rational(x.v * x.v));
        bad += !ok;
        vs.push_back(x.u.get_str() + "/" + x.v.get_str());
      }
      r.passed = r.passed && bad == 0 && stream.size() == 15;
      os << name << ": " << stream.size() - bad << "/15 ok, last " << vs.back().get<std::string>() << "; ";
      r.data[name] = vs;
    }
    r.detail = os.str() + "exact surd test";
  });
}

// 3: inf_{[v-1,v+1]} h <= 36 pi^2 / min{(1+alpha)^2, 1} dist^2 for odd v <= 999.
inline CheckResult check_sandwich_upper(unsigned jobs = 1) {
  return detail::timed("3", "sandwich upper bound", 120, [jobs](CheckResult& r) {
    auto sw = detail::sqrt2_sweep(jobs);
    std::size_t bad = 0;
    double worst = 0;
    std::string worst_v;
    for (const auto& row : sw.rows) {
      bad += !row.upper_ok;
      double q = row.ratio_hi.upper_double() / row.constant.lower_double();
      if (q > worst) {
        worst = q;
        worst_v = row.v.get_str();
      }
    }
    r.passed = bad == 0 && sw.rows.size() == 500;
    r.detail = std::to_string(sw.rows.size() - bad) + "/" + std::to_string(sw.rows.size()) +
               " odd v within 36 pi^2 dist^2; largest ratio_hi / constant " + detail::num(worst) + " at v=" + worst_v;
    r.data = {{"constant", sw.rows.front().constant.to_double()}, {"worst_fraction", worst}, {"worst_v", worst_v}};
  });
}

// 4: min ratio inf h / dist^2 positive, decade minima within a factor 10.
inline CheckResult check_sandwich_lower(unsigned jobs = 1) {
  return detail::timed("4", "sandwich lower bound", 120, [jobs](CheckResult& r) {
    auto sw = detail::sqrt2_sweep(jobs);
    double dec[3] = {INFINITY, INFINITY, INFINITY};
    double overall = INFINITY;
    std::string at;
    for (const auto& row : sw.rows) {
      double lo = row.ratio_lo.lower_double();
      long v = row.v.get_si();
      int k = v < 10 ? 0 : v < 100 ? 1 : 2;
      dec[k] = std::min(dec[k], lo);
      if (lo < overall) {
        overall = lo;
        at = row.v.get_str();
      }
    }
    double mx = std::max({dec[0], dec[1], dec[2]}), mn = std::min({dec[0], dec[1], dec[2]});
    r.passed = overall > 0 && mx / mn < 10;
    r.detail = "min ratio " + detail::num(overall) + " at v=" + at + "; decade minima " + detail::num(dec[0]) + ", " +
               detail::num(dec[1]) + ", " + detail::num(dec[2]) + " (spread " + detail::num(mx / mn, 4) +
               "); trace constant " + detail::num(sandwich_trace_lower(std::sqrt(2.0)));
    r.data = {{"constant", overall}, {"decade_minima", {dec[0], dec[1], dec[2]}}, {"spread", mx / mn}};
  });
}

// 5: slope of log m vs log eta is 2 +- 0.1, m/eta^2 spread < 1e3.
inline CheckResult check_quadratic_growth() {
  return detail::timed("5", "quadratic growth", 300, [](CheckResult& r) {
    const auto& etas = detail::c5_etas();
    auto gc = growth_curve(IrrationalSpec::sqrt_of(2), etas, 1e-3, 128);
    std::vector<double> mid, lo, hi;
    double rmax = 0, rmin = INFINITY;
    bool mono = true;
    for (std::size_t i = 0; i < gc.points.size(); ++i) {
      const auto& p = gc.points[i];
      lo.push_back(p.m_lower.lower_double());
      hi.push_back(p.m_upper.upper_double());
      mid.push_back(std::sqrt(lo.back() * hi.back()));
      rmax = std::max(rmax, hi.back() / (p.eta * p.eta));
      rmin = std::min(rmin, lo.back() / (p.eta * p.eta));
      if (i > 0) mono = mono && lo[i] >= lo[i - 1] && hi[i] >= hi[i - 1];
    }
    double s = detail::slope_loglog(etas, mid);
    double slo = detail::slope_loglog(etas, lo), shi = detail::slope_loglog(etas, hi);
    r.passed = std::abs(s - 2) <= 0.1 && rmax / rmin < 1e3 && mono;
    r.detail = "slope " + detail::num(s, 5) + " (lower " + detail::num(slo, 5) + ", upper " + detail::num(shi, 5) +
               "); m/eta^2 in [" + detail::num(rmin, 4) + ", " + detail::num(rmax, 4) + "], max/min " +
               detail::num(rmax / rmin, 4);
    r.data = {{"slope", s}, {"ratio_min", rmin}, {"ratio_max", rmax}, {"m_lower", lo}, {"m_upper", hi}};
  });
}

// 6: alpha = 1/3: det T_{3 pi} vanishes and the scan flags it.
inline CheckResult check_rational_singularity(unsigned jobs = 1) {
  return detail::timed("6", "rational singularity", 1, [jobs](CheckResult& r) {
    auto a = IrrationalSpec::rational(1, 3);
    Complex d = det_tau(a, Rational(3));
    double mag = std::max(std::abs(d.re.upper_double()), std::abs(d.re.lower_double())) +
                 std::max(std::abs(d.im.upper_double()), std::abs(d.im.lower_double()));
    auto s = universal_system(1.0 / 3.0);
    std::vector<double> grid;
    for (int i = 0; i <= 120; ++i) grid.push_back(0.1 * i);
    ScanOptions so;
    so.jobs = jobs;
    auto rep = stability_scan(s, grid, so);
    r.passed = mag <= 1e-12 && !rep.invertible_on_grid;
    r.detail = "|det T_{3pi}| <= " + detail::num(mag, 3) + " (certified); scan: " + rep.verdict + ", min |det| " +
               detail::num(rep.min_det, 3) + " at t=" + detail::num(rep.t_at_min, 10);
    r.data = {{"det_bound", mag}, {"scan_min_det", rep.min_det}, {"t_at_min", rep.t_at_min}};
  });
}

// 7: f = t^-4. Quotients against an independent recursion, and
// inf g near the first odd/odd resonances against C f(t - pi).
inline CheckResult check_construction_fidelity() {
  return detail::timed("7", "construction fidelity", 180, [](CheckResult& r) {
    auto f = DecayTarget::power_log(4, 0);
    auto ca = construct(f, 4096);
    // Oracle: x_n = pi^2 q_n exactly, so a_{n+1} = 2 ceil(pi^2 q_n).
    const mpfr_prec_t op = 2048;
    std::vector<BigInt> want = {1};
    {
      mpfr_t pi2, x;
      mpfr_inits2(op, pi2, x, static_cast<mpfr_ptr>(nullptr));
      mpfr_const_pi(pi2, MPFR_RNDN);
      mpfr_sqr(pi2, pi2, MPFR_RNDN);
      BigInt qm = 0, q = 1;
      for (int n = 0; n < 6; ++n) {
        mpfr_mul_z(x, pi2, q.get_mpz_t(), MPFR_RNDN);
        mpfr_ceil(x, x);
        BigInt c;
        mpfr_get_z(c.get_mpz_t(), x, MPFR_RNDN);
        BigInt a = 2 * c;
        want.push_back(a);
        BigInt qn = a * q + qm;
        qm = q;
        q = qn;
      }
      mpfr_clears(pi2, x, static_cast<mpfr_ptr>(nullptr));
    }
    bool quot_ok = ca.table.a.size() >= 7;
    for (std::size_t n = 1; quot_ok && n <= 6; ++n) quot_ok = ca.table.a[n] == want[n];
    quot_ok = quot_ok && want[1] == 20 && want[2] == 396;

    // First 4 odd/odd convergents.
    std::vector<std::size_t> idx;
    for (std::size_t n = 0; n < ca.table.size() && idx.size() < 4; ++n)
      if (is_odd(ca.table.c[n].p) && is_odd(ca.table.c[n].q)) idx.push_back(n);
    require(idx.size() == 4, ErrorKind::TableExhausted, "fewer than 4 odd/odd convergents");
    double C = 0;
    nlohmann::json rows = nlohmann::json::array();
    bool bits_ok = true;
    for (std::size_t n : idx) {
      const BigInt& v = ca.table.c[n].q;
      const long bits = 8 * static_cast<long>(bit_length(v)) + 256;
      bits_ok = bits_ok && bits >= 256;
      if (v == 1) {
        // f(t - pi) = f(0) is infinite: the bound holds for any C.
        rows.push_back({{"n", n}, {"v", "1"}, {"ratio", nullptr}});
        continue;
      }
      UniversalExample ue(ca.alpha, bits);
      InfOptions o;
      o.tol = 1e-6;
      o.rel = 1e-3;
      auto inf = inf_h_interval(ue, Rational(v - 1), Rational(v + 1), o);
      Real g = mul_2exp(inf.upper, -1);
      Real t = Real::pi(static_cast<mpfr_prec_t>(bits)) * Real::from_int(v - 1, static_cast<mpfr_prec_t>(bits));
      Real fr = f_at(f, t);
      Real ratio = g / fr;
      double q = ratio.upper_double();
      C = std::max(C, q);
      rows.push_back({{"n", n}, {"v_bits", bit_length(v)}, {"g_upper", g.upper_string(6)},
                      {"f", fr.mid_string(6)}, {"ratio", q}});
    }
    r.passed = quot_ok && bits_ok && C > 0 && C < 1e3;
    std::ostringstream os;
    os << "a_1..a_6 " << (quot_ok ? "match" : "MISMATCH") << " (a_1=" << ca.table.a[1].get_str()
       << ", a_2=" << ca.table.a[2].get_str() << "); fitted C " << detail::num(C, 5) << " over odd/odd n =";
    for (auto n : idx) os << ' ' << n;
    r.detail = os.str();
    r.data = {{"C", C}, {"rows", rows}, {"depth", ca.depth}};
  });
}

// 8: f = e^-t. A flat stretch of m across the first large odd/odd gap.
inline CheckResult check_non_positive_increase() {
  return detail::timed("8", "positive increase refuted", 180, [](CheckResult& r) {
    auto ca = construct(DecayTarget::exp_decay(1), 4096);
    auto gaps = large_gap_search(ca.table, BigInt(1000));
    require(!gaps.empty(), ErrorKind::TableExhausted, "no large odd/odd gap in the constructed table");
    std::vector<double> etas = {4, 10, 40, 100, 400, 1000, 4000, 10000};
    auto gc = growth_curve(ca.alpha, etas, 1e-3, 128);
    // Certified ratio: m_upper(lambda eta) / m_lower(eta).
    double best = INFINITY, bl = 0, be = 0;
    for (std::size_t i = 0; i < etas.size(); ++i)
      for (std::size_t j = i + 1; j < etas.size(); ++j) {
        double lam = etas[j] / etas[i];
        if (lam < 10) continue;
        double q = gc.points[j].m_upper.upper_double() / gc.points[i].m_lower.lower_double();
        if (q < best) {
          best = q;
          bl = lam;
          be = etas[i];
        }
      }
    auto pi = positive_increase_estimate(MonotoneFn::from_curve(gc, MonotoneFn::Side::Upper), {1, 2, 10, 100, 1000},
                                         etas);
    r.passed = best < 2 && !pi.flat.empty() && !pi.certified;
    r.detail = "m(" + detail::num(bl) + " eta)/m(eta) <= " + detail::num(best, 6) + " at eta=" + detail::num(be) +
               "; estimator alpha_hat " + detail::num(pi.alpha_hat, 4) + ", " + std::to_string(pi.flat.size()) +
               " flat witnesses; gap after odd/odd n=" + std::to_string(gaps.front());
    r.data = {{"ratio", best}, {"lambda", bl}, {"eta", be}, {"estimate", to_json(pi)}};
  });
}

// 9: closed-form rate checks.
inline CheckResult check_rate_formulas() {
  return detail::timed("9", "rate formulas", 1, [](CheckResult& r) {
    auto p = predict(MonotoneFn::power(2), DecayKind::RSSUpper, 1, 1, {1e2, 1e4, 1e6});
    double rss = 0;
    for (auto [t, b] : p.rows) rss = std::max(rss, std::abs(b - 1 / std::sqrt(t)));
    const double eps = 0.1;
    auto M = MonotoneFn::power_log(1, 2, 2 + eps, 0, 1.5);
    auto L = m_log(M);
    double bd = 0;
    for (double y : {10.0, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e9}) bd = std::max(bd, std::abs(L(invert(L, y)) - y) / y);
    auto q = predict(M, DecayKind::BattyDuyckaerts, 1, 1, {10, 1e3, 1e5});
    bool dec = q.rows[0].second > q.rows[1].second && q.rows[1].second > q.rows[2].second;
    r.passed = rss <= 1e-9 && bd <= 1e-6 && dec;
    r.detail = "RSS |bound - t^-1/2| <= " + detail::num(rss, 3) + "; M_log(M_log^-1(y)) rel err <= " +
               detail::num(bd, 3) + "; BD bounds decreasing " + (dec ? "yes" : "no");
    r.data = {{"rss_error", rss}, {"bd_rel_error", bd}};
  });
}

// 10: boundary determinant of the universal system against the closed form.
inline CheckResult check_phs_cross() {
  return detail::timed("10", "port-Hamiltonian cross-check", 10, [](CheckResult& r) {
    const double alpha = std::sqrt(2.0);
    auto s = universal_system(alpha);
    // The system's T is the conjugate of the closed form: compare with
    // 1 + (e^{-it} + e^{-i alpha t}) / 2, evaluated in 128-bit MPFR.
    mpfr_t t, at, c1, s1, c2, s2, al;
    mpfr_inits2(128, t, at, c1, s1, c2, s2, al, static_cast<mpfr_ptr>(nullptr));
    mpfr_sqrt_ui(al, 2, MPFR_RNDN);
    double worst = 0, worst_t = 0;
    for (int i = 0; i < 10000; ++i) {
      const double td = 0.1 * i;
      mpfr_set_d(t, td, MPFR_RNDN);
      mpfr_mul(at, al, t, MPFR_RNDN);
      mpfr_sin_cos(s1, c1, t, MPFR_RNDN);
      mpfr_sin_cos(s2, c2, at, MPFR_RNDN);
      double re = 1 + 0.5 * (mpfr_get_d(c1, MPFR_RNDN) + mpfr_get_d(c2, MPFR_RNDN));
      double im = -0.5 * (mpfr_get_d(s1, MPFR_RNDN) + mpfr_get_d(s2, MPFR_RNDN));
      cplx got = boundary_matrix(s, td).determinant();
      double e = std::abs(got - cplx(re, im));
      if (e > worst) {
        worst = e;
        worst_t = td;
      }
    }
    mpfr_clears(t, at, c1, s1, c2, s2, al, static_cast<mpfr_ptr>(nullptr));
    r.passed = worst <= 1e-12;
    r.detail = "max |det - closed form| " + detail::num(worst, 3) + " at t=" + detail::num(worst_t) +
               " over 10^4 points t = 0, 0.1, ..., 999.9 (conjugate convention)";
    r.data = {{"max_error", worst}, {"t", worst_t}};
  });
}

// 11: resolvent residuals at 4096 nodes and under node doubling.
inline CheckResult check_resolvent_consistency() {
  return detail::timed("11", "resolvent self-consistency", 30, [](CheckResult& r) {
    auto s = universal_system(std::sqrt(2.0));
    auto f = [](double) { return VecC(VecC::Ones(2)); };
    const double floor = 1e-12;  // residuals stop improving at roundoff / FD truncation
    r.passed = true;
    std::ostringstream os;
    nlohmann::json hist = nlohmann::json::object();
    for (double t : {1.0, 10.0, 100.0}) {
      ResolventOptions o;
      o.nodes = 4096;
      o.max_nodes = 4096;
      auto res = resolvent_solve(s, t, f, o);
      auto levels = resolvent_convergence(s, t, f, 16, 4096);
      bool mono = true;
      for (std::size_t i = 1; i < levels.size(); ++i) {
        mono = mono && levels[i].boundary_residual <= levels[i - 1].boundary_residual + floor &&
               levels[i].ode_residual <= levels[i - 1].ode_residual + floor;
      }
      bool ok = res.nodes == 4096 && res.boundary_residual <= 1e-8 && res.ode_residual <= 1e-8 && mono;
      r.passed = r.passed && ok;
      os << "t=" << t << ": bc " << detail::num(res.boundary_residual, 2) << ", ode "
         << detail::num(res.ode_residual, 2) << (mono ? ", monotone" : ", NOT monotone") << "; ";
      nlohmann::json lv = nlohmann::json::array();
      for (const auto& l : levels) lv.push_back({l.nodes, l.boundary_residual, l.ode_residual});
      hist[detail::num(t)] = lv;
    }
    r.detail = os.str() + "doubling 16..4096, noise floor 1e-12";
    r.data = hist;
  });
}

// 12: probe lower bounds against Ctilde (||T^-1|| + 1), t = 1..50.
inline CheckResult check_characterisation(unsigned jobs = 1) {
  return detail::timed("12", "characterisation lower side", 120, [jobs](CheckResult& r) {
    auto s = universal_system(std::sqrt(2.0));
    std::vector<double> ts;
    for (int t = 1; t <= 50; ++t) ts.push_back(t);
    CharOptions o;
    o.jobs = jobs;
    auto cc = char_constants(s, ts, o);
    std::size_t bad = 0;
    double worst = 0;
    for (const auto& row : cc.rows) {
      bad += !row.lower_ok;
      worst = std::max(worst, row.R_lower / (cc.Ctilde * (row.inv_norm_T + 1)));
    }
    r.passed = bad == 0 && cc.rows.size() == 50;
    r.detail = std::to_string(cc.rows.size() - bad) + "/50 rows ok; Ctilde " + detail::num(cc.Ctilde) +
               "; largest R_lower / (Ctilde (||T^-1|| + 1)) " + detail::num(worst, 4);
    r.data = {{"Ctilde", cc.Ctilde}, {"worst_fraction", worst}};
  });
}

// S: random 256-bit decimals in (1,2) and the criterion-5 slope.
inline CheckResult check_sampled(const VerifyOptions& opt = {}) {
  const double limit = 60.0 * static_cast<double>(std::max(1L, opt.sampled_count));
  return detail::timed("S", "sampled a.e. growth", limit, [&opt](CheckResult& r) {
    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<int> digit(0, 9);
    const auto& etas = detail::c5_etas();
    std::size_t outliers = 0;
    double smax = 0, smin = INFINITY;
    nlohmann::json rows = nlohmann::json::array();
    std::string flagged_list;
    for (long k = 0; k < opt.sampled_count; ++k) {
      std::string d = "1.";
      for (int i = 0; i < 78; ++i) d.push_back(static_cast<char>('0' + digit(rng)));
      nlohmann::json row = {{"alpha", d.substr(0, 20) + "..."}};
      try {
        auto gc = growth_curve(IrrationalSpec::decimal(d, 256), etas, 1e-3, 256);
        std::vector<double> mid;
        for (const auto& p : gc.points) mid.push_back(std::sqrt(p.m_lower.lower_double() * p.m_upper.upper_double()));
        double s = detail::slope_loglog(etas, mid);
        smax = std::max(smax, s);
        smin = std::min(smin, s);
        row["slope"] = s;
        if (s > 2.3) {
          ++outliers;
          row["outlier"] = true;
          flagged_list += " " + d.substr(0, 12) + "..(" + detail::num(s, 3) + ")";
        }
      } catch (const Error& e) {
        ++outliers;
        row["error"] = e.what();
        flagged_list += " " + d.substr(0, 12) + "..(error)";
      }
      rows.push_back(row);
    }
    // Outliers are flagged; a majority of outliers would contradict the a.e. claim.
    r.flagged = outliers > 0;
    r.passed = 2 * outliers <= static_cast<std::size_t>(opt.sampled_count);
    r.detail = std::to_string(opt.sampled_count - static_cast<long>(outliers)) + "/" +
               std::to_string(opt.sampled_count) + " with slope <= 2.3; slopes in [" + detail::num(smin, 4) + ", " +
               detail::num(smax, 4) + "], seed " + std::to_string(opt.seed) +
               (flagged_list.empty() ? "" : "; flagged:" + flagged_list);
    r.data = {{"rows", rows}, {"outliers", outliers}};
  });
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> n = {"appendix", "sandwich", "growth", "rational", "construction",
                                             "gaps",     "rates",    "phs",    "sampled",  "all"};
  return n;
}

inline std::vector<CheckResult> run_suite(const std::string& name, const VerifyOptions& opt = {}) {
  std::vector<CheckResult> out;
  const bool all = name == "all";
  bool known = all;
  auto want = [&](const char* s) {
    bool w = all || name == s;
    known = known || w;
    return w;
  };
  if (want("appendix")) {
    out.push_back(check_convergent_identities());
    out.push_back(check_odd_odd_stream());
  }
  if (want("sandwich")) {
    out.push_back(check_sandwich_upper(opt.jobs));
    out.push_back(check_sandwich_lower(opt.jobs));
  }
  if (want("growth")) out.push_back(check_quadratic_growth());
  if (want("rational")) out.push_back(check_rational_singularity(opt.jobs));
  if (want("construction")) out.push_back(check_construction_fidelity());
  if (want("gaps")) out.push_back(check_non_positive_increase());
  if (want("rates")) out.push_back(check_rate_formulas());
  if (want("phs")) {
    out.push_back(check_phs_cross());
    out.push_back(check_resolvent_consistency());
    out.push_back(check_characterisation(opt.jobs));
  }
  if (want("sampled")) out.push_back(check_sampled(opt));
  require(known, ErrorKind::InvalidArgument, "unknown suite '" + name + "'");
  return out;
}

}  // namespace semiuniform
