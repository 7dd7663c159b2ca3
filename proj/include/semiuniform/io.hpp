#pragma once

/**
 * @file io.hpp
 * @brief File formats: CSV tables and JSON reports.
 *
 * CSV columns
 *   convergents   n,a,p,q,lower_ok,upper_ok,lower_margin,upper_margin
 *   growth        eta,m_lower,m_upper
 *   sandwich      v,u,dist,inf_lower,inf_upper,ratio_lo,ratio_hi
 *   prediction    t,bound,kind
 *   stability     t,det_abs,sigma_min,inv_norm,B
 * Certified values are printed rounded outward (lower bounds down, upper
 * bounds up), 12 significant digits.
 */

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "alpha_factory.hpp"
#include "contfrac.hpp"
#include "phs.hpp"
#include "rates.hpp"
#include "spectral.hpp"

namespace semiuniform {

inline std::string fmt_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string fmt_q(const Rational& q, int digits = 17) {
  detail::Mpfr m(static_cast<mpfr_prec_t>(4 * digits + 16));
  mpfr_set_q(m.get(), q.get_mpq_t(), MPFR_RNDN);
  return Real::format(m.get(), digits);
}

namespace detail {

inline nlohmann::json bigints(const std::vector<BigInt>& v) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& x : v) a.push_back(x.get_str());
  return a;
}

inline BigInt bigint_of(const nlohmann::json& j) {
  if (j.is_number_integer()) return BigInt(std::to_string(j.get<long long>()));
  require(j.is_string(), ErrorKind::ParseError, "integers are stored as strings");
  BigInt z;
  require(z.set_str(j.get<std::string>(), 10) == 0, ErrorKind::ParseError, "bad integer '" + j.get<std::string>() + "'");
  return z;
}

}  // namespace detail

inline nlohmann::json alpha_to_json(const IrrationalSpec& a) {
  struct V {
    nlohmann::json operator()(const QuadraticSurd& s) const {
      return {{"kind", "surd"}, {"D", s.D.get_str()}, {"p", s.p.get_str()}, {"q", s.q.get_str()}};
    }
    nlohmann::json operator()(const ExplicitQuotients& e) const {
      return {{"kind", "quotients"}, {"a", detail::bigints(e.a)}};
    }
    nlohmann::json operator()(const RuleQuotients& r) const {
      return {{"kind", "rule"},
              {"name", r.name},
              {"params", r.params},
              {"prefix", detail::bigints(r.prefix)},
              {"next_log2_lower", r.next_log2_lower}};
    }
    nlohmann::json operator()(const DecimalLiteral& d) const {
      return {{"kind", "decimal"}, {"digits", d.digits}, {"bits", d.bits}};
    }
  };
  return std::visit(V{}, a.variant());
}

inline IrrationalSpec alpha_from_json(const nlohmann::json& j) {
  require(j.is_object() && j.contains("kind"), ErrorKind::ParseError, "alpha spec needs a 'kind'");
  try {
    const std::string k = j.at("kind").get<std::string>();
    if (k == "surd")
      return IrrationalSpec::surd(detail::bigint_of(j.at("D")), detail::bigint_of(j.value("p", nlohmann::json("0"))),
                                  detail::bigint_of(j.value("q", nlohmann::json("1"))));
    if (k == "quotients") {
      std::vector<BigInt> a;
      for (const auto& x : j.at("a")) a.push_back(detail::bigint_of(x));
      return IrrationalSpec::quotients(std::move(a));
    }
    if (k == "rule") {
      std::vector<BigInt> a;
      for (const auto& x : j.at("prefix")) a.push_back(detail::bigint_of(x));
      return IrrationalSpec::rule(j.at("name").get<std::string>(), j.value("params", nlohmann::json::object()),
                                  std::move(a), j.value("next_log2_lower", 0L));
    }
    if (k == "decimal") return IrrationalSpec::decimal(j.at("digits").get<std::string>(), j.at("bits").get<long>());
    fail(ErrorKind::ParseError, "unknown alpha kind '" + k + "'");
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, std::string("alpha spec: ") + e.what());
  }
}

inline void write_convergents_csv(std::ostream& os, const ConvergentTable& t, const BoundsReport* b = nullptr) {
  os << "n,a,p,q,lower_ok,upper_ok,lower_margin,upper_margin\n";
  for (std::size_t n = 0; n < t.size(); ++n) {
    os << n << ',' << t.a[n].get_str() << ',' << t.c[n].p.get_str() << ',' << t.c[n].q.get_str();
    if (b && n < b->rows.size()) {
      const auto& r = b->rows[n];
      os << ',' << (r.lower_ok ? 1 : 0) << ',' << (r.upper_ok ? 1 : 0) << ',' << fmt_double(r.lower_margin) << ','
         << fmt_double(r.upper_margin);
    } else {
      os << ",,,,";
    }
    os << '\n';
  }
}

inline void write_growth_csv(std::ostream& os, const GrowthCurve& gc) {
  os << "eta,m_lower,m_upper\n";
  for (const auto& p : gc.points) {
    os << fmt_double(p.eta) << ',' << p.m_lower.lower_string() << ',' << p.m_upper.upper_string() << '\n';
  }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline Real real_from_string(const std::string& s, mpfr_rnd_t rnd, mpfr_prec_t prec = 128) {
  Real r(prec);
  require(mpfr_set_str(r.mid_mut(), s.c_str(), 10, rnd) == 0 || mpfr_number_p(r.mid()), ErrorKind::ParseError,
          "bad number '" + s + "'");
  return r;
}

}  // namespace detail

inline GrowthCurve read_growth_csv(std::istream& is) {
  GrowthCurve gc;
  std::string line;
  require(static_cast<bool>(std::getline(is, line)), ErrorKind::ParseError, "empty growth CSV");
  require(line.rfind("eta,m_lower,m_upper", 0) == 0, ErrorKind::ParseError, "growth CSV header must be eta,m_lower,m_upper");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto c = detail::split_csv_line(line);
    require(c.size() >= 3, ErrorKind::ParseError, "growth CSV row needs 3 columns: " + line);
    GrowthPoint p;
    p.eta = std::stod(c[0]);
    p.m_lower = detail::real_from_string(c[1], MPFR_RNDD);
    p.m_upper = detail::real_from_string(c[2], MPFR_RNDU);
    gc.points.push_back(std::move(p));
  }
  require(!gc.points.empty(), ErrorKind::ParseError, "growth CSV has no rows");
  gc.alpha = "csv";
  return gc;
}

inline void write_sandwich_csv(std::ostream& os, const std::vector<SandwichRow>& rows) {
  os << "v,u,dist,inf_lower,inf_upper,ratio_lo,ratio_hi\n";
  for (const auto& r : rows) {
    os << r.v.get_str() << ',' << r.u.get_str() << ',' << fmt_q((r.dist_lo + r.dist_hi) / 2) << ','
       << r.inf.lower.lower_string() << ',' << r.inf.upper.upper_string() << ',' << r.ratio_lo.lower_string() << ','
       << r.ratio_hi.upper_string() << '\n';
  }
}

inline void write_prediction_csv(std::ostream& os, const DecayPrediction& p) {
  os << "t,bound,kind\n";
  for (const auto& [t, b] : p.rows) os << fmt_double(t) << ',' << fmt_double(b) << ',' << to_string(p.kind) << '\n';
}

inline nlohmann::json to_json(const DecayPrediction& p) {
  nlohmann::json j = {{"kind", to_string(p.kind)}, {"c", p.c},           {"C", p.C},
                      {"theorem", p.theorem},      {"label", p.label},   {"fn", p.fn_name}};
  if (p.certificate) j["certificate"] = to_json(*p.certificate);
  return j;
}

inline void write_stability_csv(std::ostream& os, const StabilityReport& r) {
  os << "t,det_abs,sigma_min,inv_norm,B\n";
  for (const auto& x : r.rows)
    os << fmt_double(x.t) << ',' << fmt_double(x.det_abs) << ',' << fmt_double(x.sigma_min) << ','
       << fmt_double(x.inv_norm) << ',' << fmt_double(x.B) << '\n';
}

inline nlohmann::json to_json(const StabilityReport& r) {
  return {{"points", r.rows.size()},         {"resolution", r.resolution},
          {"B", r.B},                        {"min_sigma", r.min_sigma},
          {"min_det", r.min_det},            {"t_at_min", r.t_at_min},
          {"refined", r.refined},            {"invertible_on_grid", r.invertible_on_grid},
          {"verdict", r.verdict}};
}

inline nlohmann::json to_json(const CharConstants& c) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : c.rows) {
    nlohmann::json x = {{"t", r.t},           {"inv_norm_T", r.inv_norm_T}, {"B_t", r.B_t},
                        {"R_lower", r.R_lower}, {"best_probe", r.best_probe}, {"lower_ok", r.lower_ok}};
    if (r.R_upper_est) x["R_upper_estimate"] = *r.R_upper_est;
    if (r.upper_ok) x["upper_ok"] = *r.upper_ok;
    rows.push_back(x);
  }
  nlohmann::json j = {{"B", c.B},
                      {"norm_W", c.normW},
                      {"norm_W_pinv", c.normWp},
                      {"norm_P1", c.normP1},
                      {"norm_P1_inv", c.normP1inv},
                      {"norm_H_inf", c.normH},
                      {"norm_S", c.normS},
                      {"norm_S_note", c.S_note},
                      {"C_tilde", c.Ctilde},
                      {"C", c.C},
                      {"b_growing", c.b_growing},
                      {"warnings", c.warnings},
                      {"rows", rows},
                      {"ok", c.ok()}};
  if (c.structural_B) j["structural_B"] = *c.structural_B;
  return j;
}

inline nlohmann::json to_json(const ConstructedAlpha& ca) {
  return {{"f", to_json(ca.f)},
          {"bit_budget", ca.bit_budget},
          {"depth", ca.depth},
          {"stop_reason", ca.stop_reason},
          {"alpha", alpha_to_json(ca.alpha)}};
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::InvalidArgument, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::InvalidArgument, "cannot write '" + path + "'");
  out << data;
}

}  // namespace semiuniform
