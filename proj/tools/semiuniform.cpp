// semiuniform: command-line front end.
//
// Exit codes: 0 success, 1 verification failure, 2 input or precondition error.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <semiuniform/semiuniform.hpp>

using namespace semiuniform;
using nlohmann::json;

namespace {

constexpr int kOk = 0, kVerifyFailed = 1, kInputError = 2;

struct Output {
  std::string path;  // "-" is stdout
  std::string data;
};

struct Run {
  std::string sub;
  json params = json::object();
  json tolerances = json::object();
  json extra = json::object();
  long bits = 0;
  std::string bits_source;
  std::vector<Output> outputs;
  int status = kOk;
};

std::string fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json versions() {
  return {{"semiuniform", kVersion},
          {"gmp", gmp_version},
          {"mpfr", mpfr_get_version()},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"cli11", CLI11_VERSION}};
}

// --bits default: SEMIUNIFORM_BITS when set, else the per-command fallback.
struct Bits {
  long value = 0;
  std::string source;
};

Bits default_bits(long fallback) {
  const char* env = std::getenv("SEMIUNIFORM_BITS");
  if (!env || !*env) return {fallback, "default"};
  char* end = nullptr;
  long v = std::strtol(env, &end, 10);
  require(end && *end == '\0' && v > 0, ErrorKind::InvalidArgument,
          std::string("SEMIUNIFORM_BITS must be a positive integer, got '") + env + "'");
  return {v, "env SEMIUNIFORM_BITS"};
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string x;
  while (std::getline(ss, x, sep))
    if (!x.empty()) out.push_back(x);
  return out;
}

BigInt parse_int(const std::string& s) {
  BigInt z;
  require(!s.empty() && z.set_str(s, 10) == 0, ErrorKind::ParseError, "bad integer '" + s + "'");
  return z;
}

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  double x = 0;
  try {
    x = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  require(pos == s.size() && pos > 0, ErrorKind::ParseError, "bad number '" + s + "'");
  return x;
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& x : split(s, ',')) out.push_back(parse_double(x));
  require(!out.empty(), ErrorKind::InvalidArgument, "empty number list");
  return out;
}

// "lo:hi:n" (n evenly spaced points, endpoints included) or a comma list.
std::vector<double> parse_grid(const std::string& s) {
  auto parts = split(s, ':');
  if (parts.size() == 3) {
    double lo = parse_double(parts[0]), hi = parse_double(parts[1]);
    long n = parse_int(parts[2]).get_si();
    require(n >= 1 && hi >= lo, ErrorKind::InvalidArgument, "grid needs lo <= hi and n >= 1");
    std::vector<double> g;
    for (long i = 0; i < n; ++i) g.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    return g;
  }
  return parse_doubles(s);
}

// "1..199" (odd values in range) or a comma list.
std::vector<BigInt> parse_odd_v(const std::string& s) {
  std::vector<BigInt> out;
  auto dots = s.find("..");
  if (dots != std::string::npos) {
    BigInt lo = parse_int(s.substr(0, dots)), hi = parse_int(s.substr(dots + 2));
    require(lo >= 1 && hi >= lo, ErrorKind::InvalidArgument, "odd-v range needs 1 <= lo <= hi");
    if (is_even(lo)) lo += 1;
    for (BigInt v = lo; v <= hi; v += 2) out.push_back(v);
  } else {
    for (const auto& x : split(s, ',')) out.push_back(parse_int(x));
  }
  require(!out.empty(), ErrorKind::InvalidArgument, "no odd v given");
  return out;
}

struct AlphaOpts {
  std::vector<std::string> surd;
  std::string quotients, decimal, rational, alpha_json;
  bool golden = false;
  long decimal_bits = 0;

  void add(CLI::App* sc) {
    sc->add_option("--surd", surd, "(p + sqrt D)/q given as D [p q]")->expected(1, 3);
    sc->add_flag("--golden", golden, "golden ratio (1 + sqrt 5)/2");
    sc->add_option("--quotients", quotients, "explicit quotient list a0,a1,...");
    sc->add_option("--decimal", decimal, "decimal literal; accuracy from --decimal-bits or --bits");
    sc->add_option("--decimal-bits", decimal_bits, "guaranteed bits of the decimal literal");
    sc->add_option("--rational", rational, "p/q");
    sc->add_option("--alpha-json", alpha_json, "alpha spec JSON (as written by construct --alpha-out)");
  }

  IrrationalSpec resolve(long bits) const {
    int n = !surd.empty() + golden + !quotients.empty() + !decimal.empty() + !rational.empty() + !alpha_json.empty();
    require(n == 1, ErrorKind::InvalidArgument,
            "give exactly one of --surd, --golden, --quotients, --decimal, --rational, --alpha-json");
    if (!surd.empty()) {
      require(surd.size() == 1 || surd.size() == 3, ErrorKind::InvalidArgument, "--surd takes D or D p q");
      if (surd.size() == 1) return IrrationalSpec::surd(parse_int(surd[0]), 0, 1);
      return IrrationalSpec::surd(parse_int(surd[0]), parse_int(surd[1]), parse_int(surd[2]));
    }
    if (golden) return IrrationalSpec::golden();
    if (!quotients.empty()) {
      std::vector<BigInt> a;
      for (const auto& x : split(quotients, ',')) a.push_back(parse_int(x));
      return IrrationalSpec::quotients(std::move(a));
    }
    if (!decimal.empty()) return IrrationalSpec::decimal(decimal, decimal_bits > 0 ? decimal_bits : bits);
    if (!rational.empty()) {
      auto pq = split(rational, '/');
      require(pq.size() == 2, ErrorKind::ParseError, "--rational takes p/q");
      return IrrationalSpec::rational(parse_int(pq[0]), parse_int(pq[1]));
    }
    json j;
    try {
      j = json::parse(read_file(alpha_json));
    } catch (const json::exception& e) {
      fail(ErrorKind::ParseError, alpha_json + ": " + e.what());
    }
    return alpha_from_json(j.contains("alpha") ? j.at("alpha") : j);
  }
};

void emit(Run& run, const std::string& path, std::string data) { run.outputs.push_back({path, std::move(data)}); }

// ---- subcommands ----

struct CfOpts {
  AlphaOpts alpha;
  std::size_t terms = 20;
  std::optional<long> bits;
  std::string out = "-";
};

void cmd_cf(const CfOpts& o, Run& run) {
  Bits b = o.bits ? Bits{*o.bits, "flag"} : default_bits(128);
  run.bits = b.value;
  run.bits_source = b.source;
  require(o.terms >= 1, ErrorKind::InvalidArgument, "--terms must be >= 1");
  IrrationalSpec alpha = o.alpha.resolve(b.value);
  run.params = {{"alpha", alpha_to_json(alpha)}, {"terms", o.terms}};
  ConvergentTable t = expand(alpha, o.terms);
  std::optional<BoundsReport> br;
  if (t.size() >= 2) br = check_bounds(t);
  // Rows shown: the first `terms` convergents; bounds need a successor.
  ConvergentTable shown = t;
  shown.a.resize(std::min(t.a.size(), o.terms));
  shown.c.resize(std::min(t.c.size(), o.terms));
  std::ostringstream os;
  write_convergents_csv(os, shown, br ? &*br : nullptr);
  emit(run, o.out, os.str());

  std::size_t bad = 0;
  if (br) {
    for (const auto& r : br->rows) {
      if (r.n >= shown.size()) break;
      // A finite expansion meets its final bound with equality.
      if (t.terminated && r.n + 2 == t.size()) continue;
      bad += !(r.lower_ok && r.upper_ok);
    }
  }
  run.extra = {{"rows", shown.size()}, {"terminated", t.terminated}, {"bound_violations", bad}};
  if (t.terminated)
    std::cerr << "terminated: rational source has " << t.size() << " convergents (final pair is an equality case)\n";
  if (bad) {
    std::cerr << bad << " convergent bound violation(s)\n";
    run.status = kVerifyFailed;
  }
}

struct ConstructOpts {
  std::optional<double> exp_beta;
  std::vector<double> powerlog;
  std::string table;
  std::optional<long> bits;
  std::string out = "-";
  std::string alpha_out;
};

DecayTarget read_table_target(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::vector<std::pair<double, double>> pts;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto c = split(line, ',');
    require(c.size() >= 2, ErrorKind::ParseError, "table row needs t,f: " + line);
    if (first) {
      first = false;
      if (c[0] == "t") continue;
    }
    pts.emplace_back(parse_double(c[0]), parse_double(c[1]));
  }
  return DecayTarget::table(std::move(pts));
}

void cmd_construct(const ConstructOpts& o, Run& run) {
  Bits b = o.bits ? Bits{*o.bits, "flag"} : default_bits(4096);
  run.bits = b.value;
  run.bits_source = b.source;
  int n = o.exp_beta.has_value() + !o.powerlog.empty() + !o.table.empty();
  require(n == 1, ErrorKind::InvalidArgument, "give exactly one of --exp, --powerlog, --table");
  DecayTarget f = o.exp_beta ? DecayTarget::exp_decay(*o.exp_beta)
                  : !o.powerlog.empty()
                      ? (require(o.powerlog.size() == 2, ErrorKind::InvalidArgument, "--powerlog takes p s"),
                         DecayTarget::power_log(o.powerlog[0], o.powerlog[1]))
                      : read_table_target(o.table);
  run.params = {{"f", to_json(f)}, {"budget", b.value}};
  ConstructedAlpha ca = construct(f, b.value);
  std::ostringstream os;
  os << "n,a,q_bits,parity\n";
  for (std::size_t i = 0; i < ca.table.size(); ++i)
    os << i << ',' << ca.table.a[i].get_str() << ',' << bit_length(ca.table.c[i].q) << ','
       << parity_shape(ca.table.c[i]) << '\n';
  emit(run, o.out, os.str());
  if (!o.alpha_out.empty()) emit(run, o.alpha_out, to_json(ca).dump(2) + "\n");
  run.extra = {{"depth", ca.depth}, {"stop_reason", ca.stop_reason}};
  std::cerr << "depth " << ca.depth << ", stopped: " << ca.stop_reason << '\n';
}

struct GrowthOpts {
  AlphaOpts alpha;
  std::string etas;
  double tol = 1e-3;
  std::optional<long> bits;
  std::string out = "-";
};

void cmd_growth(const GrowthOpts& o, Run& run) {
  Bits b = o.bits ? Bits{*o.bits, "flag"} : default_bits(128);
  run.bits = b.value;
  run.bits_source = b.source;
  IrrationalSpec alpha = o.alpha.resolve(b.value);
  auto etas = parse_doubles(o.etas);
  run.params = {{"alpha", alpha_to_json(alpha)}, {"etas", etas}};
  run.tolerances = {{"relative", o.tol}};
  GrowthCurve gc = growth_curve(alpha, etas, o.tol, b.value);
  std::ostringstream os;
  write_growth_csv(os, gc);
  emit(run, o.out, os.str());
  run.extra = {{"evaluations", gc.evaluations}};
}

struct RatesOpts {
  std::string curve, side = "upper", kind, ts;
  std::optional<double> power;
  double log_power = 0;
  double c = 1, C = 1;
  double c_floor = 1;
  std::string lambdas = "1,2,4,10";
  std::string out = "-", json_out;
};

void cmd_rates(const RatesOpts& o, Run& run) {
  run.bits_source = "unused";
  require(o.curve.empty() != !o.power.has_value(), ErrorKind::InvalidArgument, "give exactly one of --curve, --power");
  std::optional<MonotoneFn> M;
  if (o.power) {
    M = MonotoneFn::power_log(1, *o.power, o.log_power);
  } else {
    std::istringstream in(read_file(o.curve));
    GrowthCurve gc = read_growth_csv(in);
    auto side = o.side == "lower" ? MonotoneFn::Side::Lower
                : o.side == "mid" ? MonotoneFn::Side::Mid
                : (require(o.side == "upper", ErrorKind::InvalidArgument, "--side is lower, upper or mid"),
                   MonotoneFn::Side::Upper);
    M = MonotoneFn::from_curve(gc, side);
  }
  DecayKind k = decay_kind_from_string(o.kind);
  auto ts = parse_doubles(o.ts);
  run.params = {{"M", M->name()}, {"kind", to_string(k)}, {"c", o.c}, {"C", o.C}, {"ts", ts}, {"side", o.side}};
  std::optional<PositiveIncrease> cert;
  if (k == DecayKind::RSSUpper) {
    // Same log grid as the library default, with the caller's floor on c.
    double lo = std::max(M->lo(), 1.0);
    double hi = std::isfinite(M->hi()) ? M->hi() : 1e6;
    std::vector<double> grid;
    for (double t = lo; t * 10 <= hi * (1 + 1e-12); t *= std::sqrt(10.0)) grid.push_back(t);
    if (grid.empty()) grid.push_back(lo);
    cert = positive_increase_estimate(*M, parse_doubles(o.lambdas), grid, 0, o.c_floor);
    run.params["c_floor"] = o.c_floor;
    run.params["lambdas"] = o.lambdas;
  }
  DecayPrediction p = predict(*M, k, o.c, o.C, ts, cert);
  std::ostringstream os;
  write_prediction_csv(os, p);
  emit(run, o.out, os.str());
  if (!o.json_out.empty()) emit(run, o.json_out, to_json(p).dump(2) + "\n");
  std::cerr << p.label << " (" << p.theorem << ")\n";
}

struct SandwichOpts {
  AlphaOpts alpha;
  std::string odd_v;
  double tol = 1e-6;
  std::optional<long> bits;
  std::string out = "-";
};

void cmd_sandwich(const SandwichOpts& o, Run& run, unsigned jobs) {
  Bits b = o.bits ? Bits{*o.bits, "flag"} : default_bits(128);
  run.bits = b.value;
  run.bits_source = b.source;
  IrrationalSpec alpha = o.alpha.resolve(b.value);
  auto vs = parse_odd_v(o.odd_v);
  run.params = {{"alpha", alpha_to_json(alpha)}, {"odd_v", o.odd_v}};
  InfOptions io;
  io.tol = o.tol;
  run.tolerances = {{"absolute", io.tol}, {"relative", io.rel}};
  auto rows = sandwich_report(alpha, vs, io, b.value, jobs);
  std::ostringstream os;
  write_sandwich_csv(os, rows);
  emit(run, o.out, os.str());
  std::size_t bad = 0;
  double mn = INFINITY;
  for (const auto& r : rows) {
    bad += !r.upper_ok;
    mn = std::min(mn, r.ratio_lo.lower_double());
  }
  run.extra = {{"upper_violations", bad}, {"min_ratio_lo", mn}, {"constant", rows.front().constant.to_double()}};
  std::cerr << rows.size() - bad << "/" << rows.size() << " rows within " << rows.front().constant.mid_string(8)
            << " dist^2; min ratio_lo " << mn << '\n';
  if (bad) run.status = kVerifyFailed;
}

struct PhsOpts {
  std::string config, universal, grid;
  std::size_t char_points = 8;
  bool upper_estimate = false;
  std::string out = "-", csv;
};

void cmd_phs(const PhsOpts& o, Run& run, unsigned jobs) {
  run.bits_source = "unused";
  require(o.config.empty() != o.universal.empty(), ErrorKind::InvalidArgument,
          "give exactly one of --config, --universal");
  PHSystem s;
  if (!o.config.empty()) {
    json j;
    try {
      j = json::parse(read_file(o.config));
    } catch (const json::exception& e) {
      fail(ErrorKind::ParseError, o.config + ": " + e.what());
    }
    s = phs_from_json(j);
  } else {
    s = universal_system(o.universal == "sqrt2" ? std::sqrt(2.0) : parse_double(o.universal));
  }
  validate(s);
  auto grid = parse_grid(o.grid);
  run.params = {{"system", to_json(s)}, {"grid", o.grid}, {"char_points", o.char_points}};
  ScanOptions so;
  so.jobs = jobs;
  run.tolerances = {{"singular_tol", so.singular_tol}};
  StabilityReport rep = stability_scan(s, grid, so);
  json j = {{"system", s.name}, {"stability", to_json(rep)}};
  if (o.char_points > 0) {
    std::vector<double> ts;
    const std::size_t n = std::min(o.char_points, grid.size());
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t k = n == 1 ? 0 : i * (grid.size() - 1) / (n - 1);
      ts.push_back(grid[k]);
    }
    CharOptions co;
    co.jobs = jobs;
    co.upper_estimate = o.upper_estimate;
    j["constants"] = to_json(char_constants(s, ts, co));
  }
  emit(run, o.out, j.dump(2) + "\n");
  if (!o.csv.empty()) {
    std::ostringstream os;
    write_stability_csv(os, rep);
    emit(run, o.csv, os.str());
  }
  std::cerr << rep.verdict << '\n';
}

struct VerifyCliOpts {
  std::string suite = "all";
  long samples = 20;
  std::uint64_t seed = VerifyOptions{}.seed;
  std::string out;
};

void cmd_verify(const VerifyCliOpts& o, Run& run, unsigned jobs) {
  run.bits_source = "fixed per check";
  VerifyOptions vo;
  vo.jobs = jobs;
  vo.sampled_count = o.samples;
  vo.seed = o.seed;
  run.params = {{"suite", o.suite}, {"samples", o.samples}, {"seed", o.seed}};
  auto results = run_suite(o.suite, vo);
  std::ostringstream lines;
  json arr = json::array();
  bool ok = true;
  for (const auto& r : results) {
    // Output stays reproducible: timings go to stderr only.
    CheckResult q = r;
    q.seconds = 0;
    std::string line = summary_line(q);
    line = line.substr(0, line.rfind(" ("));
    lines << line << '\n';
    std::fprintf(stderr, "  criterion %s took %.2f s\n", r.id.c_str(), r.seconds);
    json jr = to_json(r);
    jr.erase("seconds");
    arr.push_back(jr);
    ok = ok && r.passed;
  }
  lines << (ok ? "all " : "some ") << "checks " << (ok ? "passed" : "FAILED") << " (" << results.size() << ")\n";
  emit(run, "-", lines.str());
  if (!o.out.empty()) emit(run, o.out, json{{"suite", o.suite}, {"results", arr}}.dump(2) + "\n");
  if (!ok) run.status = kVerifyFailed;
}

// ---- driver ----

struct Global {
  unsigned jobs = 1;
  std::string manifest;
  bool no_manifest = false;
};

void flush(const Run& run) {
  for (const auto& o : run.outputs) {
    if (o.path == "-") {
      std::cout << o.data;
      std::cout.flush();
    } else {
      write_file(o.path, o.data);
    }
  }
}

json manifest_of(const Run& run, const std::vector<std::string>& args, const Global& g) {
  json outs = json::array();
  for (const auto& o : run.outputs) outs.push_back({{"path", o.path}, {"bytes", o.data.size()}, {"fnv1a64", fnv1a(o.data)}});
  const char* env = std::getenv("SEMIUNIFORM_BITS");
  return {{"tool", "semiuniform"},
          {"subcommand", run.sub},
          {"argv", args},
          {"env", {{"SEMIUNIFORM_BITS", env ? json(env) : json(nullptr)}}},
          {"parameters", run.params},
          {"bits", {{"value", run.bits}, {"source", run.bits_source}}},
          {"tolerances", run.tolerances},
          {"jobs", g.jobs},
          {"versions", versions()},
          {"outputs", outs},
          {"result", run.extra},
          {"exit_code", run.status}};
}

int replay(const std::string& path);

// Parses and runs one command line (args exclude the program name).
int run_cli(const std::vector<std::string>& args, bool replaying, std::vector<Output>* replay_outputs) {
  CLI::App app{"Semi-uniform stability toolkit: continued fractions, resolvent growth, decay rates."};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--jobs", g.jobs, "worker threads for scans")->check(CLI::PositiveNumber);
  app.add_option("--manifest", g.manifest, "manifest path (default <output>.manifest.json)");
  app.add_flag("--no-manifest", g.no_manifest, "do not write a manifest");

  Run run;
  CfOpts cf;
  auto* s_cf = app.add_subcommand("cf", "continued fraction table with convergent bound checks");
  cf.alpha.add(s_cf);
  s_cf->add_option("--terms", cf.terms, "number of convergents");
  s_cf->add_option("--bits", cf.bits, "guaranteed bits of a --decimal literal");
  s_cf->add_option("-o,--output", cf.out, "CSV path, - for stdout");

  ConstructOpts co;
  auto* s_co = app.add_subcommand("construct", "alpha with prescribed resolvent growth");
  s_co->add_option("--exp", co.exp_beta, "f(t) = exp(-beta t)");
  s_co->add_option("--powerlog", co.powerlog, "f(t) = t^-p log(e+t)^-s, given as p s")->expected(2);
  s_co->add_option("--table", co.table, "CSV t,f with f non-increasing");
  s_co->add_option("--bits", co.bits, "bit budget for q_n (default 4096)");
  s_co->add_option("-o,--output", co.out, "quotients CSV path");
  s_co->add_option("--alpha-out", co.alpha_out, "write the alpha spec as JSON");

  GrowthOpts gr;
  auto* s_gr = app.add_subcommand("growth", "certified m(eta) brackets");
  gr.alpha.add(s_gr);
  s_gr->add_option("--etas", gr.etas, "increasing comma list")->required();
  s_gr->add_option("--tol", gr.tol, "relative bracket width");
  s_gr->add_option("--bits", gr.bits, "working precision");
  s_gr->add_option("-o,--output", gr.out, "CSV path");

  RatesOpts ra;
  auto* s_ra = app.add_subcommand("rates", "decay-rate predictions from a growth function");
  s_ra->add_option("--curve", ra.curve, "growth CSV (eta,m_lower,m_upper)");
  s_ra->add_option("--side", ra.side, "curve side: lower, upper, mid");
  s_ra->add_option("--power", ra.power, "closed form M = eta^p log(e+eta)^s");
  s_ra->add_option("--log-power", ra.log_power, "s in the closed form");
  s_ra->add_option("--kind", ra.kind, "bd, rss or lower")->required();
  s_ra->add_option("--c", ra.c, "constant c");
  s_ra->add_option("--C", ra.C, "constant C");
  s_ra->add_option("--c-floor", ra.c_floor, "floor on c in the positive-increase estimate (rss)");
  s_ra->add_option("--lambdas", ra.lambdas, "lambda grid of the positive-increase estimate (rss)");
  s_ra->add_option("--ts", ra.ts, "comma list of times")->required();
  s_ra->add_option("-o,--output", ra.out, "CSV path");
  s_ra->add_option("--json", ra.json_out, "prediction and certificate JSON");

  SandwichOpts sw;
  auto* s_sw = app.add_subcommand("sandwich", "inf h near odd v against the odd distance");
  sw.alpha.add(s_sw);
  s_sw->add_option("--odd-v", sw.odd_v, "lo..hi or comma list")->required();
  s_sw->add_option("--tol", sw.tol, "certification tolerance");
  s_sw->add_option("--bits", sw.bits, "working precision");
  s_sw->add_option("-o,--output", sw.out, "CSV path");

  PhsOpts ph;
  auto* s_ph = app.add_subcommand("phs", "boundary-matrix scan and characterisation constants");
  s_ph->add_option("--config", ph.config, "system JSON");
  s_ph->add_option("--universal", ph.universal, "universal example with this alpha (number or sqrt2)");
  s_ph->add_option("--t-grid", ph.grid, "lo:hi:n or comma list")->required();
  s_ph->add_option("--char-points", ph.char_points, "grid points used for the constants (0 to skip)");
  s_ph->add_flag("--upper-estimate", ph.upper_estimate, "also estimate ||R|| by power iteration");
  s_ph->add_option("-o,--output", ph.out, "JSON path");
  s_ph->add_option("--csv", ph.csv, "stability rows CSV");

  VerifyCliOpts ve;
  auto* s_ve = app.add_subcommand("verify", "run a verification suite");
  s_ve->add_option("suite", ve.suite, "appendix, sandwich, growth, rational, construction, gaps, rates, phs, sampled, all")
      ->check(CLI::IsMember(suite_names()));
  s_ve->add_option("--samples", ve.samples, "alphas in the sampled suite");
  s_ve->add_option("--seed", ve.seed, "seed of the sampled suite");
  s_ve->add_option("-o,--output", ve.out, "results JSON");

  std::string manifest_in;
  auto* s_rp = app.add_subcommand("replay", "re-run a manifest and compare outputs");
  s_rp->add_option("manifest", manifest_in, "manifest JSON")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*s_rp) {
      require(!replaying, ErrorKind::InvalidArgument, "a manifest cannot replay another manifest");
      return replay(manifest_in);
    }
    if (*s_cf) {
      run.sub = "cf";
      cmd_cf(cf, run);
    } else if (*s_co) {
      run.sub = "construct";
      cmd_construct(co, run);
    } else if (*s_gr) {
      run.sub = "growth";
      cmd_growth(gr, run);
    } else if (*s_ra) {
      run.sub = "rates";
      cmd_rates(ra, run);
    } else if (*s_sw) {
      run.sub = "sandwich";
      cmd_sandwich(sw, run, g.jobs);
    } else if (*s_ph) {
      run.sub = "phs";
      cmd_phs(ph, run, g.jobs);
    } else if (*s_ve) {
      run.sub = "verify";
      cmd_verify(ve, run, g.jobs);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }

  try {
    flush(run);
    if (replay_outputs) *replay_outputs = run.outputs;
    if (!replaying && !g.no_manifest) {
      std::string mp = g.manifest;
      if (mp.empty()) {
        mp = "semiuniform-" + run.sub + ".manifest.json";
        for (const auto& o : run.outputs)
          if (o.path != "-") {
            mp = o.path + ".manifest.json";
            break;
          }
      }
      write_file(mp, manifest_of(run, args, g).dump(2) + "\n");
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return run.status;
}

int replay(const std::string& path) {
  json m;
  try {
    m = json::parse(read_file(path));
  } catch (const json::exception& e) {
    fail(ErrorKind::ParseError, path + ": " + e.what());
  }
  require(m.contains("argv") && m.contains("outputs"), ErrorKind::ParseError, "not a semiuniform manifest");
  const auto& env = m.at("env").at("SEMIUNIFORM_BITS");
  if (env.is_null())
    unsetenv("SEMIUNIFORM_BITS");
  else
    setenv("SEMIUNIFORM_BITS", env.get<std::string>().c_str(), 1);
  auto args = m.at("argv").get<std::vector<std::string>>();
  std::vector<Output> outs;
  int code = run_cli(args, true, &outs);
  bool same = code == m.value("exit_code", 0) && outs.size() == m.at("outputs").size();
  for (std::size_t i = 0; same && i < outs.size(); ++i) {
    const auto& want = m.at("outputs")[i];
    same = outs[i].path == want.at("path").get<std::string>() && fnv1a(outs[i].data) == want.at("fnv1a64").get<std::string>() &&
           outs[i].data.size() == want.at("bytes").get<std::size_t>();
    if (!same) std::cerr << "replay: output " << outs[i].path << " differs\n";
  }
  std::cerr << "replay: " << (same ? "identical" : "DIFFERENT") << " (" << outs.size() << " outputs, exit " << code
            << ")\n";
  return same ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run_cli(args, false, nullptr);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
}
