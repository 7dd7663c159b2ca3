#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <semiuniform/real.hpp>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

fs::path workdir() {
  static fs::path d = [] {
    fs::path p = fs::temp_directory_path() / ("semiuniform_cli_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return d;
}

Result run(const std::string& args, const std::string& env = "") {
  std::string cmd = "cd '" + workdir().string() + "' && " + env + " '" SEMIUNIFORM_CLI "' " + args + " 2>/dev/null";
  Result r;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int st = ::pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string l;
  while (std::getline(is, l)) out.push_back(l);
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, CfSqrtTwoGolden) {
  auto r = run("cf --surd 2 --terms 20 --no-manifest");
  ASSERT_EQ(r.code, 0);
  auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 21u);
  // Pell recurrence: p_{n+1} = 2 p_n + p_{n-1}, same for q.
  semiuniform::BigInt pm = 1, p = 1, qm = 0, q = 1;
  for (int n = 0; n < 20; ++n) {
    std::string want = std::to_string(n) + "," + (n == 0 ? "1" : "2") + "," + p.get_str() + "," + q.get_str() + ",1,1,";
    EXPECT_EQ(ls[n + 1].substr(0, want.size()), want) << n;
    semiuniform::BigInt pn = 2 * p + pm, qn = 2 * q + qm;
    if (n == 0) {
      pn = 3;
      qn = 2;
    }
    pm = p;
    p = pn;
    qm = q;
    q = qn;
  }
}

TEST(Cli, CfTerminatedAndInsufficient) {
  auto r = run("cf --quotients 1,2 --terms 5 --no-manifest");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(lines(r.out).size(), 3u);
  EXPECT_EQ(run("cf --decimal 1.41 --bits 8 --terms 30 --no-manifest").code, 2);
  EXPECT_EQ(run("cf --surd 4 --terms 3 --no-manifest").code, 2);
  EXPECT_EQ(run("cf --terms 3 --no-manifest").code, 2);
  EXPECT_EQ(run("cf --surd 2 --bogus").code, 2);
}

TEST(Cli, Construct) {
  auto r = run("construct --exp 1 --bits 4096 --no-manifest");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(lines(r.out)[2].substr(0, 5), "1,10,");
  r = run("construct --powerlog 4 0 --bits 1024 --no-manifest");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(lines(r.out)[2].substr(0, 5), "1,20,");
  std::ofstream(workdir() / "up.csv") << "t,f\n1,1\n2,3\n";
  EXPECT_EQ(run("construct --table up.csv --no-manifest").code, 2);
}

TEST(Cli, GrowthMonotone) {
  auto r = run("growth --surd 2 --etas 10,100,1000 --no-manifest");
  ASSERT_EQ(r.code, 0);
  auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 4u);
  double plo = 0, phi = 0;
  for (int i = 1; i <= 3; ++i) {
    double eta, lo, hi;
    ASSERT_EQ(std::sscanf(ls[i].c_str(), "%lf,%lf,%lf", &eta, &lo, &hi), 3);
    EXPECT_LE(lo, hi);
    EXPECT_GE(lo, plo);
    EXPECT_GE(hi, phi);
    plo = lo;
    phi = hi;
  }
}

TEST(Cli, SandwichUpperRatios) {
  auto r = run("sandwich --surd 2 --odd-v 1..199 --no-manifest");
  ASSERT_EQ(r.code, 0);
  auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 101u);
  const double bound = 36 * M_PI * M_PI;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    auto last = ls[i].rfind(',');
    EXPECT_LE(std::stod(ls[i].substr(last + 1)), bound) << ls[i];
  }
}

TEST(Cli, VerifySuiteAndUnknown) {
  auto r = run("verify appendix --no-manifest");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("[criterion 1] PASS"), std::string::npos);
  EXPECT_NE(r.out.find("[criterion 2] PASS"), std::string::npos);
  EXPECT_EQ(run("verify nonsense").code, 2);
}

TEST(Cli, ManifestReplayIsByteIdentical) {
  ASSERT_EQ(run("growth --surd 2 --etas 10,100 -o g.csv", "SEMIUNIFORM_BITS=160").code, 0);
  auto m = nlohmann::json::parse(slurp(workdir() / "g.csv.manifest.json"));
  EXPECT_EQ(m["bits"]["value"], 160);
  EXPECT_EQ(m["bits"]["source"], "env SEMIUNIFORM_BITS");
  EXPECT_EQ(m["subcommand"], "growth");
  std::string before = slurp(workdir() / "g.csv");
  // Replay restores the recorded environment.
  EXPECT_EQ(run("replay g.csv.manifest.json", "SEMIUNIFORM_BITS=64").code, 0);
  EXPECT_EQ(slurp(workdir() / "g.csv"), before);
  // A tampered digest is reported.
  m["outputs"][0]["fnv1a64"] = "0000000000000000";
  std::ofstream(workdir() / "bad.json") << m.dump();
  EXPECT_EQ(run("replay bad.json").code, 1);
}

TEST(Cli, RatesAndPhs) {
  auto r = run("rates --power 2 --kind rss --ts 100,10000 --no-manifest");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(lines(r.out)[1], "100,0.10000000000000001,RSS-upper");
  EXPECT_EQ(run("rates --power 0 --log-power 1 --kind rss --ts 100 --no-manifest").code, 2);
  r = run("phs --universal 0.3333333333333333 --t-grid 0:12:121 --char-points 0 --no-manifest");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_FALSE(j["stability"]["invertible_on_grid"].get<bool>());
  EXPECT_EQ(run("phs --config missing.json --t-grid 0:1:2 --no-manifest").code, 2);
}
