#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "ribound/cli.hpp"

namespace {

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "ribound");
  std::vector<char*> argv;
  argv.reserve(args.size());
  for (auto& a : args) argv.push_back(a.data());
  return ribound::run_cli(int(argv.size()), argv.data());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(bool(in));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void put(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

double line_value(const std::string& text, const std::string& key) {
  const auto pos = text.find(key);
  REQUIRE(pos != std::string::npos);
  return std::stod(text.substr(pos + key.size()));
}

struct TempFile {
  std::string path;
  explicit TempFile(std::string p) : path(std::move(p)) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("bound command writes the curve with a summary header") {
  TempFile out("clitest_bound.csv");
  REQUIRE(run({"bound", "--preset", "gronwall", "--out", out.path}) == 0);
  const std::string text = slurp(out.path);
  CHECK(contains(text, "# tau = 1, tau_capped = 1"));
  CHECK(contains(text, "t,bound,in_domain"));
  CHECK(contains(text, "\n1,2.71828183,1"));  // e at the horizon
}

TEST_CASE("tagged presets report the closed-form cross-check") {
  TempFile out("clitest_lipovan.csv");
  REQUIRE(run({"bound", "--preset", "lipovan", "--out", out.path}) == 0);
  const std::string text = slurp(out.path);
  CHECK(contains(text, "# closed_form(power-mixed) at t_max = 1.5, engine = 1.5,"));
  const double diff = line_value(text, "abs_diff = ");
  CHECK(diff <= 1e-6);
}

TEST_CASE("tau command prints horizon and image diagnostics") {
  TempFile out("clitest_tau.csv");
  REQUIRE(run({"tau", "--preset", "gronwall", "--out", out.path}) == 0);
  std::string text = slurp(out.path);
  CHECK(contains(text, "tau = 1\n"));
  CHECK(contains(text, "tau_capped = 1"));
  CHECK(contains(text, "psi = unbounded"));
  CHECK(contains(text, "psi_sup = inf"));

  REQUIRE(run({"tau", "--preset", "blowup", "--out", out.path}) == 0);
  text = slurp(out.path);
  CHECK(contains(text, "tau_capped = 0"));
  CHECK(contains(text, "psi = bounded"));
  CHECK(contains(text, "psi_sup = 0.7357588"));  // 2/e
  const double tau = line_value(text, "tau = ");
  CHECK(tau >= 0.999);
  CHECK(tau <= 1.0001);
  CHECK(line_value(text, "x0 = ") == doctest::Approx(0.5));
}

TEST_CASE("verify command certifies the bound and detects a shaved one") {
  TempFile out("clitest_verify.csv");
  REQUIRE(run({"verify", "--preset", "gronwall", "--grid", "801", "--out", out.path}) == 0);
  const std::string text = slurp(out.path);
  CHECK(contains(text, "# pass = 1"));
  CHECK(contains(text, "t,bound,oracle,margin,in_domain"));

  CHECK(run({"verify", "--preset", "gronwall", "--grid", "801", "--scale-bound", "0.99", "--out",
             out.path}) == 2);
  CHECK(contains(slurp(out.path), "# pass = 0"));
}

TEST_CASE("batch command is deterministic in the seed") {
  TempFile a("clitest_batch_a.csv");
  TempFile b("clitest_batch_b.csv");
  const std::vector<std::string> common = {"batch", "--seeds", "3", "--seed", "5",
                                           "--grid", "401"};
  auto with_out = [&](const std::string& path) {
    std::vector<std::string> args = common;
    args.push_back("--out");
    args.push_back(path);
    return args;
  };
  REQUIRE(run(with_out(a.path)) == 0);
  REQUIRE(run(with_out(b.path)) == 0);
  const std::string ta = slurp(a.path);
  CHECK(ta == slurp(b.path));
  CHECK(contains(ta, "seed,family,form,t_max,x0,x1,tau,grid_n,compared,max_violation,"
                     "converged,pass"));
}

TEST_CASE("config files override fields and reject unknown keys") {
  TempFile cfg("clitest_cfg.json");
  TempFile out("clitest_cfg_out.csv");
  put(cfg.path, "{\"t_max\": 0.5, \"grid_n\": 11}");
  REQUIRE(run({"bound", "--preset", "gronwall", "--config", cfg.path, "--out", out.path}) == 0);
  const std::string text = slurp(out.path);
  CHECK(contains(text, "\n0.5,1.64872127,1"));  // e^0.5 at the shortened horizon

  put(cfg.path, "{\"gri_dn\": 11}");
  CHECK(run({"bound", "--preset", "gronwall", "--config", cfg.path, "--out", out.path}) == 1);
  put(cfg.path, "{\"t_max\": ");
  CHECK(run({"bound", "--preset", "gronwall", "--config", cfg.path, "--out", out.path}) == 1);
}

TEST_CASE("usage errors exit with code 1") {
  CHECK(run({}) == 1);                               // missing subcommand
  CHECK(run({"bound", "--preset", "nope"}) == 1);    // unknown preset
  CHECK(run({"frobnicate"}) == 1);                   // unknown subcommand
  CHECK(run({"bound", "--preset", "gronwall", "--out", "/nonexistent_dir/x.csv"}) == 1);
}

TEST_CASE("instances whose transform saturates below the anchor exit with code 3") {
  TempFile cfg("clitest_sat.json");
  // eta has a convergent tail, so the first transform is bounded and the
  // default second anchor x1 = 1 sits above its supremum
  put(cfg.path,
      "{\"phi\": \"x\", \"c\": \"1.5\", \"eta\": \"(x^2+1)*ln(x^2+1)\", \"w\": \"1\","
      " \"alpha\": \"t\", \"f\": \"1\", \"g\": \"0\", \"t_max\": 1.0}");
  CHECK(run({"bound", "--config", cfg.path}) == 3);
}

TEST_CASE("validation failures exit with code 1") {
  TempFile cfg("clitest_valfail.json");
  put(cfg.path, "{\"alpha\": \"2*t\"}");  // alpha(t) > t breaks the delay hypothesis
  CHECK(run({"bound", "--preset", "gronwall", "--config", cfg.path}) == 1);
}
