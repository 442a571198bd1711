#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <string>

#include "hkt/runner.hpp"

using hkt::cx;
using hkt::parse_complex;
using hkt::parse_run_config;
using hkt::RunConfig;

namespace {

const char* kOvConfig = R"(# instanton-corrected sample
[prepotential]
name = "ov-log"
n = 1

[prepotential.params]
Lambda = 10

[[charges]]
m = [0]
k = [1]
omega = "1"

[grid]
re_min = -0.3
re_max = 0.3
im_min = 0.7
im_max = 1.8
re_count = 2
im_count = 2
fiber_count = 2

[run]
seed = 3
suites = ["quaternion", "crosscheck"]
)";

}  // namespace

TEST_CASE("complex literal grammar") {
  CHECK(parse_complex("2") == cx(2, 0));
  CHECK(parse_complex("-0.5") == cx(-0.5, 0));
  CHECK(parse_complex("i") == cx(0, 1));
  CHECK(parse_complex("-i") == cx(0, -1));
  CHECK(parse_complex("2i") == cx(0, 2));
  CHECK(parse_complex("1+2i") == cx(1, 2));
  CHECK(parse_complex("0.5-0.5i") == cx(0.5, -0.5));
  CHECK(parse_complex("1e-2+2.5e1i") == cx(0.01, 25));
  CHECK_THROWS_AS(parse_complex(""), hkt::ConfigError);
  CHECK_THROWS_AS(parse_complex("1+"), hkt::ConfigError);
  CHECK_THROWS_AS(parse_complex("abc"), hkt::ConfigError);
  CHECK_THROWS_AS(parse_complex("1i+2i+"), hkt::ConfigError);
}

TEST_CASE("config text parsing") {
  const hkt::ConfigFile f = hkt::parse_config_text(kOvConfig);
  CHECK(f.sections.count("prepotential") == 1);
  CHECK(f.sections.count("grid") == 1);
  CHECK(f.charges.size() == 1);
  CHECK(f.sections.at("prepotential").entries.at("name").str == "ov-log");
  CHECK(f.sections.at("grid").entries.at("re_count").num == 2);
  const hkt::ConfigValue& suites = f.sections.at("run").entries.at("suites");
  REQUIRE(suites.kind == hkt::ConfigValue::Kind::Array);
  CHECK(suites.items.size() == 2);
}

TEST_CASE("config errors carry line numbers") {
  try {
    hkt::parse_config_text("[grid]\nre_min 0.1\n");
    FAIL("expected ConfigError");
  } catch (const hkt::ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(hkt::parse_config_text("[grid]\nx = [1, 2\n"), hkt::ConfigError);
  CHECK_THROWS_AS(hkt::parse_config_text("[grid]\nx = \"open\n"), hkt::ConfigError);
  CHECK_THROWS_AS(hkt::parse_config_text("[[other]]\nx = 1\n"), hkt::ConfigError);
  CHECK_THROWS_AS(hkt::parse_config_text("[grid]\nx = 1\nx = 2\n"), hkt::ConfigError);
  CHECK_THROWS_AS(hkt::parse_config_text("[grid]\nx = bare\n"), hkt::ConfigError);
}

TEST_CASE("run config validation") {
  const RunConfig c = parse_run_config(kOvConfig);
  CHECK(c.name == "ov-log");
  CHECK(c.n == 1);
  CHECK(c.charges.size() == 1);
  CHECK(c.charges[0].k == std::vector<int>{1});
  CHECK(c.seed == 3);
  CHECK(c.suites == std::vector<std::string>{"quaternion", "crosscheck"});
  CHECK(c.params.at("Lambda") == std::vector<cx>{cx(10, 0)});
  CHECK(c.zeta_samples.size() == 6);  // defaults
  CHECK(c.budget_fd == 1e-5);

  CHECK_THROWS_AS(parse_run_config("[grid]\nre_min = 0\n"), hkt::ConfigError);
  CHECK_THROWS_AS(parse_run_config("[prepotential]\nname = \"cubic\"\n"
                                   "expression = \"Z1\"\nn = 1\n"),
                  hkt::ConfigError);  // both routes given
  CHECK_THROWS_AS(
      parse_run_config("[prepotential]\nname = \"cubic\"\nn = 0\n[grid]\n"
                       "re_min = 0\nre_max = 1\nim_min = 0\nim_max = 1\n"),
      hkt::ConfigError);
  CHECK_THROWS_AS(
      parse_run_config("[prepotential]\nname = \"cubic\"\nn = 1\n[grid]\n"
                       "re_min = 1\nre_max = 0\nim_min = 0\nim_max = 1\n"),
      hkt::ConfigError);  // inverted box
  CHECK_THROWS_AS(
      parse_run_config("[prepotential]\nname = \"cubic\"\nn = 1\n[grid]\n"
                       "re_min = 0\nre_max = 1\nim_min = 0\nim_max = 1\n"
                       "[run]\nsuites = [\"bogus\"]\n"),
      hkt::ConfigError);
  CHECK_THROWS_AS(
      parse_run_config("[prepotential]\nname = \"cubic\"\nn = 1\n[grid]\n"
                       "re_min = 0\nre_max = 1\nim_min = 0\nim_max = 1\n"
                       "[tolerances]\nh_fd = -1\n"),
      hkt::ConfigError);
  CHECK_THROWS_AS(hkt::load_run_config("/nonexistent/path.toml"), hkt::ConfigError);
}

TEST_CASE("context points are deterministic in the seed") {
  RunConfig c = parse_run_config(kOvConfig);
  const hkt::RunContext a = hkt::build_context(c);
  const hkt::RunContext b = hkt::build_context(c);
  REQUIRE(a.points.size() == b.points.size());
  CHECK(a.points.size() == 8);  // 2 x 2 base grid x 2 fiber samples
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].Z == b.points[i].Z);
    CHECK(a.points[i].phi_up == b.points[i].phi_up);
  }
  // Fiber sample 0 sits at the zero angles.
  CHECK(a.points[0].phi_up(0) == 0.0);
  CHECK(a.points[0].phi_dn(0) == 0.0);
  CHECK(a.points[1].phi_up(0) != 0.0);
}

TEST_CASE("verify report is reproducible and well formed") {
  const RunConfig c = parse_run_config(kOvConfig);
  const hkt::RunReport r1 = hkt::run_verify(c);
  const hkt::RunReport r2 = hkt::run_verify(c);
  CHECK(r1.pass);
  REQUIRE(r1.suites.size() == 2);
  CHECK(r1.suites[0].name == "quaternion");
  CHECK(r1.suites[0].evaluated == 8);
  CHECK(r1.suites[0].skipped == 0);
  CHECK(!r1.suites[0].residuals.empty());
  for (const hkt::ResidualStat& st : r1.suites[0].residuals) {
    CHECK(!st.worst_point.empty());
    CHECK(st.worst <= st.budget);
  }
  CHECK(r1.signature_census.at("(4,0)") == 8);

  std::string j1 = hkt::report_to_json(r1, c);
  std::string j2 = hkt::report_to_json(r2, c);
  auto strip_wall = [](std::string s) {
    const std::size_t at = s.find("wall_time_seconds");
    const std::size_t end = s.find('\n', at);
    return s.erase(at, end - at);
  };
  CHECK(strip_wall(j1) == strip_wall(j2));
  CHECK(j1.find("\"pass\": true") != std::string::npos);
  CHECK(j1.find("\"seed\": 3") != std::string::npos);
}

TEST_CASE("degraded points are reported and skipped") {
  // im_min below the support floor wall: the |Z_gamma| = 0 locus crosses the
  // box, so some sampled points must fail while others evaluate.
  RunConfig c = parse_run_config(kOvConfig);
  c.suites = {"quaternion"};
  c.grid.re_min = -0.001;
  c.grid.re_max = 0.001;
  c.grid.im_min = -0.0000001;
  c.grid.im_max = 1.0;
  c.grid.re_count = 1;
  c.grid.im_count = 2;
  c.support_floor = 0.01;
  const hkt::RunReport r = hkt::run_verify(c);
  const hkt::SuiteResult& s = r.suites[0];
  CHECK(s.skipped > 0);
  CHECK(s.evaluated > 0);
  REQUIRE(!s.skipped_points.empty());
  CHECK(s.skipped_points[0].find("skipped:") != std::string::npos);
}

TEST_CASE("scan produces one row per healthy grid point") {
  const RunConfig c = parse_run_config(kOvConfig);
  const hkt::ScanTable t = hkt::run_scan(c, "om3[v-block]");
  CHECK(t.header.size() == 7);  // 4 coordinates + value, semiflat, difference
  CHECK(t.rows.size() == 8);
  for (const auto& row : t.rows) {
    REQUIRE(row.size() == 7);
    CHECK(row[4] > 0.0);
    // The correction magnitude dominates the gap between the two norms.
    CHECK(row[6] >= std::abs(row[4] - row[5]) - 1e-12);
    CHECK(row[6] > 0.0);
  }
  const hkt::ScanTable entry = hkt::run_scan(c, "g[0,0]");
  CHECK(entry.rows.size() == 8);
  for (const auto& row : entry.rows)
    CHECK(std::abs(row[4] - row[5] - row[6]) < 1e-12);

  CHECK_THROWS_AS(hkt::run_scan(c, "bogus"), hkt::UnknownObservable);
  CHECK_THROWS_AS(hkt::run_scan(c, "g[0,9]"), hkt::UnknownObservable);
  CHECK_THROWS_AS(hkt::run_scan(c, "tau[0,0]"), hkt::UnknownObservable);

  const std::string csv = hkt::scan_to_csv(t);
  CHECK(csv.find("re_Z1,im_Z1,phi_up1,phi_dn1,value,semiflat,difference\n") == 0);
}

TEST_CASE("crosscheck runs per charge and rejects the zero provider") {
  const RunConfig c = parse_run_config(kOvConfig);
  const hkt::CrosscheckReport r = hkt::run_crosscheck(c);
  CHECK(r.pass);
  CHECK(r.rows.size() == 8);  // one support pair x 8 points
  CHECK(r.max_error <= c.budget_series);
  CHECK(r.rows[0].charge == "k=[1]");

  RunConfig no_charges = c;
  no_charges.charges.clear();
  CHECK_THROWS_AS(hkt::run_crosscheck(no_charges), hkt::ConfigError);
}

TEST_CASE("catalog listing names every builtin") {
  const std::string listing = hkt::catalog_listing();
  for (const std::string& name : hkt::catalog_names())
    CHECK(listing.find(name) != std::string::npos);
  CHECK(listing.find("[grid]") != std::string::npos);
  CHECK(listing.find("[[charges]]") != std::string::npos);
}

TEST_CASE("two-variable chart passes every suite end to end") {
  RunConfig c;
  c.n = 2;
  c.expression = "Z1^3/6 + Z2^3/6 + i*Z1*Z2";
  c.charges = {{{0, 0}, {1, 0}, "1"}, {{0, 0}, {0, 1}, "1/2"}};
  c.grid.re_min = -0.2;
  c.grid.re_max = 0.2;
  c.grid.im_min = 0.8;
  c.grid.im_max = 1.6;
  c.grid.re_count = 2;
  c.grid.im_count = 2;
  c.grid.fiber_count = 2;
  c.seed = 11;
  const hkt::RunReport r = hkt::run_verify(c);
  CHECK(r.pass);
  REQUIRE(r.suites.size() == 8);  // empty suite list selects all
  for (const hkt::SuiteResult& s : r.suites) {
    CAPTURE(s.name);
    CHECK(s.pass);
    CHECK(s.evaluated == 8);
    CHECK(s.skipped == 0);
  }
  CHECK(r.signature_census.at("(8,0)") == 8);
  // Random base sampling still depends only on the seed.
  const hkt::RunContext a = hkt::build_context(c);
  const hkt::RunContext b = hkt::build_context(c);
  for (std::size_t i = 0; i < a.points.size(); ++i) CHECK(a.points[i].Z == b.points[i].Z);
}

#ifdef HKT_BIN
namespace {

struct CommandResult {
  int exit_code = -1;
  std::string out;
};

CommandResult run_command(const std::string& args) {
  const std::string cmd = std::string(HKT_BIN) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CommandResult res;
  char buf[4096];
  while (std::size_t got = std::fread(buf, 1, sizeof(buf), pipe)) res.out.append(buf, got);
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = "./" + name;
  std::ofstream out(path);
  out << text;
  return path;
}

}  // namespace

TEST_CASE("command line contract") {
  const std::string config = write_temp("cli_ov.toml", kOvConfig);

  const CommandResult verify = run_command("verify " + config);
  CHECK(verify.exit_code == 0);
  CHECK(verify.out.find("\"pass\": true") != std::string::npos);

  const CommandResult seeded = run_command("verify " + config + " --seed 99");
  CHECK(seeded.exit_code == 0);
  CHECK(seeded.out.find("\"seed\": 99") != std::string::npos);

  const CommandResult catalog = run_command("catalog");
  CHECK(catalog.exit_code == 0);
  CHECK(catalog.out.find("ov-log") != std::string::npos);

  const CommandResult scan =
      run_command("scan " + config + " --observable om3[v-block] --out ./cli_scan.csv");
  CHECK(scan.exit_code == 0);
  std::ifstream csv("./cli_scan.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "re_Z1,im_Z1,phi_up1,phi_dn1,value,semiflat,difference");

  const CommandResult crosscheck = run_command("crosscheck " + config);
  CHECK(crosscheck.exit_code == 0);
  CHECK(crosscheck.out.find("\"pass\": true") != std::string::npos);

  // A failing verdict exits 1; broken input exits 2.
  const std::string strict = write_temp(
      "cli_strict.toml",
      std::string(kOvConfig) + "\n[tolerances]\nbudget_algebraic = 1e-18\n");
  const CommandResult failing = run_command("verify " + strict);
  CHECK(failing.exit_code == 1);
  CHECK(failing.out.find("\"pass\": false") != std::string::npos);

  const CommandResult missing = run_command("verify ./no_such_file.toml");
  CHECK(missing.exit_code == 2);
  CHECK(missing.out.find("error:") != std::string::npos);

  const std::string broken = write_temp("cli_broken.toml", "[grid]\nwhat\n");
  const CommandResult bad = run_command("verify " + broken);
  CHECK(bad.exit_code == 2);
  CHECK(bad.out.find("line 2") != std::string::npos);
}
#endif

TEST_CASE("parallel execution covers every index and rethrows") {
  setenv("HKT_THREADS", "4", 1);
  std::vector<std::atomic<int>> hits(64);
  hkt::parallel_for(64, [&](int i) { hits[static_cast<std::size_t>(i)].fetch_add(1); });
  for (const auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(hkt::parallel_for(8,
                                    [](int i) {
                                      if (i == 5) throw std::runtime_error("boom");
                                    }),
                  std::runtime_error);
  unsetenv("HKT_THREADS");
}
