#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gkdv/cli.hpp"

using namespace gkdv;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("gkdv_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args, const fs::path& out) {
  const std::string cmd = "GKDV_OUT=" + out.string() + " " + GKDV_CLI_PATH + " " + args + " > " +
                          (out / "stdout.txt").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

fs::path write_config(const fs::path& dir, const std::string& name, const json& j) {
  const auto p = dir / name;
  std::ofstream(p) << j.dump(2);
  return p;
}

json small_config() {
  return json{{"run_id", "small"},
              {"seed", 5},
              {"symbol", {{"name", "kdv-ks"}}},
              {"grid", {{"length", 201.06192982974676}, {"n_points", 1024}}},
              {"data", {{"kind", "gaussian"}, {"amplitude", 0.01}}},
              {"solve", {{"reference_steps", 256}}}};
}

std::map<std::string, std::string> checksums(const fs::path& run) {
  std::map<std::string, std::string> out;
  const auto manifest = json::parse(std::ifstream(run / "manifest.json"));
  for (const auto& f : manifest["files"]) {
    out[f["path"]] = f["sha256"];
  }
  return out;
}

}  // namespace

TEST(Cli, UsageErrors) {
  const auto dir = scratch("usage");
  EXPECT_EQ(run("", dir), 2);
  EXPECT_EQ(run("solve", dir), 2);
  EXPECT_EQ(run("verify --config x.json --suite bogus", dir), 2);
  std::ofstream(dir / "broken.json") << "{\"grid\": {\"n_points\": 12}}";
  EXPECT_EQ(run("solve --config " + (dir / "broken.json").string(), dir), 2);
  std::ofstream(dir / "unknown.json") << "{\"colour\": 1}";
  EXPECT_EQ(run("verify --config " + (dir / "unknown.json").string(), dir), 2);
  EXPECT_EQ(run("solve --config " + (dir / "absent.json").string(), dir), 2);
}

TEST(Cli, SolveZeroData) {
  const auto dir = scratch("zero");
  auto j = small_config();
  j["data"] = {{"kind", "zero"}};
  j["run_id"] = "zero";
  ASSERT_EQ(run("solve --config " + write_config(dir, "zero.json", j).string(), dir), 0);
  std::ifstream in(dir / "zero" / "data" / "trajectory_2.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x,value");
  while (std::getline(in, line)) EXPECT_EQ(line.substr(line.find(',') + 1), "0");
  const auto trace = json::parse(std::ifstream(dir / "zero" / "reports" / "picard_trace.json"));
  EXPECT_EQ(trace["t_final"], 1.0);
  EXPECT_EQ(trace["converged"], true);
}

TEST(Cli, SolveIsReproducible) {
  const auto a = scratch("repro_a"), b = scratch("repro_b");
  const auto cfg = write_config(a, "cfg.json", small_config());
  ASSERT_EQ(run("solve --config " + cfg.string(), a), 0);
  ASSERT_EQ(run("solve --config " + cfg.string(), b), 0);
  const auto ca = checksums(a / "small"), cb = checksums(b / "small");
  EXPECT_EQ(ca, cb);
  EXPECT_TRUE(ca.count("reports/picard_trace.json"));
  EXPECT_TRUE(ca.count("reports/cross_check.json"));
  const auto cross = json::parse(std::ifstream(a / "small" / "reports" / "cross_check.json"));
  EXPECT_LT(cross["relative_l2"].get<double>(), 1e-6);
}

TEST(Cli, ShippedKdvKsConfig) {
  const auto dir = scratch("shipped");
  ASSERT_EQ(run(std::string("solve --config ") + GKDV_CONFIG_DIR + "/kdvks.json", dir), 0);
  const auto trace = json::parse(std::ifstream(dir / "kdvks-gaussian" / "reports" / "picard_trace.json"));
  EXPECT_EQ(trace["converged"], true);
  EXPECT_GE(checksums(dir / "kdvks-gaussian").size(), 7u);
}

TEST(Cli, VerifyInadmissibleSkipsContraction) {
  const auto dir = scratch("inadmissible");
  RunConfig c;
  c.run_id = "p2";
  c.seed = 1;
  c.symbol = {"pure-power", 1.0, 2.0};
  c.grid.n_points = 1024;
  c.verify.n_draws = 2;
  std::ostringstream log;
  cmd_verify(c, "nonlinear", log, dir);
  const auto r = json::parse(std::ifstream(dir / "p2" / "reports" / "contraction-omega.json"));
  EXPECT_EQ(r["verdict"], "inadmissible");
  const auto reports = run_verify(c, "linear", log);
  for (const auto& rep : reports) {
    if (rep.estimate_id == "weighted-linear") {
      EXPECT_TRUE(rep.passed());
    }
  }
}

TEST(Cli, VerifyExitCodeReflectsVerdicts) {
  const auto dir = scratch("verify_exit");
  auto j = small_config();
  j["symbol"] = {{"name", "pure-power"}, {"p", 4.0}};
  j["verify"] = {{"suite", "linear"}, {"n_draws", 2}, {"thetas", json::array({1.0})},
                 {"tau_range", {1e-8, 1e-6}}};
  j["run_id"] = "lin";
  EXPECT_EQ(run("verify --config " + write_config(dir, "v.json", j).string(), dir), 0);
  j["verify"]["tau_range"] = {1e-4, 1e-2};
  j["run_id"] = "lin_fail";
  EXPECT_EQ(run("verify --config " + write_config(dir, "w.json", j).string(), dir), 1);
  EXPECT_TRUE(fs::exists(dir / "lin_fail" / "reports" / "summary.txt"));
}

TEST(Cli, SweepRowsMatchIndividualRuns) {
  const auto dir = scratch("sweep");
  RunConfig c;
  c.run_id = "sweep";
  c.seed = 2;
  c.symbol = {"pure-power", 1.0, 4.0};
  c.grid.n_points = 1024;
  c.verify.suite = "linear";
  c.verify.n_draws = 2;
  c.verify.thetas = {1.0};
  c.sweep.k = {1.0, 2.0};
  c.sweep.p = {4.0, 5.0};
  std::ostringstream log;
  cmd_sweep(c, 2, log, dir);
  std::ifstream in(dir / "sweep" / "data" / "sweep.csv");
  std::vector<std::string> rows;
  for (std::string line; std::getline(in, line);) rows.push_back(line);
  ASSERT_EQ(rows.size(), 1u + 4u * 4u);

  RunConfig single = c;
  single.sweep = {};
  single.problem.k = 2.0;
  single.symbol.p = 5.0;
  const auto reports = run_verify(single, "linear", log);
  std::vector<std::string> expect;
  for (const auto& r : reports) {
    expect.push_back("2,5,0," + r.estimate_id + "," + format_double(r.theoretical_exponent) + "," +
                     format_double(r.fitted_exponent) + "," + to_string(r.verdict));
  }
  for (const auto& e : expect) EXPECT_NE(std::find(rows.begin(), rows.end(), e), rows.end()) << e;
  EXPECT_TRUE(fs::exists(dir / "sweep" / "jobs" / "k2_p5_s0" / "manifest.json"));
}

TEST(Cli, OnePointSweepMatchesVerify) {
  const auto dir = scratch("one_point");
  RunConfig c;
  c.run_id = "one";
  c.seed = 2;
  c.symbol = {"pure-power", 1.0, 4.0};
  c.grid.n_points = 1024;
  c.verify.suite = "linear";
  c.verify.n_draws = 2;
  c.verify.thetas = {1.0};
  std::ostringstream log;
  const int sweep_code = cmd_sweep(c, 1, log, dir);
  RunConfig v = c;
  v.run_id = "one_verify";
  const int verify_code = cmd_verify(v, "linear", log, dir);
  EXPECT_EQ(sweep_code, verify_code);
  const auto a = json::parse(std::ifstream(dir / "one" / "jobs" / "k1_p4_s0" / "reports" / "weighted-linear.json"));
  const auto b = json::parse(std::ifstream(dir / "one_verify" / "reports" / "weighted-linear.json"));
  EXPECT_EQ(a, b);
}
