#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "sigmalab/cli.hpp"

using namespace sigmalab::cli;
namespace fs = std::filesystem;

namespace {

json small_config(const std::string& suite) {
  json cfg = default_config();
  cfg["suite"] = suite;
  cfg["grid"]["dt"] = 1e-3;
  cfg["grid"]["n_steps"] = 1000;
  cfg["ensemble"]["n_paths"] = 300;
  cfg["refinement"]["dt"] = json::array({1e-2, 2.5e-3});
  cfg["refinement"]["n_paths"] = 100;
  cfg["nested"]["dt"] = 1e-2;
  cfg["nested"]["n_outer"] = 10;
  cfg["nested"]["n_inner"] = 50;
  return cfg;
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "sigmalab");
  std::vector<char*> argv;
  for (auto& a : args)
    argv.push_back(a.data());
  return sigmalab::cli::main(static_cast<int>(argv.size()), argv.data());
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sigmalab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string key_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

} // namespace

TEST(Config, DefaultsValidate) {
  EXPECT_NO_THROW(validate_config(default_config()));
  EXPECT_NO_THROW(validate_config(default_config(true)));
  EXPECT_EQ(default_config(true)["grid"]["dt"].get<double>(), 1e-5);
}

TEST(Config, ErrorsNameTheKey) {
  json cfg = default_config();
  EXPECT_EQ(key_of([&] { merge_config(cfg, json::parse(R"({"grid": {"dtt": 1}})")); }), "grid.dtt");
  EXPECT_EQ(key_of([&] { merge_config(cfg, json::parse(R"({"ensemble": {"n_paths": "many"}})")); }),
            "ensemble.n_paths");
  EXPECT_EQ(key_of([&] { apply_override(cfg, "grid", "1"); }), "grid");
  EXPECT_EQ(key_of([&] { apply_override(cfg, "nope.x", "1"); }), "nope.x");

  json bad = default_config();
  bad["grid"]["dt"] = -1.0;
  EXPECT_EQ(key_of([&] { validate_config(bad); }), "grid.dt");
  bad = default_config();
  bad["suite"] = "everything";
  EXPECT_EQ(key_of([&] { validate_config(bad); }), "suite");
}

TEST(Config, OverridesParseJsonScalars) {
  json cfg = default_config();
  apply_override(cfg, "grid.dt", "0.002");
  apply_override(cfg, "process.family", "drawdown");
  apply_override(cfg, "ensemble.n_paths", "77");
  EXPECT_EQ(cfg["grid"]["dt"].get<double>(), 0.002);
  EXPECT_EQ(cfg["process"]["family"].get<std::string>(), "drawdown");
  EXPECT_EQ(cfg["ensemble"]["n_paths"].get<int>(), 77);
}

TEST(Config, CheckSelection) {
  json cfg = default_config();
  apply_override(cfg, "checks", "class_sigma,compensator");
  EXPECT_EQ(cfg["checks"], json::array({"class_sigma", "compensator"}));
  EXPECT_NO_THROW(validate_config(cfg));
  cfg["suite"] = "estimates";
  EXPECT_EQ(key_of([&] { validate_config(cfg); }), "checks");
}

TEST(RunSuite, RunsOnlySelectedChecks) {
  json cfg = small_config("estimates");
  cfg["checks"] = json::array({"closed_form_quadrature", "arcsine_law"});
  const SuiteReport rep = run_suite(cfg, 1);
  ASSERT_EQ(rep.checks.size(), 2u);
  EXPECT_EQ(rep.checks[0].name, "closed_form_quadrature");
  EXPECT_EQ(rep.checks[1].name, "arcsine_law");
}

TEST(Describe, ListsChecksAndRejectsUnknown) {
  const std::string text = describe("estimates");
  EXPECT_NE(text.find("exceedance"), std::string::npos);
  EXPECT_NE(text.find("arcsine_law"), std::string::npos);
  EXPECT_THROW(describe("nonsense"), ConfigError);
}

TEST(RunSuite, HashIndependentOfWorkers) {
  const json cfg = small_config("sigma-verify");
  const SuiteReport a = run_suite(cfg, 1);
  const SuiteReport b = run_suite(cfg, 3);
  EXPECT_EQ(a.hash, b.hash);
  EXPECT_EQ(a.hash, content_hash(a));
  EXPECT_EQ(a.hash.size(), 64u);
  json other = cfg;
  other["ensemble"]["master_seed"] = 7;
  EXPECT_NE(run_suite(other, 1).hash, a.hash);
}

TEST(RunSuite, WritesArtifacts) {
  const fs::path dir = temp_dir("artifacts");
  const SuiteReport rep = run_suite(small_config("estimates"), 0);
  write_outputs(rep, dir.string());
  EXPECT_TRUE(fs::exists(dir / "report.json"));
  std::ifstream h(dir / "hash.txt");
  std::string hash;
  h >> hash;
  EXPECT_EQ(hash, rep.hash);
  std::ifstream r(dir / "report.json");
  const json report = json::parse(r);
  EXPECT_EQ(report["hash"].get<std::string>(), rep.hash);
  EXPECT_FALSE(report["checks"].empty());
}

TEST(ExitCodes, Main) {
  EXPECT_EQ(run_cli({"version"}), 0);
  EXPECT_EQ(run_cli({"describe", "identities"}), 0);
  EXPECT_EQ(run_cli({"describe", "bogus"}), 2);
  EXPECT_EQ(run_cli({"run", "--suite=bogus"}), 2);
  EXPECT_EQ(run_cli({"run", "--grid.nope=1"}), 2);
  EXPECT_EQ(run_cli({"frobnicate"}), 2);

  const fs::path dir = temp_dir("exit");
  {
    std::ofstream bad(dir / "bad.json");
    bad << "{ \"grid\": ";
  }
  EXPECT_EQ(run_cli({"run", "--config", (dir / "bad.json").string()}), 2);
  EXPECT_EQ(run_cli({"run", "--config", (dir / "missing.json").string()}), 2);

  const std::vector<std::string> small{"--suite=sigma-verify", "--grid.dt=1e-3", "--grid.n_steps=1000",
                                       "--ensemble.n_paths=300"};
  std::vector<std::string> ok{"run", "--out", (dir / "ok").string()};
  ok.insert(ok.end(), small.begin(), small.end());
  EXPECT_EQ(run_cli(ok), 0);
  std::vector<std::string> failing{"run", "--out", (dir / "fail").string(), "--tolerances.martingale_score=0"};
  failing.insert(failing.end(), small.begin(), small.end());
  EXPECT_EQ(run_cli(failing), 1);
}
