#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("driverl_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string("\"") + DRIVERL_CLI + "\" " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("fly"), 2);
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run("eval-control --runs 9"), 2);
}

TEST(Cli, LapWritesTraceAndMetrics) {
  const auto trace = scratch() / "trace.jsonl";
  const auto metrics = scratch() / "metrics.json";
  ASSERT_EQ(run("lap --out " + trace.string() + " --metrics " + metrics.string()), 0);
  const auto m = nlohmann::ordered_json::parse(slurp(metrics));
  EXPECT_EQ(m["terminated_by"], "lap_complete");
  EXPECT_EQ(m["metrics"]["E_C"]["r_drive"], 0.0);
  EXPECT_EQ(m["params"].begin().key(), "qv");
  EXPECT_FALSE(slurp(trace).empty());
}

TEST(Cli, LapParamFormats) {
  const auto metrics = scratch() / "m2.json";
  const std::string out = " --out " + (scratch() / "t2.jsonl").string() + " --metrics " + metrics.string();
  EXPECT_EQ(run("lap --params '{\"v_max\": 3}'" + out), 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(metrics))["params"]["v_max"], 3.0);
  EXPECT_EQ(run("lap --params \"{v_max: -1, v_min: -2}\"" + out), 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(metrics))["params"]["v_min"], -2.0);
  EXPECT_EQ(run("lap --params '{\"warp\": 1}'" + out), 2);
  EXPECT_EQ(run("lap --params '{\"v_min\": 4, \"v_max\": 3}'" + out), 2);
  EXPECT_EQ(run("lap --map nowhere" + out), 2);
}

TEST(Cli, UnreachablePolicyExitsThree) {
  EXPECT_EQ(run("eval-control --map circle --runs 1 --policy http://127.0.0.1:9/x --out " +
                (scratch() / "c.json").string()),
            3);
}

TEST(Cli, GenDatasetDeterministic) {
  const auto a = scratch() / "a.jsonl";
  const auto b = scratch() / "b.jsonl";
  ASSERT_EQ(run("gen-dataset --per-style 1 --seed 3 --out " + a.string()), 0);
  ASSERT_EQ(run("gen-dataset --per-style 1 --seed 3 --out " + b.string()), 0);
  EXPECT_EQ(slurp(a), slurp(b));
  const auto report = scratch() / "d.json";
  ASSERT_EQ(run("eval-decision --policy oracle --dataset " + a.string() + " --out " + report.string() +
                " --table " + (scratch() / "d.txt").string()),
            0);
  EXPECT_EQ(nlohmann::json::parse(slurp(report))["accuracy"], 100.0);
}

TEST(Cli, ExportAssetsMatchesShippedData) {
  const auto dir = scratch() / "assets";
  ASSERT_EQ(run("export-assets --out " + dir.string()), 0);
  const fs::path data = fs::path(DRIVERL_SOURCE_DIR) / "data";
  for (const char* f : {"behaviors.json", "param_schema.json", "rag/mpc_memories.txt", "maps/train_circle.csv",
                        "maps/eval_grand_tour_raceline.csv"}) {
    EXPECT_EQ(slurp(dir / f), slurp(data / f)) << f;
  }
}
