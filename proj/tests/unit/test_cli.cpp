#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cmosb_cli/app.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Cli {
  int code = 0;
  std::string out;
  std::string err;
};

Cli run(std::vector<std::string> args) {
  args.insert(args.begin(), "cmosb");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Cli r;
  r.code = cmosb::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cmosb_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, PrintDefaultsIsALoadableConfig) {
  const auto r = run({"--print-defaults"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("phi_p = 0.6"), std::string::npos);
  EXPECT_NE(r.out.find("generations = 40"), std::string::npos);
  std::ofstream(dir_ / "defaults.ini") << r.out;
  EXPECT_EQ(run({"--config", (dir_ / "defaults.ini").string(), "--print-defaults"}).out, r.out);
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
  EXPECT_EQ(run({"--config", (dir_ / "missing.ini").string(), "train"}).code, 2);
  const auto depth = run({"--out", dir_.string(), "--set", "train.d=9", "train"});
  EXPECT_EQ(depth.code, 2);
  EXPECT_NE(depth.err.find("d must be in [1, 8]"), std::string::npos) << depth.err;
  EXPECT_EQ(run({"--set", "nosuch.key=1", "train"}).code, 2);
  EXPECT_EQ(run({"--set", "ga.population=abc", "train"}).code, 2);
  std::ofstream(dir_ / "bad.ini") << "[ga]\nunknown = 3\n";
  EXPECT_EQ(run({"--config", (dir_ / "bad.ini").string(), "train"}).code, 2);
  EXPECT_NE(run({"frobnicate"}).code, 0);
}

TEST_F(CliTest, BinaryFloorNeedsExplicitFlag) {
  const auto out = (dir_ / "low").string();
  const auto blocked = run({"--out", out, "--set", "data.rows=300", "--set", "train.p=0.1", "train"});
  EXPECT_EQ(blocked.code, 2);
  EXPECT_NE(blocked.err.find("train.p"), std::string::npos) << blocked.err;
  const auto ok = run({"--out", out, "--set", "data.rows=600", "--set", "train.p=0.1", "--set",
                       "train.allow_below_binary_floor=true", "train"});
  ASSERT_EQ(ok.code, 0) << ok.err;
  const auto high = (dir_ / "high").string();
  ASSERT_EQ(run({"--out", high, "--set", "data.rows=600", "train"}).code, 0);
  const auto low_leaves = json::parse(slurp(fs::path(out) / "report.json"))["logged_leaves"].get<int>();
  const auto high_leaves = json::parse(slurp(fs::path(high) / "report.json"))["logged_leaves"].get<int>();
  EXPECT_LT(low_leaves, high_leaves);
}

TEST_F(CliTest, GenDataDeterministic) {
  const auto a = (dir_ / "a").string(), b = (dir_ / "b").string();
  ASSERT_EQ(run({"--out", a, "gen-data"}).code, 0);
  ASSERT_EQ(run({"--out", b, "gen-data"}).code, 0);
  EXPECT_EQ(slurp(fs::path(a) / "dataset.csv"), slurp(fs::path(b) / "dataset.csv"));
  EXPECT_EQ(slurp(fs::path(a) / "dataset.json"), slurp(fs::path(b) / "dataset.json"));
  const auto meta = json::parse(slurp(fs::path(a) / "dataset.json"));
  EXPECT_EQ(meta["classes"], 2);
  EXPECT_EQ(meta["rows"], 2000);
  EXPECT_TRUE(meta.contains("schema_version"));
  std::ifstream csv(fs::path(a) / "dataset.csv");
  std::size_t lines = 0;
  for (std::string line; std::getline(csv, line);) ++lines;
  EXPECT_EQ(lines, 2001u);
}

TEST_F(CliTest, TrainThenAttackRoundTrip) {
  const auto out = dir_.string();
  ASSERT_EQ(run({"--out", out, "--set", "data.rows=400", "--set", "train.baseline=vf2boost", "train"}).code,
            0);
  const auto report = json::parse(slurp(dir_ / "report.json"));
  EXPECT_EQ(report["rounds"].size(), 20u);
  EXPECT_EQ(report["config"]["d"], 7);
  const auto log = (dir_ / "leaf_log.json").string();
  const auto forest = (dir_ / "forest.json").string();
  ASSERT_EQ(run({"--out", out, "attack", "--log", log, "--forest", forest}).code, 0);
  const auto first = slurp(dir_ / "attack_report.json");
  ASSERT_EQ(run({"--out", out, "attack", "--log", log}).code, 0);
  EXPECT_EQ(slurp(dir_ / "attack_report.json"), first);
  const auto attack = json::parse(first);
  EXPECT_NEAR(attack["privacy_leakage"].get<double>(),
              report["objectives"]["privacy_leakage"].get<double>(), 0.2);
  EXPECT_EQ(run({"--out", out, "attack", "--log", (dir_ / "none.json").string()}).code, 2);
  EXPECT_EQ(run({"--out", out, "attack", "--log", log, "--forest", (dir_ / "none.json").string()}).code, 2);
  std::ofstream(dir_ / "garbage.json") << "{\"kind\": ";
  EXPECT_EQ(run({"--out", out, "attack", "--log", log, "--forest", (dir_ / "garbage.json").string()}).code, 3);
}

TEST_F(CliTest, AttackOnEmptyLogIsChance) {
  json doc = {{"schema_version", "1.0"}, {"kind", "leaf_log"}, {"class_count", 2},
              {"trees", json::array({json{{"round", 0}, {"class_slot", 0}, {"leaves", json::array()}}})},
              {"probe_rows", {0, 1, 2, 3}}, {"probe_labels", {0, 1, 0, 1}},
              {"known", json::array({json::array({0}), json::array({1})})}};
  std::ofstream(dir_ / "empty.json") << doc.dump();
  ASSERT_EQ(run({"--out", dir_.string(), "attack", "--log", (dir_ / "empty.json").string()}).code, 0);
  const auto r = json::parse(slurp(dir_ / "attack_report.json"));
  EXPECT_EQ(r["privacy_leakage"].get<double>(), 0.5);
  EXPECT_EQ(r["degenerate"], true);
}

TEST_F(CliTest, AttackOnPureSingleTreeIsPerfect) {
  json doc = {{"schema_version", "1.0"}, {"kind", "leaf_log"}, {"class_count", 2},
              {"trees", json::array({json{{"round", 0}, {"class_slot", 0},
                                          {"leaves", json::array({json{{"leaf_id", 1}, {"instances", {0, 2, 4}}},
                                                                  json{{"leaf_id", 2}, {"instances", {1, 3, 5}}}})}}})},
              {"probe_rows", {0, 1, 2, 3, 4, 5}}, {"probe_labels", {0, 1, 0, 1, 0, 1}},
              {"known", json::array({json::array({0}), json::array({1})})}};
  std::ofstream(dir_ / "pure.json") << doc.dump();
  ASSERT_EQ(run({"--out", dir_.string(), "attack", "--log", (dir_ / "pure.json").string()}).code, 0);
  EXPECT_EQ(json::parse(slurp(dir_ / "attack_report.json"))["privacy_leakage"].get<double>(), 1.0);
}

TEST_F(CliTest, OptimizeSmokeDeterministicAndPlots) {
  const std::vector<std::string> common{"--set", "data.rows=300", "--set", "ga.population=4",
                                        "--set", "ga.generations=2", "--workers", "2"};
  auto args_for = [&](const fs::path& out) {
    std::vector<std::string> a{"--out", out.string()};
    a.insert(a.end(), common.begin(), common.end());
    a.push_back("optimize");
    return a;
  };
  ASSERT_EQ(run(args_for(dir_ / "a")).code, 0);
  auto b_args = args_for(dir_ / "b");
  b_args[b_args.size() - 2] = "1";  // other worker count
  ASSERT_EQ(run(b_args).code, 0);
  for (const char* f : {"front.csv", "front.json", "hv_trace.csv", "baselines.csv"})
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
  std::ifstream trace(dir_ / "a" / "hv_trace.csv");
  std::size_t lines = 0;
  for (std::string line; std::getline(trace, line);) ++lines;
  EXPECT_EQ(lines, 4u);  // header + generations 0..2
  const auto front = json::parse(slurp(dir_ / "a" / "front.json"));
  EXPECT_EQ(front["baselines"].size(), 3u);

  const auto plots = dir_ / "plots";
  ASSERT_EQ(run({"plot", "--front", (dir_ / "a" / "front.json").string(), "--trace",
                 (dir_ / "a" / "hv_trace.csv").string(), "--out", plots.string()})
                .code,
            0);
  for (const char* f : {"front_pl_ul.svg", "front_tc_ul.svg", "front_pl_tc.svg", "hv_trace.svg"})
    EXPECT_TRUE(fs::exists(plots / f)) << f;
  const auto svg = slurp(plots / "front_pl_ul.svg");
  for (const char* name : {"Fate", "Emperical", "VF2Boost"}) EXPECT_NE(svg.find(name), std::string::npos);
  EXPECT_NE(svg.find("PL"), std::string::npos);
  EXPECT_NE(svg.find("UL"), std::string::npos);
}

TEST_F(CliTest, PlotRejectsEmptyOrMalformedFront) {
  json empty = {{"schema_version", "1.0"}, {"kind", "front"}, {"front", json::array()},
                {"baselines", json::array()}};
  std::ofstream(dir_ / "empty.json") << empty.dump();
  const auto out = dir_ / "plots";
  EXPECT_EQ(run({"plot", "--front", (dir_ / "empty.json").string(), "--out", out.string()}).code, 3);
  EXPECT_FALSE(fs::exists(out / "front_pl_ul.svg"));
  std::ofstream(dir_ / "wrong.json") << json{{"schema_version", "7.0"}, {"kind", "front"}}.dump();
  EXPECT_EQ(run({"plot", "--front", (dir_ / "wrong.json").string(), "--out", out.string()}).code, 3);
}
