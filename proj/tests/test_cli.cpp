#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bmit/cli.hpp"
#include "json.hpp"

using namespace bmit;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args, const std::string& stdin_text = "") {
  std::istringstream in(stdin_text);
  std::ostringstream out, err;
  const int code = run_cli(args, in, out, err);
  return {code, out.str(), err.str()};
}

const std::string kTiny = "a,b,k\n1,2,5\n2,4,5\n3,8,5\n4,16,5\n5,1000,5\n";

}  // namespace

TEST(Cli, SynthIsByteIdentical) {
  const auto a = run({"synth", "--family", "independent-uniform", "--n", "5", "--seed", "1"});
  const auto b = run({"synth", "--family", "independent-uniform", "--n", "5", "--seed", "1"});
  EXPECT_EQ(a.code, kExitOk);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 6);
}

TEST(Cli, SynthErrors) {
  EXPECT_EQ(run({"synth", "--family", "spiral"}).code, kExitUsage);
  const auto zero = run({"synth", "--family", "ring", "--n", "0"});
  EXPECT_EQ(zero.code, kExitUsage);
  EXPECT_TRUE(zero.out.empty());
  EXPECT_FALSE(zero.err.empty());
}

TEST(Cli, BaselineMonotone) {
  const auto r = run({"baseline", "-", "--x", "a", "--y", "b"}, kTiny);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["spearman"], 1.0);
  EXPECT_EQ(j["kendall"], 1.0);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({"test", "-", "--x", "a", "--y", "a"}, kTiny).code, kExitUsage);
  EXPECT_EQ(run({"baseline", "-", "--x", "a", "--y", "k"}, kTiny).code, kExitData);
  EXPECT_EQ(run({"test", "-", "--x", "a", "--y", "k"}, kTiny).code, kExitData);
  EXPECT_EQ(run({"test", "-", "--x", "a", "--y", "zz"}, kTiny).code, kExitUsage);
  EXPECT_EQ(run({"test", "-", "--x", "a", "--y", "b", "--prior", "2"}, kTiny).code, kExitUsage);
  EXPECT_EQ(run({"test", "/nonexistent/file.csv", "--x", "a", "--y", "b"}).code, kExitData);
  EXPECT_EQ(run({"test", "-", "--x", "a", "--y", "b"}, "a,b\n1\n").code, kExitData);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({}).code, kExitUsage);
  const auto bad = run({"test", "-", "--x", "a", "--y", "k"}, kTiny);
  EXPECT_TRUE(bad.out.empty());
  EXPECT_NE(bad.err.find("error"), std::string::npos);
}

TEST(Cli, TestReportAndTrace) {
  const auto trace = std::filesystem::temp_directory_path() / "bmit_cli_trace.jsonl";
  const std::string data = "x,y\n0,0\n0,1\n1,0\n1,1\n";
  const auto r = run({"test", "-", "--x", "x", "--y", "y", "--trace", trace.string(), "--full-precision"}, data);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["command"], "test");
  EXPECT_EQ(j["input"]["rows"], 4);
  EXPECT_NEAR(j["result"]["posterior_independence"].get<double>(), 14.0 / 29.0, 1e-15);
  EXPECT_EQ(j["result"]["decision"], "dependent");
  EXPECT_EQ(j["result"]["t_star"], 1);
  EXPECT_FALSE(j.contains("duration_ms"));
  EXPECT_FALSE(j["config"].contains("threads"));

  std::ifstream in(trace);
  std::string line;
  ASSERT_TRUE(std::getline(in, line));
  const auto rec = json::parse(line);
  EXPECT_EQ(rec["t"], 1);
  EXPECT_NEAR(rec["p"].get<double>(), 15.0 / 29.0, 1e-15);
  EXPECT_EQ(rec["move"]["type"], "xy");
  EXPECT_EQ(rec["resolution"], json::array({2, 2}));
  EXPECT_FALSE(std::getline(in, line));
  std::filesystem::remove(trace);
}

TEST(Cli, ThreadsDoNotChangeReport) {
  const auto data = run({"synth", "--family", "nonlinear-sine", "--n", "300", "--seed", "3"}).out;
  const auto one = run({"test", "-", "--x", "x", "--y", "y", "--threads", "1", "--baselines"}, data);
  const auto many = run({"test", "-", "--x", "x", "--y", "y", "--threads", "8", "--baselines"}, data);
  ASSERT_EQ(one.code, kExitOk) << one.err;
  EXPECT_EQ(one.out, many.out);
  EXPECT_EQ(json::parse(one.out)["result"]["decision"], "dependent");
}

TEST(Cli, ConditioningAndHints) {
  const std::string data = "x,y,g\n0,0,a\n1,1,b\n2,0,a\n3,1,b\n4,0,a\n5,1,b\n";
  const auto r = run({"test", "-", "--x", "x", "--y", "y", "--cond", "g", "--col", "g:categorical"}, data);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(json::parse(r.out)["config"]["cond"], json::array({"g"}));
  EXPECT_EQ(run({"test", "-", "--x", "x", "--y", "y", "--col", "g:bogus"}, data).code, kExitUsage);
}
