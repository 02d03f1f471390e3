#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace {

struct Outcome {
  int code;
  std::string out;
};

Outcome rcm_cli(const std::string& args) {
  const std::string cmd = std::string(RCM_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t got = fread(buf, 1, sizeof buf, pipe)) out.append(buf, got);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "rcm_cli_tests";
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace

TEST(Cli, HelpListsSubcommandsAndFlags) {
  auto top = rcm_cli("--help");
  EXPECT_EQ(top.code, 0);
  for (const char* word : {"theory", "build", "run", "sweep", "oracle"}) EXPECT_NE(top.out.find(word), std::string::npos);
  auto run = rcm_cli("run --help");
  EXPECT_EQ(run.code, 0);
  for (const char* flag : {"--experiment", "--g", "--dim", "--n", "--reps", "--seed", "--b", "--gamma", "--beta-prime",
                           "--t", "--mode", "--out", "--threads", "--config"})
    EXPECT_NE(run.out.find(flag), std::string::npos) << flag;
}

TEST(Cli, TheoryForIndicator) {
  auto r = rcm_cli("theory --g indicator --dim 2 --n 100,1000");
  ASSERT_EQ(r.code, 0);
  auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["beta"].get<double>(), 1.0);
  EXPECT_NEAR(doc["alpha"].get<double>(), 3.141592653589793, 1e-15);
  EXPECT_EQ(doc["table"].size(), 2u);
  EXPECT_EQ(doc["predictions"]["isolated_mean"]["claim"], "exact_limit");
}

TEST(Cli, BuildAtZeroRadius) {
  auto r = rcm_cli("build --g indicator --dim 2 --n 10 --r 0 --seed 3");
  ASSERT_EQ(r.code, 0);
  auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["edges"], 0);
  EXPECT_EQ(doc["isolated"], doc["N"]);
}

TEST(Cli, ValidationErrorsExitTwo) {
  EXPECT_EQ(rcm_cli("theory --g bogus --dim 2").code, 2);
  EXPECT_EQ(rcm_cli("theory --g exp:1 --dim 9").code, 2);
  EXPECT_EQ(rcm_cli("theory --g exp:1 --dim 0").code, 2);
  EXPECT_EQ(rcm_cli("theory --g exp:1 --gamma 0").code, 2);
  EXPECT_EQ(rcm_cli("theory --g pow:2 --dim 2").code, 2);
  EXPECT_EQ(rcm_cli("theory --g exp:1 --no-such-flag 1").code, 2);
  EXPECT_EQ(rcm_cli("frobnicate").code, 2);
  EXPECT_EQ(rcm_cli("run --experiment isolated_mean --g exp:1 --n 100 --reps 2 --out /nonexistent-dir/x").code, 2);
  EXPECT_EQ(rcm_cli("run --experiment nope --g exp:1 --n 100 --reps 2 --out " + temp_dir() + "/x").code, 2);
}

TEST(Cli, RunIsReproducible) {
  const std::string a = temp_dir() + "/a", b = temp_dir() + "/b";
  const std::string args = "--experiment isolated_mean --g exp:1 --dim 2 --n 100,200 --reps 5 --seed 9 --threads 2 --out ";
  ASSERT_EQ(rcm_cli("run " + args + a).code, 0);
  ASSERT_EQ(rcm_cli("run " + args + b).code, 0);
  EXPECT_EQ(slurp(a + ".raw.csv"), slurp(b + ".raw.csv"));
  EXPECT_EQ(slurp(a + ".summary.json"), slurp(b + ".summary.json"));
  EXPECT_FALSE(slurp(a + ".raw.csv").empty());
}

TEST(Cli, ConfigFileWithFlagOverride) {
  const std::string dir = temp_dir();
  std::ofstream(dir + "/cfg.json") << R"({"experiment": "dn_ratio", "g": "exp:1", "dim": 2, "n": [100, 300],
                                          "reps": 3, "seed": 4, "out": ")" << dir << R"(/cfg"})";
  auto r = rcm_cli("sweep --config " + dir + "/cfg.json --reps 2");
  ASSERT_EQ(r.code, 0);
  auto doc = nlohmann::json::parse(slurp(dir + "/cfg.summary.json"));
  EXPECT_EQ(doc["config"]["reps"], 2);
  EXPECT_EQ(doc["seed"], 4);
  EXPECT_TRUE(doc["coupled"].get<bool>());
}

TEST(Cli, OracleReportsCounts) {
  auto r = rcm_cli("oracle --g exp:1 --seeds 5 --n 40");
  ASSERT_EQ(r.code, 0);
  auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["failures"], 0);
  EXPECT_GT(doc["checks"].get<int>(), 0);
}
