// Copyright 2026 The spikediff Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Runs the command-line binary and checks exit codes and artifacts.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("spikediff_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write_config(const std::string& name, const std::string& body) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << body;
    return p.string();
  }

  int run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + SPIKEDIFF_CLI_PATH + " " + args + " > " +
                            (dir_ / "stdout").string() + " 2> " + (dir_ / "stderr").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string slurp(const std::string& name) {
    std::ifstream in(dir_ / name);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
};

const char* kCurve = R"({"experiment": "mse-curve", "n": 30, "k": 4,
  "denoisers": [{"id": "alg1"}, {"id": "null"}],
  "grid": {"kind": "log", "lo": 2, "hi": 120, "points": 5}, "trials": 5, "seed": 3})";

TEST_F(Cli, WritesCurveAndReplaysByteIdentical) {
  const std::string cfg = write_config("c.json", kCurve);
  const std::string a = (dir_ / "a.csv").string();
  const std::string b = (dir_ / "b.csv").string();
  ASSERT_EQ(run("mse-curve --config " + cfg + " --out " + a), 0);
  ASSERT_EQ(run("mse-curve --config " + cfg + " --out " + b + " --threads 2"), 0);
  const std::string ta = slurp("a.csv");
  EXPECT_FALSE(ta.empty());
  EXPECT_EQ(ta, slurp("b.csv"));
}

TEST_F(Cli, SeedFlagOverridesConfig) {
  const std::string cfg = write_config("c.json", kCurve);
  ASSERT_EQ(run("mse-curve --config " + cfg + " --out - --seed 11"), 0);
  EXPECT_NE(slurp("stdout").find("\"seed\":11"), std::string::npos);
}

TEST_F(Cli, UnknownEstimatorExitsTwo) {
  const std::string cfg = write_config("c.json", R"({"experiment": "mse-curve", "n": 30,
    "k": 4, "denoisers": [{"id": "alg9"}],
    "grid": {"kind": "linear", "lo": 1, "hi": 2, "points": 2}, "trials": 2, "seed": 1})");
  const std::string out = (dir_ / "x.csv").string();
  EXPECT_EQ(run("mse-curve --config " + cfg + " --out " + out), 2);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_NE(slurp("stderr").find("alg9"), std::string::npos);
}

TEST_F(Cli, ConfigProblemsExitTwo) {
  EXPECT_EQ(run("mse-curve --config " + (dir_ / "missing.json").string()), 2);
  const std::string bad = write_config("bad.json", "{\"n\": ");
  EXPECT_EQ(run("mse-curve --config " + bad), 2);
  const std::string cfg = write_config("c.json", kCurve);
  EXPECT_EQ(run("generate --config " + cfg), 2);
  EXPECT_EQ(run("frobnicate --config " + cfg), 2);
  EXPECT_EQ(run("mse-curve --config " + cfg + " --out " + (dir_ / "no/dir.csv").string()), 2);
}

TEST_F(Cli, EnumerationCapExitsThree) {
  const std::string cfg = write_config("o.json", R"({"experiment": "oracle-phase", "n": 8,
    "k": 2, "grid": {"kind": "explicit", "values": [1.0]}, "trials": 2, "seed": 1})");
  EXPECT_EQ(run("oracle-phase --config " + cfg + " --out -"), 0);
  EXPECT_EQ(run("oracle-phase --config " + cfg + " --out -", "DBL_ENUM_CAP=100"), 3);
  EXPECT_NE(slurp("stderr").find("112"), std::string::npos);  // C(8,2)·4 atoms
  EXPECT_EQ(run("oracle-phase --config " + cfg + " --out -", "DBL_ENUM_CAP=lots"), 2);
}

TEST_F(Cli, OutputKeyInConfig) {
  const std::string out = (dir_ / "from_config.json").string();
  const std::string cfg = write_config("r.json", R"({"experiment": "reduction", "n": 4,
    "k": 1, "sigma": 0.7, "theta": 2, "delta": 0.5, "repeats": 3, "seed": 2,
    "output": ")" + out + "\"}");
  EXPECT_EQ(run("reduction --config " + cfg), 0);
  EXPECT_TRUE(fs::exists(out));
}

}  // namespace
