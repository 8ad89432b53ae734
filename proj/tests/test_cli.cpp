// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "beamtrack");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = beamtrack::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("beamtrack_cli_" + std::string(
                                    ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  std::string dir(const std::string& name) const { return (root_ / name).string(); }

  fs::path root_;
};

// Every CSV file in `a` exists in `b` with the same bytes.
void expect_same_csvs(const fs::path& a, const fs::path& b) {
  int seen = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    if (e.path().extension() != ".csv") continue;
    ++seen;
    EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename())) << e.path().filename();
  }
  EXPECT_GT(seen, 0);
}

}  // namespace

TEST_F(CliTest, UsageErrorsExitNonzero) {
  EXPECT_NE(invoke({}).code, 0);
  EXPECT_NE(invoke({"teleport"}).code, 0);
  EXPECT_NE(invoke({"static", "--trials", "-3"}).code, 0);
  EXPECT_NE(invoke({"static", "--bogus"}).code, 0);
  EXPECT_NE(invoke({"static", "--algorithms", "music", "--out", dir("x")}).code, 0);
  EXPECT_NE(invoke({"static", "--config", dir("missing.json")}).code, 0);
  EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST_F(CliTest, ConfigFileThenFlagsOverride) {
  const auto cfg = root_ / "run.json";
  std::ofstream(cfg) << R"({"trials": 3, "slots": 40, "algorithms": ["recursive"], "seed": 5})";
  const auto r = invoke({"static", "--config", cfg.string(), "--slots", "20", "--out", dir("o")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto manifest = nlohmann::json::parse(slurp(root_ / "o" / "run.json"));
  EXPECT_EQ(manifest["config"]["trials"], 3);
  EXPECT_EQ(manifest["config"]["slots"], 20);
  EXPECT_EQ(manifest["seed"], 5);
  EXPECT_EQ(manifest["subcommand"], "static");
  EXPECT_TRUE(manifest.contains("version"));
  for (const auto& f : manifest["outputs"]) {
    EXPECT_TRUE(fs::exists(root_ / "o" / f.get<std::string>())) << f;
  }
  std::ofstream(root_ / "bad.json") << R"({"trials": "many"})";
  EXPECT_EQ(invoke({"static", "--config", (root_ / "bad.json").string(), "--out", dir("b")}).code,
            2);
}

TEST_F(CliTest, StaticSmokeIsDeterministicAcrossJobs) {
  const std::vector<std::string> base{"static", "--trials", "10", "--slots", "200", "--seed", "3"};
  auto a = base;
  a.insert(a.end(), {"--out", dir("a"), "--jobs", "1"});
  auto b = base;
  b.insert(b.end(), {"--out", dir("b"), "--jobs", "4"});
  ASSERT_EQ(invoke(a).code, 0);
  ASSERT_EQ(invoke(b).code, 0);
  expect_same_csvs(root_ / "a", root_ / "b");
  EXPECT_EQ(slurp(root_ / "a" / "run.json"), slurp(root_ / "b" / "run.json"));
  EXPECT_TRUE(fs::exists(root_ / "a" / "static.gp"));
  EXPECT_TRUE(fs::exists(root_ / "a" / "static_compressed_sensing.csv"));
}

TEST_F(CliTest, StaticSnrRescalesBound) {
  const std::vector<std::string> base{"static", "--trials", "2", "--slots", "50",
                                      "--algorithms", "recursive"};
  auto hi = base;
  hi.insert(hi.end(), {"--out", dir("hi")});
  auto lo = base;
  lo.insert(lo.end(), {"--out", dir("lo"), "--snr-db", "0"});
  ASSERT_EQ(invoke(hi).code, 0);
  ASSERT_EQ(invoke(lo).code, 0);
  auto last_bound = [](const std::string& csv) {
    const auto line = csv.substr(csv.rfind('\n', csv.size() - 2) + 1);
    return std::stod(line.substr(line.rfind(',') + 1));
  };
  EXPECT_NEAR(last_bound(slurp(root_ / "lo" / "static_recursive.csv")) /
                  last_bound(slurp(root_ / "hi" / "static_recursive.csv")),
              10.0, 1e-9);
}

TEST_F(CliTest, DynamicAndSweepSpeedAreDeterministic) {
  for (const std::string sub : {"dynamic", "sweep-speed"}) {
    std::vector<std::string> base{sub, "--trials", "3", "--slots", "80", "--seed", "11"};
    if (sub == "sweep-speed") base.insert(base.end(), {"--omega-points", "3"});
    auto a = base;
    a.insert(a.end(), {"--out", dir(sub + "a"), "--jobs", "1"});
    auto b = base;
    b.insert(b.end(), {"--out", dir(sub + "b"), "--jobs", "2"});
    ASSERT_EQ(invoke(a).code, 0) << sub;
    ASSERT_EQ(invoke(b).code, 0) << sub;
    expect_same_csvs(root_ / (sub + "a"), root_ / (sub + "b"));
  }
  const auto sweep = slurp(root_ / "sweep-speeda" / "sweep_speed.csv");
  EXPECT_EQ(sweep.substr(0, sweep.find('\n')), "omega,algorithm,track_antennas,mean_rate,mean_mse_h");
  EXPECT_NE(sweep.find(",recursive,4,"), std::string::npos);
  EXPECT_NE(sweep.find(",recursive,8,"), std::string::npos);
  EXPECT_NE(sweep.find(",ieee80211ad,16,"), std::string::npos);
  EXPECT_TRUE(fs::exists(root_ / "dynamica" / "dynamic_recursive_trace.csv"));
}

TEST_F(CliTest, CrlbPrintsFrozenConstants) {
  const auto r = invoke({"crlb", "--out", dir("c")});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("(18000 pi^2)"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("alpha_star = 0.0106103295395"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("limit = 0.0688888888889"), std::string::npos) << r.out;
  const auto csv = slurp(root_ / "c" / "crlb.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,crlb_min,crlb_h");
}

TEST_F(CliTest, StablePointsForEightElements) {
  const auto r = invoke({"analyze-stable-points", "--antennas", "8", "--out", dir("s")});
  ASSERT_EQ(r.code, 0);
  std::istringstream in(slurp(root_ / "s" / "stable_points.csv"));
  std::string line;
  std::getline(in, line);
  std::vector<double> v;
  while (std::getline(in, line)) {
    const auto a = line.find(',');
    const auto b = line.find(',', a + 1);
    v.push_back(std::stod(line.substr(a + 1, b - a - 1)));
    EXPECT_LT(std::stod(line.substr(b + 1)), 0.0);
  }
  ASSERT_EQ(v.size(), 7u);
  for (std::size_t i = 1; i < v.size(); ++i) EXPECT_NEAR(v[i] - v[i - 1], 2.0 / 7.0, 1e-9);
  EXPECT_TRUE(fs::exists(root_ / "s" / "surrogate_curve.csv"));
}

TEST_F(CliTest, InitQualityWritesTable) {
  const auto r = invoke({"init-quality", "--trials", "200", "--snr-list", "0,10", "--factors",
                         "2,4", "--out", dir("q")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = slurp(root_ / "q" / "init_quality.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}
