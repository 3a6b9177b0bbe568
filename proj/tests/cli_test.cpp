// Copyright 2026 The Activesense Authors
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

#include "activesense/cli.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"

namespace activesense {
namespace {

namespace fs = std::filesystem;
using testing_fixtures::json;
using testing_fixtures::slurp;

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    auto doc = testing_fixtures::tiny_doc();
    doc["humanoids"][0]["right_swing"] = {{"shoulder", {-0.2, 0.0, 1.3}},
                                          {"axis", {0.0, 1.0, 0.0}},
                                          {"amplitude_deg", 50.0},
                                          {"frequency_hz", 0.7}};
    scenario_ = testing_fixtures::write_temp("cli", doc.dump(1));
    root_ = scenario_.parent_path();
  }
  void TearDown() override { fs::remove_all(root_); }

  int run(const std::string& policy, const std::string& sub, bool trace = false,
          std::optional<std::uint64_t> seed = std::nullopt) {
    std::ostringstream out;
    err_.str("");
    return cmd_run({scenario_.string(), policy, (root_ / sub).string(), seed, trace}, out, err_);
  }

  fs::path scenario_, root_;
  std::ostringstream err_;
};

TEST_F(CliTest, RunWritesArtifacts) {
  ASSERT_EQ(run("tcp", "out"), kExitOk) << err_.str();
  const auto dir = root_ / "out";
  const auto cov = slurp(dir / "coverage.csv");
  EXPECT_EQ(cov.rfind("part,ratio\nBody,", 0), 0u);
  EXPECT_EQ(count_lines(cov), 7);
  EXPECT_NE(cov.find("\nAvg,"), std::string::npos);

  const auto cpe = slurp(dir / "cpe_trace.csv");
  EXPECT_EQ(cpe.substr(0, cpe.find('\n')),
            "t,p_c,h/Body,h/RA,h/RH,h/LA,h/LH,potential,potential_count");
  EXPECT_EQ(count_lines(cpe), 21);
  EXPECT_EQ(count_lines(slurp(dir / "axes.csv")), 21);
  EXPECT_FALSE(fs::exists(dir / "sr_depth.csv"));

  const auto manifest = json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest["policy"], "tcp");
  EXPECT_EQ(manifest["seed"], 7);
  EXPECT_EQ(manifest["steps"], 20);
  EXPECT_EQ(manifest["version"], kVersion);
  EXPECT_EQ(manifest["config"]["name"], "tiny");
  EXPECT_EQ(manifest["outputs"].size(), 3u);
}

TEST_F(CliTest, TraceAddsDepthAndPlannerFiles) {
  ASSERT_EQ(run("cease", "traced", true), kExitOk) << err_.str();
  const auto dir = root_ / "traced";
  // Header plus one row per cell per step.
  EXPECT_EQ(count_lines(slurp(dir / "sr_depth.csv")), 1 + 20 * 16 * 8);
  const auto jsonl = slurp(dir / "planner_trace.jsonl");
  EXPECT_EQ(count_lines(jsonl), 20);
  const auto first = json::parse(jsonl.substr(0, jsonl.find('\n')));
  EXPECT_EQ(first["cameras"].size(), 1u);
  EXPECT_EQ(first["cameras"][0]["scores"].size(), first["cameras"][0]["candidates"]);
}

TEST_F(CliTest, RepeatedRunsAreByteIdentical) {
  ASSERT_EQ(run("cease", "a"), kExitOk);
  ASSERT_EQ(run("cease", "b"), kExitOk);
  for (const char* f : {"coverage.csv", "cpe_trace.csv", "axes.csv"}) {
    EXPECT_EQ(slurp(root_ / "a" / f), slurp(root_ / "b" / f)) << f;
  }
}

TEST_F(CliTest, SeedOverrideIsRecorded) {
  ASSERT_EQ(run("fixed", "seeded", false, 99), kExitOk);
  const auto manifest = json::parse(slurp(root_ / "seeded" / "manifest.json"));
  EXPECT_EQ(manifest["seed"], 99);
  EXPECT_EQ(manifest["config"]["seed"], 99);
}

TEST_F(CliTest, InputErrorsExitWith2) {
  EXPECT_EQ(run("greedy", "x"), kExitInput);
  EXPECT_NE(err_.str().find("unknown policy"), std::string::npos);

  std::ostringstream out, err;
  EXPECT_EQ(cmd_run({(root_ / "missing.json").string(), "tcp", (root_ / "y").string(),
                     std::nullopt, false},
                    out, err),
            kExitInput);
  EXPECT_NE(err.str().find("missing.json"), std::string::npos);

  const auto bad = root_ / "bad.json";
  std::ofstream(bad) << "{\"schema_version\": 1}";
  EXPECT_EQ(cmd_validate(bad.string(), out, err), kExitInput);
  EXPECT_NE(err.str().find("$.cameras"), std::string::npos);
}

TEST_F(CliTest, UnwritableOutputExitsWith3) {
  // A regular file cannot hold a subdirectory.
  const auto blocker = root_ / "blocker";
  std::ofstream(blocker) << "x";
  std::ostringstream out, err;
  EXPECT_EQ(cmd_run({scenario_.string(), "tcp", (blocker / "out").string(), std::nullopt, false},
                    out, err),
            kExitEnvironment);
  EXPECT_EQ(cmd_compare(scenario_.string(), {"fixed", "tcp"}, (blocker / "cmp").string(),
                        std::nullopt, out, err),
            kExitEnvironment);
}

TEST_F(CliTest, ValidateAcceptsGoodScenario) {
  std::ostringstream out, err;
  EXPECT_EQ(cmd_validate(scenario_.string(), out, err), kExitOk);
  EXPECT_NE(out.str().find("ok"), std::string::npos);
}

TEST_F(CliTest, CompareNeedsTwoKnownPolicies) {
  std::ostringstream out, err;
  EXPECT_EQ(cmd_compare(scenario_.string(), {"tcp"}, (root_ / "c").string(), std::nullopt, out,
                        err),
            kExitInput);
  EXPECT_EQ(cmd_compare(scenario_.string(), {"tcp", "nope"}, (root_ / "c").string(),
                        std::nullopt, out, err),
            kExitInput);
}

TEST_F(CliTest, CompareWritesTableAndPerPolicyRuns) {
  std::ostringstream out, err;
  ASSERT_EQ(cmd_compare(scenario_.string(), split_policies("fixed, tcp,cease"),
                        (root_ / "cmp").string(), std::nullopt, out, err),
            kExitOk)
      << err.str();
  const auto csv = slurp(root_ / "cmp" / "compare.csv");
  EXPECT_EQ(csv.rfind("policy,Body,RA,RH,LA,LH,Avg\nfixed,", 0), 0u);
  EXPECT_EQ(count_lines(csv), 4);
  for (const char* p : {"fixed", "tcp", "cease"}) {
    EXPECT_TRUE(fs::exists(root_ / "cmp" / p / "coverage.csv")) << p;
  }
  EXPECT_EQ(count_lines(out.str()), 4);
}

TEST(SplitPolicies, TrimsSpacesAndEmptyItems) {
  EXPECT_EQ(split_policies(" fixed,,tcp ,cease,"),
            (std::vector<std::string>{"fixed", "tcp", "cease"}));
}

}  // namespace
}  // namespace activesense
