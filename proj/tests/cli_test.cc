//
// Copyright 2026 The agedp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "cli.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace agedp::cli {
namespace {

using ::testing::HasSubstr;
using ::testing::StartsWith;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result Invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string WriteTemp(const std::string& name, const std::string& content) {
  const std::string path = ::testing::TempDir() + "/" + name;
  std::ofstream(path) << content;
  return path;
}

TEST(CliTest, AttackMotivatingExample) {
  const Result r = Invoke({"attack", "--eps", "2", "--p", "0.1", "--q", "0.1", "--t", "0"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, "t,accuracy\n0,0.88080\n");
}

TEST(CliTest, PeakFixedPoint) {
  const Result r = Invoke({"peak", "--age", "2", "--interval", "4", "--eps", "0.5", "--c", "1",
                        "--rho", "0.8", "--format", "json"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_THAT(r.out, HasSubstr("\"epsilon_star\": 0.82361656"));
}

TEST(CliTest, ComposeBasicComposition) {
  const std::string s = WriteTemp("cli_sched.json",
                                  R"([{"S":1,"A":0,"eps_C":0.5},{"S":3,"A":1,"eps_C":0.25}])");
  const Result r = Invoke({"compose", "--schedule", s, "--delta-one"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, "t,epsilon\n0,0\n1,0.5\n2,0.5\n3,0.75\n");
}

TEST(CliTest, RiskFromDecayModel) {
  const std::string d = WriteTemp("cli_decay.json", R"({"c": 1, "rho": 0.8})");
  const Result r = Invoke({"risk", "--decay", d, "--eps", "2", "--horizon", "3"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_THAT(r.out, HasSubstr("\n3,1.45189405"));
}

TEST(CliTest, OptimizeExitCodes) {
  const std::string ok = WriteTemp("cli_ok.json", R"({"c":1,"rho":0.8,"f_bar":0.06,"K":100,
      "penalty":{"kind":"mse-two-state","p":0.1,"q":0.1,"num_users":20}})");
  Result r = Invoke({"optimize", "--problem", ok});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_THAT(r.out, HasSubstr("\"rounded\""));
  const std::string bad = WriteTemp("cli_bad.json", R"({"c":1,"rho":0.8,"f_bar":1e-7,"K":100,
      "penalty":{"kind":"mse-two-state","p":0.1,"q":0.1,"num_users":20}})");
  r = Invoke({"optimize", "--problem", bad});
  EXPECT_EQ(r.code, kExitInfeasible);
  const std::string broken = WriteTemp("cli_broken.json", "{\n\"c\": 1,\n\"rho\": ,\n}");
  r = Invoke({"optimize", "--problem", broken});
  EXPECT_EQ(r.code, kExitInputError);
  EXPECT_THAT(r.err, HasSubstr("line 3"));
}

TEST(CliTest, InputErrorsExitOne) {
  EXPECT_EQ(Invoke({"attack"}).code, kExitInputError);
  EXPECT_EQ(Invoke({"nonsense"}).code, kExitInputError);
  EXPECT_EQ(Invoke({"risk", "--eps", "1"}).code, kExitInputError);
  EXPECT_EQ(Invoke({"risk", "--decay", "/nonexistent.json", "--eps", "1"}).code, kExitInputError);
}

TEST(CliTest, NoPartialOutputOnError) {
  const std::string out = ::testing::TempDir() + "/cli_should_not_exist.csv";
  std::remove(out.c_str());
  const Result r = Invoke({"--out", out, "risk", "--decay", "/nonexistent.json", "--eps", "1"});
  EXPECT_EQ(r.code, kExitInputError);
  EXPECT_FALSE(std::filesystem::exists(out));
}

TEST(CliTest, SimulateIsDeterministicPerSeed) {
  const std::string chain = WriteTemp("cli_chain.json", R"({"states":
      [{"label": "-1", "value": -1}, {"label": "+1", "value": 1}],
      "transition": [[0.9, 0.1], [0.1, 0.9]]})");
  const std::string sched = WriteTemp("cli_sched2.json",
                                      R"([{"S":2,"A":1,"eps_C":1},{"S":4,"A":1,"eps_C":1}])");
  const std::vector<std::string> args{"--seed", "5", "simulate", "--chain", chain,
                                      "--schedule", sched, "--num-users", "4"};
  const Result a = Invoke(args);
  const Result b = Invoke(args);
  EXPECT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_THAT(a.out, StartsWith("query_index,publish_time,input_timestamp,value\n1,2,1,"));
  std::vector<std::string> other = args;
  other[1] = "6";
  EXPECT_NE(Invoke(other).out, a.out);
}

TEST(CliTest, SeedFallsBackToEnvironment) {
  const std::vector<std::string> args{"synth", "--num-users", "2", "--length", "5"};
  setenv("AGEDP_SEED", "77", 1);
  const Result env = Invoke(args);
  unsetenv("AGEDP_SEED");
  std::vector<std::string> explicit_seed{"--seed", "77"};
  explicit_seed.insert(explicit_seed.end(), args.begin(), args.end());
  EXPECT_EQ(env.out, Invoke(explicit_seed).out);
  setenv("AGEDP_SEED", "not-a-number", 1);
  EXPECT_EQ(Invoke(args).code, kExitInputError);
  unsetenv("AGEDP_SEED");
}

TEST(CliTest, SynthIngestAnalyzePipeline) {
  const Result synth = Invoke({"--seed", "3", "synth", "--num-users", "4", "--length", "800"});
  ASSERT_EQ(synth.code, kExitOk) << synth.err;
  const std::string csv = WriteTemp("cli_bundle.csv", synth.out);
  const Result ingest = Invoke({"ingest", "--csv", csv, "--quantization", "equal-width",
                                 "--bins", "4"});
  EXPECT_EQ(ingest.code, kExitOk) << ingest.err;
  EXPECT_THAT(ingest.out, HasSubstr("\"user_id\": \"user003\""));
  const Result analyze = Invoke({"analyze", "--csv", csv, "--quantization", "equal-width",
                                  "--bins", "4", "--reversibilize", "--horizon", "10",
                                  "--mse-samples", "200"});
  EXPECT_EQ(analyze.code, kExitOk) << analyze.err;
  EXPECT_THAT(analyze.out, StartsWith("eps_C,t,delta_bar,epsilon,mse,mse_stderr\n0.5,0,1,0.5,"));
}

TEST(CliTest, SweepWritesFrontier) {
  const Result r = Invoke({"sweep", "--scenario", "two-state-mse", "--ages", "0,5,10,40",
                        "--eps", "0.1,1"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_THAT(r.out, HasSubstr("noise-only,0,0,0.1,0.1,"));
  EXPECT_THAT(r.out, HasSubstr("\nfrontier,"));
}

}  // namespace
}  // namespace agedp::cli
