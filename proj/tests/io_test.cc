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

#include "agedp/io.h"

#include <cstdio>
#include <filesystem>
#include <limits>
#include <string>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace agedp {
namespace {

using ::agedp::testing::StatusIs;
using ::testing::HasSubstr;
using ::testing::StartsWith;

TEST(ChainJsonTest, RoundTrip) {
  const FiniteMarkovChain c = TwoStateChain(0.1, 0.3).value();
  ASSERT_OK_AND_ASSIGN(const FiniteMarkovChain back, ParseChainJson(ChainToJson(c)));
  EXPECT_EQ(back.states()[1].label, "+1");
  EXPECT_EQ(back.transition(), c.transition());
}

TEST(ChainJsonTest, ReportsLineAndColumn) {
  EXPECT_THAT(ParseChainJson("{\n  \"states\": [\n    {\"label\": \"a\", \"value\": }\n]}"),
              StatusIs(absl::StatusCode::kInvalidArgument, HasSubstr("line 3")));
  EXPECT_THAT(ParseChainJson(R"({"states": [{"label": "a", "value": 0}], "transition": [[0.5]]})"),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(ParseChainJson(R"({"states": [{"label": "a"}], "transition": [[1]]})"),
              StatusIs(absl::StatusCode::kInvalidArgument, HasSubstr("value")));
}

TEST(ScheduleJsonTest, RoundTripAndValidation) {
  ASSERT_OK_AND_ASSIGN(const PolicySchedule s,
                       ParseScheduleJson(R"([{"S": 2, "A": 1, "eps_C": 0.5}, {"S": 5, "A": 0, "eps_C": 1}])"));
  ASSERT_EQ(s.size(), 2u);
  ASSERT_OK_AND_ASSIGN(const PolicySchedule back, ParseScheduleJson(ScheduleToJson(s)));
  EXPECT_EQ(back.entries()[1].publish_time, 5);
  EXPECT_THAT(ParseScheduleJson(R"([{"S": 2.5, "A": 1, "eps_C": 0.5}])"),
              StatusIs(absl::StatusCode::kInvalidArgument, HasSubstr("entry 1")));
  EXPECT_THAT(ParseScheduleJson(R"([{"S": 1, "A": 2, "eps_C": 0.5}])"),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(ProblemJsonTest, PenaltyKinds) {
  ASSERT_OK_AND_ASSIGN(const OptimizationProblem p, ParseProblemJson(R"({
      "c": 1, "rho": 0.8, "f_bar": 0.06, "K": 50,
      "penalty": {"kind": "mse-two-state", "p": 0.1, "q": 0.1, "num_users": 20}})"));
  EXPECT_EQ(p.K, 50);
  EXPECT_EQ(p.phi, 1e-6);
  EXPECT_GT(p.penalty(10, 1.0), p.penalty(1, 1.0));
  EXPECT_OK(ParseProblemJson(R"({"f_bar": 0.3, "penalty": {"kind": "failure-rate",
      "p": 0.1, "q": 0.1, "num_users": 5, "x0_plus_count": 3}})").status());
  EXPECT_OK(ParseProblemJson(R"({"f_bar": 0.3, "penalty": {"kind": "ar1-mse",
      "rho": 0.8, "sigma": 1, "num_users": 5, "convention": "laplace"}})").status());
  EXPECT_OK(ParseProblemJson(R"({"f_bar": 0.3, "penalty": {"kind": "table",
      "ages": [0, 10], "eps": [1, 2], "values": [[0, 0], [1, 0.5]]}})").status());
  EXPECT_THAT(ParseProblemJson(R"({"f_bar": 0.3, "penalty": {"kind": "magic"}})"),
              StatusIs(absl::StatusCode::kInvalidArgument, HasSubstr("magic")));
  EXPECT_THAT(ParseProblemJson(R"({"penalty": {"kind": "table"}})"),
              StatusIs(absl::StatusCode::kInvalidArgument, HasSubstr("f_bar")));
}

TEST(CsvTest, Headers) {
  RiskCurve c;
  c.values = {0.5, 0.25};
  EXPECT_EQ(RiskCurveToCsv(c), "t,epsilon\n0,0.5\n1,0.25\n");
  EXPECT_THAT(TradeoffToCsv({{"combined", 3, 0, 0.5, 0.1, 0.2, 0.0}}),
              StartsWith("scheme,knob_t_or_A,knob_S,eps_C,risk,loss,loss_stderr\ncombined,3,0,"));
  PublishedOutput o{Eigen::VectorXd::Constant(1, 0.75), 4, 2, 1};
  EXPECT_EQ(OutputsToCsv({o}), "query_index,publish_time,input_timestamp,value\n1,4,2,0.75\n");
}

TEST(FormatDoubleTest, RoundTripsAndNonFinite) {
  EXPECT_EQ(FormatDouble(0.1), "0.1");
  EXPECT_EQ(FormatDouble(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(std::stod(FormatDouble(1.0 / 3)), 1.0 / 3);
}

TEST(FileTest, AtomicWriteAndRead) {
  const std::string dir = ::testing::TempDir();
  const std::string path = dir + "/agedp_io_test.txt";
  ASSERT_OK(WriteFileAtomic(path, "hello\n"));
  EXPECT_THAT(ReadFile(path), agedp::testing::IsOkAndHolds(std::string("hello\n")));
  EXPECT_FALSE(std::filesystem::exists(path + ".tmp"));
  EXPECT_THAT(ReadFile(dir + "/does-not-exist"), StatusIs(absl::StatusCode::kNotFound));
  EXPECT_FALSE(WriteFileAtomic(dir + "/no/such/dir/file", "x").ok());
  std::remove(path.c_str());
}

}  // namespace
}  // namespace agedp
