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

#include "agedp/mechanisms.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace agedp {
namespace {

using ::agedp::testing::IsOkAndHolds;
using ::agedp::testing::StatusIs;
using ::testing::DoubleNear;
using ::testing::HasSubstr;

// Two-sample Kolmogorov-Smirnov statistic.
double KsStatistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

TEST(L1SensitivityTest, MeanOfBinaryValues) {
  const int n = 5;
  std::vector<std::vector<double>> values(n, {0.0, 1.0});
  EXPECT_THAT(L1Sensitivity(QueryFunction::Mean(n), values),
              IsOkAndHolds(DoubleNear(1.0 / n, 1e-15)));
}

TEST(L1SensitivityTest, MeanOfSignsBruteForce) {
  for (int n = 1; n <= 6; ++n) {
    std::vector<std::vector<double>> values(n, {-1.0, 1.0});
    EXPECT_THAT(L1Sensitivity(QueryFunction::Mean(n), values),
                IsOkAndHolds(DoubleNear(2.0 / n, 1e-15)));
  }
}

TEST(L1SensitivityTest, ConstantIsZero) {
  Eigen::VectorXd v(2);
  v << 3, 4;
  std::vector<std::vector<double>> values(3, {0.0, 1.0});
  EXPECT_THAT(L1Sensitivity(QueryFunction::Constant(3, v), values), IsOkAndHolds(0.0));
}

TEST(L1SensitivityTest, LargeSpaceUsesStructureOrDeclaration) {
  const int n = 40;
  std::vector<std::vector<double>> values(n, {-1.0, 1.0});
  EXPECT_THAT(L1Sensitivity(QueryFunction::Sum(n), values), IsOkAndHolds(DoubleNear(2.0, 1e-15)));
  auto max_fn = [](std::span<const double> x) {
    Eigen::VectorXd out(1);
    out(0) = *std::max_element(x.begin(), x.end());
    return out;
  };
  EXPECT_THAT(L1Sensitivity(QueryFunction::Custom(n, 1, max_fn), values),
              StatusIs(absl::StatusCode::kResourceExhausted, HasSubstr("declare")));
  EXPECT_THAT(L1Sensitivity(QueryFunction::Custom(n, 1, max_fn, 2.0), values),
              IsOkAndHolds(2.0));
}

TEST(L1SensitivityTest, UnderDeclaredSensitivityIsRejected) {
  auto sum_fn = [](std::span<const double> x) {
    Eigen::VectorXd out(1);
    out(0) = x[0] + x[1];
    return out;
  };
  std::vector<std::vector<double>> values(2, {0.0, 1.0});
  EXPECT_THAT(L1Sensitivity(QueryFunction::Custom(2, 1, sum_fn, 0.5), values),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(LaplaceMechanismTest, RejectsNonPositiveBudget) {
  EXPECT_THAT(LaplaceMechanism::Create(QueryFunction::Mean(2), 1.0, 0.0),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(LaplaceMechanism::Create(QueryFunction::Mean(2), 1.0, -1.0),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(LaplaceMechanismTest, HugeBudgetIsNearlyExact) {
  ASSERT_OK_AND_ASSIGN(const LaplaceMechanism m,
                       LaplaceMechanism::Create(QueryFunction::Mean(4), 0.5, 1e6));
  Rng rng(1);
  const std::vector<double> db{1, -1, 1, 1};
  for (int i = 0; i < 100; ++i) {
    ASSERT_OK_AND_ASSIGN(const Eigen::VectorXd out, m.Release(db, rng));
    EXPECT_NEAR(out(0), 0.5, 1e-3);
  }
}

TEST(LaplaceMechanismTest, FixedSeedIsDeterministic) {
  ASSERT_OK_AND_ASSIGN(const LaplaceMechanism m,
                       LaplaceMechanism::Create(QueryFunction::Mean(3), 2.0 / 3, 0.7));
  const std::vector<double> db{1, -1, 1};
  Rng a(5), b(5);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(m.Release(db, a).value()(0), m.Release(db, b).value()(0));
  EXPECT_NEAR(m.scale(), (2.0 / 3) / 0.7, 1e-15);
}

TEST(LaplaceMechanismTest, RejectsWrongArity) {
  ASSERT_OK_AND_ASSIGN(const LaplaceMechanism m,
                       LaplaceMechanism::Create(QueryFunction::Mean(3), 1.0, 1.0));
  Rng rng(1);
  EXPECT_THAT(m.Release(std::vector<double>{1.0}, rng),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(AgingMechanismTest, ZeroAgeMatchesBase) {
  std::vector<FiniteMarkovChain> chains{TwoStateChain(0.1, 0.1).value()};
  ASSERT_OK_AND_ASSIGN(const LaplaceMechanism base,
                       LaplaceMechanism::Create(QueryFunction::Mean(2), 1.0, 1.0));
  ASSERT_OK_AND_ASSIGN(const AgingMechanism aged,
                       AgingMechanism::Create(base.AsMechanism(), chains, 2, 0));
  Rng rng(3);
  const std::vector<int> states{1, 0};
  std::vector<double> a, b;
  for (int i = 0; i < 10000; ++i) {
    a.push_back(aged.Release(states, rng).value()(0));
    b.push_back(base.Release(std::vector<double>{1.0, -1.0}, rng).value()(0));
  }
  const double n = a.size();
  EXPECT_LT(KsStatistic(a, b), 1.628 * std::sqrt(2.0 / n));
}

TEST(AgingMechanismTest, LongAgeForgetsStartingDatabase) {
  std::vector<FiniteMarkovChain> chains{TwoStateChain(0.1, 0.1).value()};
  ASSERT_OK_AND_ASSIGN(const LaplaceMechanism base,
                       LaplaceMechanism::Create(QueryFunction::Mean(2), 1.0, 1.0));
  ASSERT_OK_AND_ASSIGN(const AgingMechanism aged,
                       AgingMechanism::Create(base.AsMechanism(), chains, 2, 200));
  Rng rng(4);
  std::vector<double> a, b;
  for (int i = 0; i < 10000; ++i) {
    a.push_back(aged.Release(std::vector<int>{1, 1}, rng).value()(0));
    b.push_back(aged.Release(std::vector<int>{0, 0}, rng).value()(0));
  }
  EXPECT_LT(KsStatistic(a, b), 1.628 * std::sqrt(2.0 / 10000));
}

TEST(AgingMechanismTest, ChainCountMustMatch) {
  std::vector<FiniteMarkovChain> chains{TwoStateChain(0.1, 0.1).value(),
                                        TwoStateChain(0.2, 0.1).value()};
  ASSERT_OK_AND_ASSIGN(const LaplaceMechanism base,
                       LaplaceMechanism::Create(QueryFunction::Mean(3), 1.0, 1.0));
  EXPECT_THAT(AgingMechanism::Create(base.AsMechanism(), chains, 3, 1),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(RunMultiQueryTest, UniformScheduleTimestamps) {
  std::vector<FiniteMarkovChain> chains{TwoStateChain(0.1, 0.1).value()};
  ASSERT_OK_AND_ASSIGN(const PolicySchedule s, PolicySchedule::Uniform({2, 4, 1.0}, 12));
  Rng rng(7);
  ASSERT_OK_AND_ASSIGN(const std::vector<PublishedOutput> out,
                       RunMultiQuery(s, chains, QueryFunction::Mean(5), 40, rng));
  ASSERT_EQ(out.size(), 10u);
  for (size_t n = 0; n < out.size(); ++n) {
    EXPECT_EQ(out[n].query_index, static_cast<int64_t>(n) + 1);
    EXPECT_EQ(out[n].publish_time, 4 * static_cast<int64_t>(n + 1));
    EXPECT_EQ(out[n].input_timestamp, out[n].publish_time - 2);
  }
}

TEST(RunMultiQueryTest, SingleEntryAndEarlyHorizon) {
  std::vector<FiniteMarkovChain> chains{TwoStateChain(0.1, 0.1).value()};
  ASSERT_OK_AND_ASSIGN(const PolicySchedule s, PolicySchedule::Create({{5, 1, 1.0}}));
  Rng rng(7);
  ASSERT_OK_AND_ASSIGN(const std::vector<PublishedOutput> one,
                       RunMultiQuery(s, chains, QueryFunction::Mean(3), 10, rng));
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].input_timestamp, 4);
  ASSERT_OK_AND_ASSIGN(const std::vector<PublishedOutput> none,
                       RunMultiQuery(s, chains, QueryFunction::Mean(3), 4, rng));
  EXPECT_TRUE(none.empty());
}

TEST(RunMultiQueryTest, FixedSeedIsDeterministic) {
  std::vector<FiniteMarkovChain> chains{TwoStateChain(0.1, 0.1).value()};
  ASSERT_OK_AND_ASSIGN(const PolicySchedule s, PolicySchedule::Uniform({1, 3, 0.5}, 5));
  Rng a(9), b(9);
  const auto x = RunMultiQuery(s, chains, QueryFunction::Mean(4), 15, a).value();
  const auto y = RunMultiQuery(s, chains, QueryFunction::Mean(4), 15, b).value();
  ASSERT_EQ(x.size(), y.size());
  for (size_t n = 0; n < x.size(); ++n) EXPECT_EQ(x[n].value(0), y[n].value(0));
}

TEST(AoiCurveTest, ZeroAgeEverySlot) {
  ASSERT_OK_AND_ASSIGN(const PolicySchedule s, PolicySchedule::Uniform({0, 1, 1.0}, 10));
  const auto aoi = AoiCurve(s, 10);
  EXPECT_FALSE(aoi[0].has_value());
  for (int t = 1; t <= 10; ++t) EXPECT_EQ(aoi[t], 0);
}

TEST(AoiCurveTest, SawTooth) {
  ASSERT_OK_AND_ASSIGN(const PolicySchedule s, PolicySchedule::Uniform({2, 4, 1.0}, 3));
  const auto aoi = AoiCurve(s, 13);
  for (int t = 0; t < 4; ++t) EXPECT_FALSE(aoi[t].has_value());
  EXPECT_EQ(aoi[4], 2);
  EXPECT_EQ(aoi[7], 5);
  EXPECT_EQ(aoi[8], 2);
  EXPECT_EQ(aoi[12], 2);
  EXPECT_EQ(aoi[13], 3);
}

}  // namespace
}  // namespace agedp
