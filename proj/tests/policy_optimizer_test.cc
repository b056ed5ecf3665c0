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

#include "agedp/policy_optimizer.h"

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

TEST(StationaryIntervalTest, Values) {
  ASSERT_OK_AND_ASSIGN(const double s, StationaryInterval(1.0, 0.8, 0.5));
  EXPECT_NEAR(s, 5.3469937783676649, 1e-9);
  EXPECT_NEAR(2 * std::pow(0.8, s) * std::exp(0.5), 1.0, 1e-12);
  EXPECT_THAT(StationaryInterval(1.0, 0.6, 0.0),
              IsOkAndHolds(DoubleNear(std::log(2.0) / std::log(1 / 0.6), 1e-14)));
  EXPECT_THAT(StationaryInterval(1.0, 1.2, 0.5), StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(ObjectiveTest, EdgeCases) {
  EXPECT_THAT(Objective(1.0, 0.8, 0.0, 2, 4), IsOkAndHolds(0.0));
  EXPECT_THAT(Objective(1.0, 0.8, 0.5, 1e4, 4), IsOkAndHolds(DoubleNear(0.0, 1e-300)));
  EXPECT_THAT(Objective(1.0, 0.8, 0.5, 2, 1),
              StatusIs(absl::StatusCode::kFailedPrecondition, HasSubstr("divergent")));
  // Agrees with the fixed point of the composed peaks for c = 1.
  EXPECT_THAT(Objective(1.0, 0.8, 0.5, 2, 4), IsOkAndHolds(DoubleNear(0.8236165661459023, 1e-12)));
}

TEST(PenaltyFunctionTest, MonotonicityValidation) {
  EXPECT_OK(PenaltyFunction::Create("ok", [](double t, double e) { return t / (1 + e); }).status());
  EXPECT_THAT(PenaltyFunction::Create("bad", [](double t, double) { return -t; }),
              StatusIs(absl::StatusCode::kInvalidArgument, HasSubstr("decreases in t")));
  EXPECT_THAT(PenaltyFunction::Create("bad", [](double, double e) { return e; }),
              StatusIs(absl::StatusCode::kInvalidArgument, HasSubstr("increases in eps")));
  EXPECT_OK(PenaltyFunction::Create("skip", [](double, double e) { return e; }, std::nullopt)
                .status());
}

TEST(PenaltyFunctionTest, TableInterpolates) {
  ASSERT_OK_AND_ASSIGN(const PenaltyFunction f,
                       PenaltyFunction::Table({0, 10}, {1, 2}, {{0.0, 0.0}, {1.0, 0.5}}));
  EXPECT_NEAR(f(5, 1), 0.5, 1e-15);
  EXPECT_NEAR(f(5, 1.5), 0.375, 1e-15);
  EXPECT_NEAR(f(50, 3), 0.5, 1e-15);
  EXPECT_THAT(PenaltyFunction::Table({0, 10}, {1, 2}, {{0.0, 0.0}}),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(PenaltyFunction::Table({10, 0}, {1, 2}, {{0.0, 0.0}, {1.0, 0.5}}),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

OptimizationProblem MseProblem(double f_bar) {
  OptimizationProblem p;
  p.c = 1.0;
  p.rho = 0.8;
  p.f_bar = f_bar;
  p.penalty = PenaltyFunction::MseTwoState(0.1, 0.1, 20).value();
  p.K = 200;
  return p;
}

TEST(SolveTest, InteriorSatisfiesStationarity) {
  const OptimizationProblem p = MseProblem(0.09);
  ASSERT_OK_AND_ASSIGN(const OptimizerSolution s, SolveInterior(p));
  EXPECT_EQ(s.branch, Branch::kInterior);
  EXPECT_LE(s.stationarity_residual, 1e-6);
  EXPECT_LE(s.penalty, p.f_bar + 1e-12);
  EXPECT_GE(s.age, 0.0);
  EXPECT_THAT(Objective(p.c, p.rho, s.eps_c, s.age, s.interval),
              IsOkAndHolds(DoubleNear(s.objective, 1e-12)));
}

TEST(SolveTest, BoundaryRespectsConstraints) {
  const OptimizationProblem p = MseProblem(0.09);
  ASSERT_OK_AND_ASSIGN(const OptimizerSolution s, SolveBoundary(p));
  EXPECT_EQ(s.branch, Branch::kBoundary);
  EXPECT_EQ(s.age, 0.0);
  EXPECT_LE(s.penalty, p.f_bar + 1e-12);
  EXPECT_LT(std::pow(0.8, s.interval) * std::exp(s.eps_c), 1.0);
}

TEST(SolveTest, PicksSmallerBranchAndRounds) {
  const OptimizationProblem p = MseProblem(0.09);
  ASSERT_OK_AND_ASSIGN(const OptimizerSolution s, Solve(p));
  const double interior = SolveInterior(p).value().objective;
  const double boundary = SolveBoundary(p).value().objective;
  EXPECT_NEAR(s.objective, std::min(interior, boundary), 1e-15);
  EXPECT_EQ(s.rounded.age, std::llround(s.age));
  EXPECT_EQ(s.rounded.interval, std::max<int64_t>(1, std::llround(s.interval)));
  EXPECT_GT(s.penalty_evaluations, 0);
}

TEST(SolveTest, InfeasibleBudget) {
  const absl::StatusOr<OptimizerSolution> s = Solve(MseProblem(1e-7));
  ASSERT_FALSE(s.ok());
  EXPECT_TRUE(IsInfeasible(s.status()));
  EXPECT_THAT(s.status().message(), HasSubstr("f_bar"));
}

TEST(SolveTest, RejectsBadProblem) {
  OptimizationProblem p = MseProblem(0.09);
  p.K = 0;
  EXPECT_THAT(Solve(p), StatusIs(absl::StatusCode::kInvalidArgument));
  p = MseProblem(0.09);
  p.phi = 0;
  EXPECT_THAT(Solve(p), StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(VerifySimplifiedOptimalityTest, OneAndTwoEpochs) {
  const PenaltyFunction f = PenaltyFunction::MseTwoState(0.1, 0.1, 20).value();
  const ScheduleGrid grid{{0, 1, 2}, {2, 4, 6}, {0.25, 0.5, 1.0}};
  for (int epochs : {1, 2}) {
    ASSERT_OK_AND_ASSIGN(const OptimalityReport r,
                         VerifySimplifiedOptimality(1.0, 0.8, f, 0.08, epochs, grid));
    EXPECT_TRUE(r.uniform_attains_minimum) << epochs;
    EXPECT_GT(r.feasible_schedules, 0);
    EXPECT_LE(r.best_uniform_peak, r.best_overall_peak + 1e-9);
  }
}

TEST(VerifySimplifiedOptimalityTest, RejectsBadGrids) {
  const PenaltyFunction f = PenaltyFunction::MseTwoState(0.1, 0.1, 20).value();
  EXPECT_THAT(VerifySimplifiedOptimality(1.0, 0.8, f, 0.08, 2, {{}, {2}, {0.5}}),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(VerifySimplifiedOptimality(1.0, 0.8, f, 0.08, 5, {{0}, {2}, {0.5}}),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

std::vector<double> Linspace(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
  return v;
}

TEST(NoTradeoffCheckTest, MseRegimeHasNoTradeoff) {
  const PenaltyFunction f = PenaltyFunction::MseTwoState(0.1, 0.1, 20).value();
  ASSERT_OK_AND_ASSIGN(const NoTradeoffReport r,
                       NoTradeoffCheck(f, 0.8, Linspace(0.01, 0.25, 40), Linspace(0, 20, 11)));
  EXPECT_TRUE(r.no_tradeoff) << r.max_slope << " at eps " << r.worst_eps;
}

TEST(NoTradeoffCheckTest, FailureRateHasTradeoff) {
  const PenaltyFunction f = PenaltyFunction::FailureRate(0.1, 0.1, 20, std::nullopt).value();
  ASSERT_OK_AND_ASSIGN(const NoTradeoffReport r,
                       NoTradeoffCheck(f, 0.8, Linspace(0.05, 3, 30), Linspace(0, 10, 6)));
  EXPECT_FALSE(r.no_tradeoff);
}

TEST(NoTradeoffCheckTest, BudgetFreePenaltyHasTradeoff) {
  ASSERT_OK_AND_ASSIGN(const PenaltyFunction f,
                       PenaltyFunction::Create("age", [](double t, double) { return t; }));
  ASSERT_OK_AND_ASSIGN(const NoTradeoffReport r,
                       NoTradeoffCheck(f, 0.8, Linspace(0.1, 2, 20), {0.0, 5.0}));
  EXPECT_FALSE(r.no_tradeoff);
  EXPECT_GT(r.max_slope, 0.0);
}

}  // namespace
}  // namespace agedp
