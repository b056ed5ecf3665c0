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

#include "agedp/attack_sim.h"

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

TEST(AttackAccuracyTest, FreshRelease) {
  EXPECT_NEAR(BayesAttackAccuracy(2.0), 0.8807970779778823, 1e-12);
  EXPECT_EQ(BayesAttackAccuracy(0.0), 0.5);
  EXPECT_NEAR(BayesAttackAccuracy(0.3), 0.574442516811659, 1e-12);
}

TEST(AttackAccuracyTest, AgedRelease) {
  EXPECT_THAT(AttackAccuracyAfter(2.0, 0.1, 0.1, 0),
              IsOkAndHolds(DoubleNear(BayesAttackAccuracy(2.0), 1e-15)));
  EXPECT_THAT(AttackAccuracyAfter(2.0, 0.1, 0.1, 3), IsOkAndHolds(DoubleNear(0.694968, 1e-6)));
  EXPECT_THAT(AttackAccuracyAfter(2.0, 0.1, 0.1, 6), IsOkAndHolds(DoubleNear(0.599824, 1e-6)));
  EXPECT_THAT(AttackAccuracyAfter(2.0, 0.1, 0.1, 10), IsOkAndHolds(DoubleNear(0.540888, 1e-6)));
  EXPECT_THAT(AttackAccuracyAfter(2.0, 0.1, 0.1, 400), IsOkAndHolds(DoubleNear(0.5, 1e-12)));
}

TEST(AttackAccuracyTest, MatchesMatrixPower) {
  // Posterior [P(A), 1 - P(A)] pushed through t steps; report mass on A.
  const double eps = 1.3, p = 0.2, q = 0.15;
  const FiniteMarkovChain c = TwoStateChain(p, q).value();
  for (int t : {1, 4, 9}) {
    const Eigen::MatrixXd pt = TStep(c, t);
    const double w = std::exp(eps) / (1 + std::exp(eps));
    Eigen::RowVector2d belief(w, 1 - w);
    const Eigen::RowVector2d fwd = belief * pt;
    EXPECT_THAT(AttackAccuracyAfter(eps, p, q, t),
                IsOkAndHolds(DoubleNear(fwd(0), 1e-12)));
  }
}

TEST(MsePenaltyTwoStateTest, EndpointsAndMonotonicity) {
  const int n = 20;
  const double eps = 0.5;
  EXPECT_THAT(MsePenaltyTwoState(0.1, 0.1, 0, eps, n),
              IsOkAndHolds(DoubleNear(2 / (eps * eps * n * n), 1e-15)));
  EXPECT_THAT(MsePenaltyTwoState(0.1, 0.1, 1e4, eps, n),
              IsOkAndHolds(DoubleNear(2.0 / n + 2 / (eps * eps * n * n), 1e-12)));
  double prev = 0.0;
  for (int t = 0; t <= 40; ++t) {
    const double v = MsePenaltyTwoState(0.1, 0.1, t, eps, n).value();
    EXPECT_GE(v, prev);
    prev = v;
  }
  EXPECT_GT(MsePenaltyTwoState(0.1, 0.1, 5, 0.5, n).value(),
            MsePenaltyTwoState(0.1, 0.1, 5, 1.0, n).value());
  EXPECT_THAT(MsePenaltyTwoState(0.1, 0.2, 5, 0.5, n),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(MsePenaltyTwoStateTest, MonteCarloAgrees) {
  Rng rng(3);
  for (int t : {0, 3, 12}) {
    const double exact = MsePenaltyTwoState(0.1, 0.1, t, 1.0, 20).value();
    ASSERT_OK_AND_ASSIGN(const Estimate e,
                         MsePenaltyTwoStateMonteCarlo(0.1, 0.1, t, 1.0, 20, 100000, rng));
    EXPECT_NEAR(e.mean, exact, 4 * e.std_error);
  }
}

TEST(MsePenaltyAr1Test, PrintedConvention) {
  ASSERT_OK_AND_ASSIGN(const AR1Model m, AR1Model::Create(0.8, 1.0));
  const int n = 10;
  const double eps = 0.5;
  EXPECT_THAT(MsePenaltyAr1(m, 0, eps, n), IsOkAndHolds(DoubleNear(1 / (eps * eps * n * n), 1e-15)));
  EXPECT_THAT(MsePenaltyAr1(m, 0, eps, n, NoiseVarianceConvention::kLaplace),
              IsOkAndHolds(DoubleNear(2 / (eps * eps * n * n), 1e-15)));
  const double ceiling = 1.0 / (n * (1 - 0.64)) + 1 / (eps * eps * n * n);
  EXPECT_THAT(MsePenaltyAr1(m, 500, eps, n), IsOkAndHolds(DoubleNear(ceiling, 1e-12)));
}

TEST(MajorityProbabilitiesTest, ZeroAgeIsIndicator) {
  ASSERT_OK_AND_ASSIGN(const std::vector<double> h, MajorityProbabilities(0.1, 0.1, 0, 4));
  EXPECT_EQ(h, (std::vector<double>{0, 0, 1, 1, 1}));
}

// Brute force over every X_0 in {-1,+1}^3: the MLE picks the sign with the
// larger joint likelihood, then the failure rate integrates the Laplace
// density by quadrature.
double EnumerationOracle(double p, double q, int t, double eps, int plus_count) {
  const int n = 3;
  const FiniteMarkovChain c = TwoStateChain(p, q).value();
  const Eigen::MatrixXd pt = TStep(c, t);
  const Eigen::VectorXd pi = StationaryDistribution(c).value();
  const double b = 1.0 / (eps * n);
  auto majority_prob = [&](int mask) {
    // Pr[at least 2 of 3 users at +1 after t steps].
    double total = 0.0;
    for (int next = 0; next < 8; ++next) {
      double pr = 1.0;
      int plus = 0;
      for (int i = 0; i < n; ++i) {
        const int from = (mask >> i) & 1, to = (next >> i) & 1;
        pr *= pt(from, to);
        plus += to;
      }
      if (2 * plus >= n) total += pr;
    }
    return total;
  };
  auto mean_of = [&](int mask) {
    double s = 0;
    for (int i = 0; i < n; ++i) s += ((mask >> i) & 1) ? 1 : -1;
    return s / n;
  };
  auto laplace = [&](double x) { return std::exp(-std::abs(x) / b) / (2 * b); };
  auto decide_one = [&](double y) {
    double one = 0.0, zero = 0.0;
    for (int mask = 0; mask < 8; ++mask) {
      double prior = 1.0;
      for (int i = 0; i < n; ++i) prior *= pi((mask >> i) & 1);
      const double h = majority_prob(mask);
      const double like = prior * laplace(y - mean_of(mask));
      one += like * h;
      zero += like * (1 - h);
    }
    return one >= zero;
  };
  const int mask = (1 << plus_count) - 1;
  const double center = mean_of(mask), h = majority_prob(mask);
  const double lo = center - 40 * b, hi = center + 40 * b;
  const int steps = 400000;
  const double dy = (hi - lo) / steps;
  double fail = 0.0;
  for (int k = 0; k < steps; ++k) {
    const double y = lo + (k + 0.5) * dy;
    fail += laplace(y - center) * (decide_one(y) ? 1 - h : h) * dy;
  }
  return fail;
}

TEST(FailureRateTest, ExactMatchesEnumerationOracle) {
  const double oracle = EnumerationOracle(0.1, 0.1, 1, 2.0, 2);
  EXPECT_THAT(FailureRateExact(0.1, 0.1, 1, 2.0, 3, 2), IsOkAndHolds(DoubleNear(oracle, 1e-5)));
  const double oracle_fresh = EnumerationOracle(0.2, 0.1, 0, 1.0, 1);
  EXPECT_THAT(FailureRateExact(0.2, 0.1, 0, 1.0, 3, 1),
              IsOkAndHolds(DoubleNear(oracle_fresh, 1e-5)));
}

TEST(FailureRateTest, MonteCarloMatchesExact) {
  Rng rng(21);
  const std::vector<double> x0{1, 1, -1};
  ASSERT_OK_AND_ASSIGN(const Estimate e, FailureRate(0.1, 0.1, 1, 2.0, x0, rng));
  const double exact = FailureRateExact(0.1, 0.1, 1, 2.0, 3, 2).value();
  EXPECT_NEAR(e.mean, exact, 3 * e.std_error + 1e-9);
}

TEST(FailureRateTest, LimitsAndNoiselessCase) {
  EXPECT_THAT(FailureRateExact(0.1, 0.1, 1e4, 1.0, 21, 15), IsOkAndHolds(DoubleNear(0.5, 1e-9)));
  EXPECT_THAT(FailureRateExact(0.1, 0.1, 0, 1e6, 20, 15), IsOkAndHolds(DoubleNear(0.0, 1e-12)));
  EXPECT_THAT(FailureRateExact(0.1, 0.1, 0, 1e6, 20, 4), IsOkAndHolds(DoubleNear(0.0, 1e-12)));
}

TEST(FailureRateTest, LargePopulationNeedsOptIn) {
  Rng rng(1);
  std::vector<double> x0(80, 1.0);
  EXPECT_THAT(FailureRate(0.1, 0.1, 2, 1.0, x0, rng),
              StatusIs(absl::StatusCode::kInvalidArgument));
  FailureRateOptions opts;
  opts.allow_monte_carlo_posterior = true;
  opts.samples = 2000;
  opts.posterior_samples = 2000;
  EXPECT_OK(FailureRate(0.1, 0.1, 2, 1.0, x0, rng, opts).status());
}

TEST(ParetoFrontierTest, KeepsLowerEnvelope) {
  std::vector<TradeoffPoint> pts{{"a", 0, 0, 0, 1.0, 5.0, 0},
                                 {"a", 0, 0, 0, 0.5, 6.0, 0},
                                 {"a", 0, 0, 0, 2.0, 4.0, 0},
                                 {"a", 0, 0, 0, 1.5, 4.5, 0},
                                 {"a", 0, 0, 0, 3.0, 4.5, 0}};
  const std::vector<TradeoffPoint> f = ParetoFrontier(pts);
  ASSERT_EQ(f.size(), 4u);
  EXPECT_EQ(f[0].risk, 0.5);
  EXPECT_EQ(f[3].risk, 2.0);
}

TEST(TradeoffSweepTest, NoiseOnlyUnboundedCombinedBounded) {
  SweepConfig cfg;
  cfg.scenario = SweepScenario::kTwoStateMse;
  for (int t = 0; t <= 60; ++t) cfg.ages.push_back(t);
  cfg.eps_grid = {0.005, 0.01, 0.1, 0.5, 1.0, 2.0};
  ASSERT_OK_AND_ASSIGN(const SweepResult r, TradeoffSweep(cfg));
  EXPECT_EQ(r.noise_only.size(), cfg.eps_grid.size());
  EXPECT_GT(r.noise_only.front().loss, 100 * r.noise_only.back().loss);
  for (const TradeoffPoint& p : r.combined) {
    EXPECT_LE(p.loss, 2.0 / 20 + 2 / (p.eps_c * p.eps_c * 400) + 1e-9);
  }
  for (size_t i = 1; i < r.frontier.size(); ++i) {
    EXPECT_GT(r.frontier[i].risk, r.frontier[i - 1].risk);
    EXPECT_LT(r.frontier[i].loss, r.frontier[i - 1].loss);
  }
}

TEST(TradeoffSweepTest, ScenarioNames) {
  for (const char* name : {"two-state-mse", "failure-rate", "ar1-mse", "multi-query-peak"}) {
    ASSERT_OK_AND_ASSIGN(const SweepScenario s, ParseSweepScenario(name));
    EXPECT_EQ(SweepScenarioName(s), name);
  }
  EXPECT_THAT(ParseSweepScenario("bogus"), StatusIs(absl::StatusCode::kInvalidArgument));
}

}  // namespace
}  // namespace agedp
