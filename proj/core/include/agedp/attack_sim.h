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

// Adversary success and utility loss for the two-state and AR(1) case
// studies, plus privacy-utility tradeoff sweeps.

#ifndef AGEDP_ATTACK_SIM_H_
#define AGEDP_ATTACK_SIM_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "agedp/chain_models.h"
#include "agedp/random.h"

namespace agedp {

inline constexpr int64_t kDefaultMonteCarloSamples = 100'000;
inline constexpr uint64_t kDefaultSeed = 42;
// Largest population for which the exact posterior is used by default.
inline constexpr int kMaxExactPosteriorUsers = 64;

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  int64_t samples = 0;
};

// 1 / (1 + e^-eps_C).
double BayesAttackAccuracy(double eps_c);

// Accuracy of the fresh Bayes guess evolved t steps through the two-state
// chain.
absl::StatusOr<double> AttackAccuracyAfter(double eps_c, double p, double q,
                                           int64_t t);

// Closed form (2 - 2 lambda^t)/I + 2/(eps_C^2 I^2) with lambda = 1 - p - q.
// Requires p == q; t may be fractional when lambda >= 0.
absl::StatusOr<double> MsePenaltyTwoState(double p, double q, double t,
                                          double eps_c, int num_users);

// E[(M(X_0) - mean(X_t))^2] by simulation from a stationary start, with
// Laplace(1 / (eps_C I)) noise on the mean.
absl::StatusOr<Estimate> MsePenaltyTwoStateMonteCarlo(double p, double q,
                                                      int64_t t, double eps_c,
                                                      int num_users,
                                                      int64_t samples, Rng& rng);

enum class NoiseVarianceConvention {
  kAsPrinted,  // 1 / (eps_C^2 I^2)
  kLaplace,    // 2 / (eps_C^2 I^2)
};

// (1 - rho^{2t}) sigma^2 / (I (1 - rho^2)) plus the noise term.
absl::StatusOr<double> MsePenaltyAr1(
    const AR1Model& model, double t, double eps_c, int num_users,
    NoiseVarianceConvention convention = NoiseVarianceConvention::kAsPrinted);

struct FailureRateOptions {
  int64_t samples = kDefaultMonteCarloSamples;
  // Required above kMaxExactPosteriorUsers users. The per-count
  // probabilities Pr[z_t = 1 | k] are then estimated by simulation.
  bool allow_monte_carlo_posterior = false;
  int64_t posterior_samples = 20'000;
};

// The adversary's MLE of z_t = 1{mean(X_t) >= 0} from the released noisy
// mean y = mean(X_0) + Laplace(1 / (eps_C I)), under an exchangeable
// stationary prior on X_0. The decision set {y : g(y) = 1} is a finite union
// of intervals computed exactly.
class MleDecisionRule {
 public:
  static absl::StatusOr<MleDecisionRule> Create(
      double p, double q, double t, double eps_c, int num_users,
      const FailureRateOptions& options = {}, Rng* rng = nullptr);

  bool Decide(double y) const;
  // Pr[g(y) = 1] for y = center + Laplace(scale()).
  double ProbDecideOne(double center) const;
  // Pr[z_t = 1 | k users start at +1].
  double ProbOneGivenCount(int k) const { return prob_one_[static_cast<size_t>(k)]; }

  const std::vector<std::pair<double, double>>& one_intervals() const {
    return one_intervals_;
  }
  double scale() const { return scale_; }
  int num_users() const { return num_users_; }

 private:
  MleDecisionRule() = default;

  int num_users_ = 0;
  double scale_ = 0.0;
  std::vector<double> prob_one_;
  std::vector<std::pair<double, double>> one_intervals_;
};

// Pr[z_t = 1 | k] for k = 0..I under the t-step two-state kernel.
absl::StatusOr<std::vector<double>> MajorityProbabilities(double p, double q,
                                                          double t,
                                                          int num_users);

// Pr[g_MLE(M(X_0)) != z_t | X_0] by Monte Carlo over the noise. The
// transition step is integrated exactly given X_0.
absl::StatusOr<Estimate> FailureRate(double p, double q, int64_t t, double eps_c,
                                     std::span<const double> x0, Rng& rng,
                                     const FailureRateOptions& options = {});

// Deterministic counterpart: integrates the Laplace density over the
// decision intervals. `plus_count` is the number of users at +1 in X_0.
absl::StatusOr<double> FailureRateExact(double p, double q, double t,
                                        double eps_c, int num_users,
                                        int plus_count);

// FailureRateExact averaged over a stationary X_0.
absl::StatusOr<double> ExpectedFailureRate(double p, double q, double t,
                                           double eps_c, int num_users);

struct TradeoffPoint {
  std::string scheme;  // "combined" or "noise-only"
  double knob_t_or_a = 0.0;
  double knob_s = 0.0;
  double eps_c = 0.0;
  double risk = 0.0;
  double loss = 0.0;
  double loss_stderr = 0.0;
};

enum class SweepScenario { kTwoStateMse, kFailureRate, kAr1Mse, kMultiQueryPeak };

absl::StatusOr<SweepScenario> ParseSweepScenario(std::string_view name);
std::string SweepScenarioName(SweepScenario scenario);

struct SweepConfig {
  SweepScenario scenario = SweepScenario::kTwoStateMse;
  double p = 0.1;
  double q = 0.1;
  int num_users = 20;
  double ar1_rho = 0.8;
  double ar1_sigma = 1.0;
  // |x0 - x0'| entering the AR(1) Pinsker bound.
  double ar1_neighbor_gap = 2.0;
  NoiseVarianceConvention ar1_convention = NoiseVarianceConvention::kAsPrinted;
  // Ages t (single query) or input ages A (multi-query).
  std::vector<int64_t> ages;
  // Publishing intervals S_bar; multi-query only.
  std::vector<int64_t> intervals;
  std::vector<double> eps_grid;
  // Failure-rate X_0 as a count of users at +1; nullopt averages over a
  // stationary X_0.
  std::optional<int> x0_plus_count;
  // Monte Carlo instead of closed forms where both exist.
  bool monte_carlo = false;
  int64_t samples = kDefaultMonteCarloSamples;
  uint64_t seed = kDefaultSeed;
  // Multi-query loss: failure rate instead of MSE.
  bool peak_uses_failure_rate = false;
};

struct SweepResult {
  std::vector<TradeoffPoint> combined;
  std::vector<TradeoffPoint> noise_only;
  std::vector<TradeoffPoint> frontier;
};

absl::StatusOr<SweepResult> TradeoffSweep(const SweepConfig& config);

// Lower envelope: points whose loss is strictly below that of every point
// with no larger risk, ordered by risk.
std::vector<TradeoffPoint> ParetoFrontier(std::vector<TradeoffPoint> points);

}  // namespace agedp

#endif  // AGEDP_ATTACK_SIM_H_
