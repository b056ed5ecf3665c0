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
#include <limits>

#include "absl/strings/str_format.h"
#include "agedp/guarantee_calculus.h"
#include "agedp/status_macros.h"

namespace agedp {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// A real number stored as sign and log-magnitude.
struct SignedLog {
  int sign = 0;
  double log_abs = kNegInf;
};

double LogSumExp(const std::vector<double>& terms) {
  double hi = kNegInf;
  for (double v : terms) hi = std::max(hi, v);
  if (hi == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double v : terms) acc += std::exp(v - hi);
  return hi + std::log(acc);
}

SignedLog SignedSum(const std::vector<double>& log_pos,
                    const std::vector<double>& log_neg) {
  const double lp = LogSumExp(log_pos);
  const double ln = LogSumExp(log_neg);
  if (lp == ln) return {};
  if (lp > ln) return {1, lp + std::log1p(-std::exp(ln - lp))};
  return {-1, ln + std::log1p(-std::exp(lp - ln))};
}

double LogBinomialPmf(int n, int k, double p) {
  if (p <= 0.0) return k == 0 ? 0.0 : kNegInf;
  if (p >= 1.0) return k == n ? 0.0 : kNegInf;
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
         k * std::log(p) + (n - k) * std::log1p(-p);
}

std::vector<double> BinomialPmf(int n, double p) {
  std::vector<double> pmf(static_cast<size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) pmf[k] = std::exp(LogBinomialPmf(n, k, p));
  return pmf;
}

double LaplaceCdf(double x, double scale) {
  if (x == std::numeric_limits<double>::infinity()) return 1.0;
  if (x == -std::numeric_limits<double>::infinity()) return 0.0;
  return x < 0 ? 0.5 * std::exp(x / scale) : 1.0 - 0.5 * std::exp(-x / scale);
}

absl::Status CheckTwoState(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("p and q must lie in [0, 1], got p=%g q=%g", p, q));
  }
  if (!(p + q > 0.0) || !(std::abs(1.0 - p - q) < 1.0)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "two-state chain needs |1 - p - q| < 1, got p=%g q=%g", p, q));
  }
  return absl::OkStatus();
}

// lambda^t for real t; fractional ages need lambda >= 0.
absl::StatusOr<double> EigenPower(double lambda, double t) {
  if (t < 0.0) return absl::InvalidArgumentError("age must be nonnegative");
  if (t == 0.0) return 1.0;
  if (lambda < 0.0 && std::floor(t) != t) {
    return absl::InvalidArgumentError(
        "fractional ages need 1 - p - q >= 0 for a real t-step kernel");
  }
  return std::pow(lambda, t);
}

absl::Status CheckUsersAndBudget(int num_users, double eps_c) {
  if (num_users < 1) return absl::InvalidArgumentError("need at least one user");
  if (!(eps_c > 0.0) || !std::isfinite(eps_c)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("eps_C must be positive and finite, got %g", eps_c));
  }
  return absl::OkStatus();
}

int PlusCount(std::span<const double> x0) {
  int k = 0;
  for (double v : x0) k += v > 0.0 ? 1 : 0;
  return k;
}

double Mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double StdError(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = Mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) /
                   static_cast<double>(v.size()));
}

}  // namespace

double BayesAttackAccuracy(double eps_c) { return 1.0 / (1.0 + std::exp(-eps_c)); }

absl::StatusOr<double> AttackAccuracyAfter(double eps_c, double p, double q,
                                           int64_t t) {
  AGEDP_RETURN_IF_ERROR(CheckTwoState(p, q));
  if (t < 0) return absl::InvalidArgumentError("age must be nonnegative");
  AGEDP_ASSIGN_OR_RETURN(const FiniteMarkovChain chain, TwoStateChain(p, q));
  const double acc = BayesAttackAccuracy(eps_c);
  Eigen::RowVector2d belief(acc, 1.0 - acc);
  const Eigen::MatrixXd pt = TStep(chain, t);
  return (belief * pt)(0);
}

absl::StatusOr<double> MsePenaltyTwoState(double p, double q, double t,
                                          double eps_c, int num_users) {
  AGEDP_RETURN_IF_ERROR(CheckTwoState(p, q));
  AGEDP_RETURN_IF_ERROR(CheckUsersAndBudget(num_users, eps_c));
  if (p != q) {
    return absl::InvalidArgumentError(
        "the closed-form MSE needs p == q; use the Monte Carlo estimator");
  }
  AGEDP_ASSIGN_OR_RETURN(const double decay, EigenPower(1.0 - p - q, t));
  const double i = num_users;
  return (2.0 - 2.0 * decay) / i + 2.0 / (eps_c * eps_c * i * i);
}

absl::StatusOr<Estimate> MsePenaltyTwoStateMonteCarlo(double p, double q,
                                                      int64_t t, double eps_c,
                                                      int num_users,
                                                      int64_t samples, Rng& rng) {
  AGEDP_RETURN_IF_ERROR(CheckTwoState(p, q));
  AGEDP_RETURN_IF_ERROR(CheckUsersAndBudget(num_users, eps_c));
  if (samples < 2) return absl::InvalidArgumentError("need at least two samples");
  if (t < 0) return absl::InvalidArgumentError("age must be nonnegative");
  AGEDP_ASSIGN_OR_RETURN(const FiniteMarkovChain chain, TwoStateChain(p, q));
  const Eigen::MatrixXd pt = TStep(chain, t);
  const double pi_plus = p / (p + q);
  const double scale = 1.0 / (eps_c * num_users);
  std::vector<double> errors(static_cast<size_t>(samples));
  for (int64_t s = 0; s < samples; ++s) {
    double sum0 = 0.0, sum_t = 0.0;
    for (int i = 0; i < num_users; ++i) {
      const int x0 = rng.Uniform() < pi_plus ? 1 : 0;
      const int xt = rng.Uniform() < pt(x0, 1) ? 1 : 0;
      sum0 += x0 ? 1.0 : -1.0;
      sum_t += xt ? 1.0 : -1.0;
    }
    const double release = sum0 / num_users + rng.Laplace(scale);
    const double err = release - sum_t / num_users;
    errors[static_cast<size_t>(s)] = err * err;
  }
  return Estimate{Mean(errors), StdError(errors), samples};
}

absl::StatusOr<double> MsePenaltyAr1(const AR1Model& model, double t,
                                     double eps_c, int num_users,
                                     NoiseVarianceConvention convention) {
  AGEDP_RETURN_IF_ERROR(CheckUsersAndBudget(num_users, eps_c));
  if (t < 0.0) return absl::InvalidArgumentError("age must be nonnegative");
  const double rho2 = model.rho() * model.rho();
  const double i = num_users;
  const double aging = (1.0 - std::pow(rho2, t)) * model.sigma() * model.sigma() /
                       (i * (1.0 - rho2));
  const double numerator = convention == NoiseVarianceConvention::kLaplace ? 2.0 : 1.0;
  return aging + numerator / (eps_c * eps_c * i * i);
}

absl::StatusOr<std::vector<double>> MajorityProbabilities(double p, double q,
                                                          double t,
                                                          int num_users) {
  AGEDP_RETURN_IF_ERROR(CheckTwoState(p, q));
  if (num_users < 1) return absl::InvalidArgumentError("need at least one user");
  AGEDP_ASSIGN_OR_RETURN(const double decay, EigenPower(1.0 - p - q, t));
  const double stay_plus = std::clamp((p + q * decay) / (p + q), 0.0, 1.0);
  const double to_plus = std::clamp(p * (1.0 - decay) / (p + q), 0.0, 1.0);
  // z_t = 1 iff at least ceil(I/2) users sit at +1.
  const int threshold = (num_users + 1) / 2;
  std::vector<double> out(static_cast<size_t>(num_users) + 1);
  for (int k = 0; k <= num_users; ++k) {
    const std::vector<double> a = BinomialPmf(k, stay_plus);
    const std::vector<double> b = BinomialPmf(num_users - k, to_plus);
    double tail = 0.0;
    for (int i = 0; i <= k; ++i) {
      for (int j = std::max(0, threshold - i); j <= num_users - k; ++j) {
        tail += a[i] * b[j];
      }
    }
    out[k] = std::clamp(tail, 0.0, 1.0);
  }
  return out;
}

absl::StatusOr<MleDecisionRule> MleDecisionRule::Create(
    double p, double q, double t, double eps_c, int num_users,
    const FailureRateOptions& options, Rng* rng) {
  AGEDP_RETURN_IF_ERROR(CheckTwoState(p, q));
  AGEDP_RETURN_IF_ERROR(CheckUsersAndBudget(num_users, eps_c));
  const int n = num_users;
  MleDecisionRule rule;
  rule.num_users_ = n;
  rule.scale_ = 1.0 / (eps_c * n);
  if (n <= kMaxExactPosteriorUsers) {
    AGEDP_ASSIGN_OR_RETURN(rule.prob_one_, MajorityProbabilities(p, q, t, n));
  } else {
    if (!options.allow_monte_carlo_posterior) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "%d users exceeds the exact-posterior limit of %d; enable the Monte "
          "Carlo posterior fallback",
          n, kMaxExactPosteriorUsers));
    }
    if (rng == nullptr) {
      return absl::InvalidArgumentError("the Monte Carlo posterior needs a generator");
    }
    AGEDP_ASSIGN_OR_RETURN(const double decay, EigenPower(1.0 - p - q, t));
    const double stay_plus = (p + q * decay) / (p + q);
    const double to_plus = p * (1.0 - decay) / (p + q);
    rule.prob_one_.resize(static_cast<size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
      int64_t hits = 0;
      for (int64_t s = 0; s < options.posterior_samples; ++s) {
        const int plus = rng->Binomial(k, stay_plus) + rng->Binomial(n - k, to_plus);
        hits += 2 * plus >= n ? 1 : 0;
      }
      rule.prob_one_[k] = static_cast<double>(hits) / options.posterior_samples;
    }
  }

  // D(y) = sum_k w_k (2 h_k - 1) exp(-|y - mu_k| / b) is the posterior
  // preference for z_t = 1 up to a positive factor. Between consecutive
  // kinks mu_k it equals C_L e^{-y/b} + C_R e^{y/b}, so it changes sign at
  // most once there and the crossing is available in closed form.
  const double b = rule.scale_;
  const double pi_plus = p / (p + q);
  std::vector<double> mu(n + 1), log_w(n + 1), s(n + 1);
  for (int k = 0; k <= n; ++k) {
    mu[k] = (2.0 * k - n) / n;
    log_w[k] = LogBinomialPmf(n, k, pi_plus);
    s[k] = 2.0 * rule.prob_one_[k] - 1.0;
  }
  auto coefficient = [&](int lo, int hi, double sign) {
    std::vector<double> pos, neg;
    for (int k = lo; k < hi; ++k) {
      if (s[k] == 0.0 || log_w[k] == kNegInf) continue;
      const double term = log_w[k] + std::log(std::abs(s[k])) + sign * mu[k] / b;
      (s[k] > 0 ? pos : neg).push_back(term);
    }
    return SignedSum(pos, neg);
  };
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, double>> ones;
  auto add = [&ones](double lo, double hi) {
    if (!(hi > lo)) return;
    if (!ones.empty() && ones.back().second >= lo) {
      ones.back().second = std::max(ones.back().second, hi);
    } else {
      ones.emplace_back(lo, hi);
    }
  };
  for (int j = 0; j <= n + 1; ++j) {
    const double lo = j == 0 ? -kInf : mu[j - 1];
    const double hi = j == n + 1 ? kInf : mu[j];
    const SignedLog left = coefficient(0, j, 1.0);       // multiplies e^{-y/b}
    const SignedLog right = coefficient(j, n + 1, -1.0);  // multiplies e^{y/b}
    if (left.sign * right.sign < 0) {
      const double root = 0.5 * b * (left.log_abs - right.log_abs);
      // Below the root the e^{-y/b} term dominates.
      const double cut = std::clamp(root, lo, hi);
      if (left.sign > 0) add(lo, cut);
      if (right.sign > 0) add(cut, hi);
    } else {
      const int sign = left.sign != 0 ? left.sign : right.sign;
      if (sign >= 0) add(lo, hi);
    }
  }
  rule.one_intervals_ = std::move(ones);
  return rule;
}

bool MleDecisionRule::Decide(double y) const {
  for (const auto& [lo, hi] : one_intervals_) {
    if (y >= lo && y <= hi) return true;
  }
  return false;
}

double MleDecisionRule::ProbDecideOne(double center) const {
  double mass = 0.0;
  for (const auto& [lo, hi] : one_intervals_) {
    mass += LaplaceCdf(hi - center, scale_) - LaplaceCdf(lo - center, scale_);
  }
  return std::clamp(mass, 0.0, 1.0);
}

absl::StatusOr<Estimate> FailureRate(double p, double q, int64_t t, double eps_c,
                                     std::span<const double> x0, Rng& rng,
                                     const FailureRateOptions& options) {
  if (t < 0) return absl::InvalidArgumentError("age must be nonnegative");
  if (options.samples < 2) return absl::InvalidArgumentError("need at least two samples");
  const int n = static_cast<int>(x0.size());
  Rng posterior_rng = rng.Split(0x9057);
  AGEDP_ASSIGN_OR_RETURN(
      const MleDecisionRule rule,
      MleDecisionRule::Create(p, q, static_cast<double>(t), eps_c, n, options,
                              &posterior_rng));
  const int k0 = PlusCount(x0);
  const double center = (2.0 * k0 - n) / n;
  const double h = rule.ProbOneGivenCount(k0);
  std::vector<double> losses(static_cast<size_t>(options.samples));
  for (int64_t s = 0; s < options.samples; ++s) {
    const bool guess_one = rule.Decide(center + rng.Laplace(rule.scale()));
    losses[static_cast<size_t>(s)] = guess_one ? 1.0 - h : h;
  }
  return Estimate{Mean(losses), StdError(losses), options.samples};
}

absl::StatusOr<double> FailureRateExact(double p, double q, double t,
                                        double eps_c, int num_users,
                                        int plus_count) {
  if (plus_count < 0 || plus_count > num_users) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "plus count %d outside [0, %d]", plus_count, num_users));
  }
  AGEDP_ASSIGN_OR_RETURN(const MleDecisionRule rule,
                         MleDecisionRule::Create(p, q, t, eps_c, num_users));
  const double center = (2.0 * plus_count - num_users) / num_users;
  const double one = rule.ProbDecideOne(center);
  const double h = rule.ProbOneGivenCount(plus_count);
  return one * (1.0 - h) + (1.0 - one) * h;
}

absl::StatusOr<double> ExpectedFailureRate(double p, double q, double t,
                                           double eps_c, int num_users) {
  AGEDP_ASSIGN_OR_RETURN(const MleDecisionRule rule,
                         MleDecisionRule::Create(p, q, t, eps_c, num_users));
  const std::vector<double> prior = BinomialPmf(num_users, p / (p + q));
  double total = 0.0;
  for (int k = 0; k <= num_users; ++k) {
    const double one = rule.ProbDecideOne((2.0 * k - num_users) / num_users);
    const double h = rule.ProbOneGivenCount(k);
    total += prior[k] * (one * (1.0 - h) + (1.0 - one) * h);
  }
  return std::clamp(total, 0.0, 1.0);
}

absl::StatusOr<SweepScenario> ParseSweepScenario(std::string_view name) {
  if (name == "two-state-mse") return SweepScenario::kTwoStateMse;
  if (name == "failure-rate") return SweepScenario::kFailureRate;
  if (name == "ar1-mse") return SweepScenario::kAr1Mse;
  if (name == "multi-query-peak") return SweepScenario::kMultiQueryPeak;
  return absl::InvalidArgumentError(absl::StrFormat(
      "unknown scenario '%s' (expected two-state-mse, failure-rate, ar1-mse or "
      "multi-query-peak)",
      std::string(name)));
}

std::string SweepScenarioName(SweepScenario scenario) {
  switch (scenario) {
    case SweepScenario::kTwoStateMse:
      return "two-state-mse";
    case SweepScenario::kFailureRate:
      return "failure-rate";
    case SweepScenario::kAr1Mse:
      return "ar1-mse";
    case SweepScenario::kMultiQueryPeak:
      return "multi-query-peak";
  }
  return "unknown";
}

namespace {

// Loss of one single-query release at age t with budget eps.
absl::StatusOr<Estimate> SingleQueryLoss(const SweepConfig& c, int64_t t,
                                         double eps) {
  switch (c.scenario) {
    case SweepScenario::kTwoStateMse: {
      if (!c.monte_carlo && c.p == c.q) {
        AGEDP_ASSIGN_OR_RETURN(const double v,
                               MsePenaltyTwoState(c.p, c.q, t, eps, c.num_users));
        return Estimate{v, 0.0, 0};
      }
      // Common random numbers across grid points.
      Rng rng(c.seed);
      return MsePenaltyTwoStateMonteCarlo(c.p, c.q, t, eps, c.num_users, c.samples,
                                          rng);
    }
    case SweepScenario::kFailureRate: {
      if (!c.monte_carlo) {
        double v;
        if (c.x0_plus_count.has_value()) {
          AGEDP_ASSIGN_OR_RETURN(v, FailureRateExact(c.p, c.q, t, eps, c.num_users,
                                                     *c.x0_plus_count));
        } else {
          AGEDP_ASSIGN_OR_RETURN(v, ExpectedFailureRate(c.p, c.q, t, eps, c.num_users));
        }
        return Estimate{v, 0.0, 0};
      }
      Rng rng(c.seed);
      if (c.x0_plus_count.has_value()) {
        std::vector<double> x0(static_cast<size_t>(c.num_users), -1.0);
        for (int i = 0; i < *c.x0_plus_count && i < c.num_users; ++i) x0[i] = 1.0;
        FailureRateOptions opts;
        opts.samples = c.samples;
        opts.allow_monte_carlo_posterior = true;
        return FailureRate(c.p, c.q, t, eps, x0, rng, opts);
      }
      // Stationary X_0: draw the start count per sample, integrate z_t.
      Rng posterior_rng = rng.Split(0x9057);
      FailureRateOptions opts;
      opts.allow_monte_carlo_posterior = true;
      AGEDP_ASSIGN_OR_RETURN(
          const MleDecisionRule rule,
          MleDecisionRule::Create(c.p, c.q, static_cast<double>(t), eps,
                                  c.num_users, opts, &posterior_rng));
      const double pi_plus = c.p / (c.p + c.q);
      std::vector<double> losses(static_cast<size_t>(c.samples));
      for (int64_t s = 0; s < c.samples; ++s) {
        const int k0 = rng.Binomial(c.num_users, pi_plus);
        const double center = (2.0 * k0 - c.num_users) / c.num_users;
        const double h = rule.ProbOneGivenCount(k0);
        losses[static_cast<size_t>(s)] =
            rule.Decide(center + rng.Laplace(rule.scale())) ? 1.0 - h : h;
      }
      return Estimate{Mean(losses), StdError(losses), c.samples};
    }
    case SweepScenario::kAr1Mse: {
      AGEDP_ASSIGN_OR_RETURN(const AR1Model model,
                             AR1Model::Create(c.ar1_rho, c.ar1_sigma));
      AGEDP_ASSIGN_OR_RETURN(const double v,
                             MsePenaltyAr1(model, t, eps, c.num_users, c.ar1_convention));
      return Estimate{v, 0.0, 0};
    }
    case SweepScenario::kMultiQueryPeak:
      break;
  }
  return absl::InternalError("no single-query loss for this scenario");
}

double SingleQueryDelta(const SweepConfig& c, int64_t t) {
  if (t == 0) return 1.0;
  const double td = static_cast<double>(t);
  if (c.scenario == SweepScenario::kAr1Mse) {
    return std::min(1.0, std::pow(std::abs(c.ar1_rho), td) * c.ar1_neighbor_gap /
                             (2.0 * c.ar1_sigma));
  }
  return std::pow(std::abs(1.0 - c.p - c.q), td);
}

}  // namespace

absl::StatusOr<SweepResult> TradeoffSweep(const SweepConfig& c) {
  if (c.eps_grid.empty()) return absl::InvalidArgumentError("empty eps_C grid");
  for (double e : c.eps_grid) AGEDP_RETURN_IF_ERROR(CheckUsersAndBudget(c.num_users, e));
  for (int64_t a : c.ages) {
    if (a < 0) return absl::InvalidArgumentError("ages must be nonnegative");
  }
  if (c.scenario != SweepScenario::kAr1Mse) AGEDP_RETURN_IF_ERROR(CheckTwoState(c.p, c.q));
  SweepResult result;

  if (c.scenario == SweepScenario::kMultiQueryPeak) {
    if (c.intervals.empty()) {
      return absl::InvalidArgumentError("multi-query sweep needs S_bar values");
    }
    const double lambda = std::abs(1.0 - c.p - c.q);
    const DeltaFn delta = [lambda](int64_t t) {
      return t <= 0 ? 1.0 : std::pow(lambda, static_cast<double>(t));
    };
    for (int64_t a : c.ages) {
      for (int64_t s : c.intervals) {
        if (s < a || s <= 0) continue;
        for (double eps : c.eps_grid) {
          const SimplifiedPolicy policy{a, s, eps};
          AGEDP_ASSIGN_OR_RETURN(const PeakRiskResult peak,
                                 PeakRiskFixedPoint(policy, delta));
          if (!peak.converges) continue;
          double loss;
          if (c.peak_uses_failure_rate) {
            if (c.x0_plus_count.has_value()) {
              AGEDP_ASSIGN_OR_RETURN(loss, FailureRateExact(c.p, c.q, a + s, eps,
                                                            c.num_users,
                                                            *c.x0_plus_count));
            } else {
              AGEDP_ASSIGN_OR_RETURN(
                  loss, ExpectedFailureRate(c.p, c.q, a + s, eps, c.num_users));
            }
          } else if (c.p == c.q) {
            AGEDP_ASSIGN_OR_RETURN(
                loss, MsePenaltyTwoState(c.p, c.q, a + s, eps, c.num_users));
          } else {
            Rng rng(c.seed);
            AGEDP_ASSIGN_OR_RETURN(const Estimate e,
                                   MsePenaltyTwoStateMonteCarlo(c.p, c.q, a + s, eps,
                                                                c.num_users,
                                                                c.samples, rng));
            loss = e.mean;
          }
          TradeoffPoint point{"combined", static_cast<double>(a),
                              static_cast<double>(s), eps, peak.epsilon_star, loss,
                              0.0};
          result.combined.push_back(point);
          if (a == 0) {
            point.scheme = "noise-only";
            result.noise_only.push_back(point);
          }
        }
      }
    }
  } else {
    for (double eps : c.eps_grid) {
      for (int64_t t : c.ages) {
        AGEDP_ASSIGN_OR_RETURN(const Estimate loss, SingleQueryLoss(c, t, eps));
        const double risk = AgeDependentRisk(eps, SingleQueryDelta(c, t));
        result.combined.push_back({"combined", static_cast<double>(t), 0.0, eps,
                                   risk, loss.mean, loss.std_error});
      }
      AGEDP_ASSIGN_OR_RETURN(const Estimate fresh, SingleQueryLoss(c, 0, eps));
      result.noise_only.push_back(
          {"noise-only", 0.0, 0.0, eps, eps, fresh.mean, fresh.std_error});
    }
  }
  result.frontier = ParetoFrontier(result.combined);
  for (TradeoffPoint& p : result.frontier) p.scheme = "frontier";
  return result;
}

std::vector<TradeoffPoint> ParetoFrontier(std::vector<TradeoffPoint> points) {
  std::stable_sort(points.begin(), points.end(),
                   [](const TradeoffPoint& a, const TradeoffPoint& b) {
                     if (a.risk != b.risk) return a.risk < b.risk;
                     return a.loss < b.loss;
                   });
  std::vector<TradeoffPoint> frontier;
  double best = std::numeric_limits<double>::infinity();
  for (const TradeoffPoint& p : points) {
    if (p.loss < best) {
      frontier.push_back(p);
      best = p.loss;
    }
  }
  return frontier;
}

}  // namespace agedp
