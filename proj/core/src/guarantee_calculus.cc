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

#include "agedp/guarantee_calculus.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "absl/strings/str_format.h"
#include "agedp/status_macros.h"

namespace agedp {

DeltaFn DeltaFromDecay(const GeometricDecayModel& model) {
  return [model](int64_t t) { return model.Delta(static_cast<double>(t)); };
}

DeltaFn DeltaFromTable(std::vector<double> table) {
  auto shared = std::make_shared<const std::vector<double>>(std::move(table));
  return [shared](int64_t t) {
    if (shared->empty()) return 1.0;
    if (t < 0) return 1.0;
    const size_t i = std::min(static_cast<size_t>(t), shared->size() - 1);
    return (*shared)[i];
  };
}

absl::StatusOr<DeltaFn> DeltaFromChains(std::span<const FiniteMarkovChain> chains,
                                        int64_t horizon) {
  AGEDP_ASSIGN_OR_RETURN(std::vector<double> curve,
                         MaxTvDistanceCurve(chains, horizon));
  return DeltaFromTable(std::move(curve));
}

double LogOnePlusDeltaExpm1(double delta, double s) {
  if (delta <= 0.0 || s <= 0.0) return 0.0;
  if (s > 40.0) {
    // ln(Delta e^s + (1 - Delta)) = s + ln(Delta + (1 - Delta) e^-s).
    return s + std::log(delta + (1.0 - delta) * std::exp(-s));
  }
  return std::log1p(delta * std::expm1(s));
}

double AgeDependentRisk(double eps_c, double delta_t) {
  return LogOnePlusDeltaExpm1(delta_t, eps_c);
}

double AgeDependentRisk(double eps_c, const DeltaFn& delta, int64_t t) {
  return AgeDependentRisk(eps_c, delta(t));
}

absl::StatusOr<std::optional<double>> MechanismIndependentRisk(
    const FiniteMarkovChain& chain, int64_t t) {
  if (t < 1) return absl::InvalidArgumentError("age must be at least 1");
  AGEDP_ASSIGN_OR_RETURN(const double lambda, SpectralLambdaStar(chain));
  AGEDP_ASSIGN_OR_RETURN(const Eigen::VectorXd pi, StationaryDistribution(chain));
  const double decay = std::pow(lambda, static_cast<double>(t));
  double best = 0.0;
  for (int z = 0; z < pi.size(); ++z) {
    const double ratio = (1.0 - pi(z)) / pi(z);
    const double denom = pi(z) - std::sqrt(ratio / 4.0) * decay;
    if (!(denom > 0.0)) return std::optional<double>();
    best = std::max(best, std::sqrt(ratio) * decay / denom);
  }
  return std::optional<double>(best);
}

double BasicComposition(std::span<const double> budgets) {
  double total = 0.0;
  for (double b : budgets) total += b;
  return total;
}

absl::Status SimplifiedPolicy::Validate() const {
  if (age < 0) return absl::InvalidArgumentError("input age A must be >= 0");
  if (interval <= 0) return absl::InvalidArgumentError("interval S_bar must be > 0");
  if (!(eps_c > 0.0) || !std::isfinite(eps_c)) {
    return absl::InvalidArgumentError("per-query budget eps_C must be > 0");
  }
  return absl::OkStatus();
}

absl::StatusOr<PolicySchedule> PolicySchedule::Create(
    std::vector<ScheduleEntry> entries) {
  for (size_t n = 0; n < entries.size(); ++n) {
    const ScheduleEntry& e = entries[n];
    if (e.age < 0) {
      return absl::InvalidArgumentError(
          absl::StrFormat("entry %d: age A must be >= 0, got %d", n + 1, e.age));
    }
    if (e.publish_time - e.age < 0) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "entry %d: input time S - A = %d precedes system start", n + 1,
          e.publish_time - e.age));
    }
    if (!(e.eps_c > 0.0) || !std::isfinite(e.eps_c)) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "entry %d: eps_C must be positive and finite, got %g", n + 1, e.eps_c));
    }
    if (n > 0 && e.publish_time <= entries[n - 1].publish_time) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "entry %d: publish times must be strictly increasing (%d after %d)",
          n + 1, e.publish_time, entries[n - 1].publish_time));
    }
  }
  return PolicySchedule(std::move(entries));
}

absl::StatusOr<PolicySchedule> PolicySchedule::Uniform(
    const SimplifiedPolicy& policy, int64_t epochs) {
  AGEDP_RETURN_IF_ERROR(policy.Validate());
  std::vector<ScheduleEntry> entries;
  entries.reserve(static_cast<size_t>(std::max<int64_t>(epochs, 0)));
  for (int64_t n = 1; n <= epochs; ++n) {
    entries.push_back({n * policy.interval, policy.age, policy.eps_c});
  }
  return Create(std::move(entries));
}

absl::StatusOr<RiskCurve> ComposeRiskCurve(const PolicySchedule& schedule,
                                           const DeltaFn& delta, int64_t horizon) {
  if (horizon < 0) return absl::InvalidArgumentError("horizon must be nonnegative");
  RiskCurve curve;
  curve.horizon = horizon;
  curve.values.assign(static_cast<size_t>(horizon) + 1, 0.0);
  const auto& entries = schedule.entries();
  // Exponent eps_{C,n} + eps(S_n - A_n) of the epoch currently in force.
  double exponent = 0.0;
  int64_t anchor = 0;  // S_n - A_n of the epoch in force
  bool active = false;
  size_t next = 0;
  for (int64_t t = 0; t <= horizon; ++t) {
    if (next < entries.size() && entries[next].publish_time == t) {
      const ScheduleEntry& e = entries[next];
      const int64_t input_time = e.publish_time - e.age;
      double history;
      if (input_time < t) {
        history = curve.values[static_cast<size_t>(input_time)];
      } else {
        // A_n = 0: carry the previous epoch forward to this slot.
        history = active ? LogOnePlusDeltaExpm1(delta(t - anchor), exponent) : 0.0;
      }
      exponent = e.eps_c + history;
      anchor = input_time;
      active = true;
      ++next;
    }
    if (active) {
      curve.values[static_cast<size_t>(t)] =
          LogOnePlusDeltaExpm1(delta(t - anchor), exponent);
    }
  }
  return curve;
}

std::vector<double> InEpochPeaks(const PolicySchedule& schedule,
                                 const RiskCurve& curve) {
  std::vector<double> peaks;
  for (const ScheduleEntry& e : schedule.entries()) {
    if (e.publish_time > curve.horizon) break;
    peaks.push_back(curve.at(e.publish_time));
  }
  return peaks;
}

absl::StatusOr<PeakRiskResult> PeakRiskFixedPoint(const SimplifiedPolicy& policy,
                                                  const DeltaFn& delta) {
  AGEDP_RETURN_IF_ERROR(policy.Validate());
  if (policy.interval < policy.age) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "interval S_bar = %d is shorter than the input age A = %d",
        policy.interval, policy.age));
  }
  const double da = delta(policy.age);
  const double db = delta(policy.interval - policy.age);
  PeakRiskResult result;
  result.contraction = da * db * std::exp(policy.eps_c);
  if (da == 0.0) {
    result.converges = true;
    result.epsilon_star = 0.0;
    return result;
  }
  if (!(result.contraction < 1.0)) {
    result.converges = false;
    result.epsilon_star = std::numeric_limits<double>::infinity();
    return result;
  }
  result.converges = true;
  result.epsilon_star =
      std::log1p(da * std::expm1(policy.eps_c) / (1.0 - result.contraction));
  return result;
}

absl::StatusOr<std::vector<double>> IterateInEpochPeaks(
    const SimplifiedPolicy& policy, const DeltaFn& delta, int64_t count) {
  AGEDP_RETURN_IF_ERROR(policy.Validate());
  if (policy.interval < policy.age) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "interval S_bar = %d is shorter than the input age A = %d",
        policy.interval, policy.age));
  }
  const double da = delta(policy.age);
  const double db = delta(policy.interval - policy.age);
  std::vector<double> peaks;
  peaks.reserve(static_cast<size_t>(std::max<int64_t>(count, 0)));
  double prev = 0.0;
  for (int64_t n = 0; n < count; ++n) {
    // e^{eps(S_n - A)} approximated by aging the previous peak S_bar - A slots.
    const double carried = LogOnePlusDeltaExpm1(db, prev);
    prev = LogOnePlusDeltaExpm1(da, policy.eps_c + carried);
    peaks.push_back(prev);
  }
  return peaks;
}

}  // namespace agedp
