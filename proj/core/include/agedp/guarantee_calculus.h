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

// Age-dependent privacy risk for single queries and for multi-query
// publishing schedules.

#ifndef AGEDP_GUARANTEE_CALCULUS_H_
#define AGEDP_GUARANTEE_CALCULUS_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "agedp/chain_models.h"

namespace agedp {

// Maximal total-variation distance as a function of integer age.
using DeltaFn = std::function<double(int64_t)>;

DeltaFn DeltaFromDecay(const GeometricDecayModel& model);
// Table lookup; ages past the end reuse the last entry, which is an upper
// bound because Delta is nonincreasing.
DeltaFn DeltaFromTable(std::vector<double> table);
// Exact Delta(0..horizon) of a population of chains, tabulated.
absl::StatusOr<DeltaFn> DeltaFromChains(std::span<const FiniteMarkovChain> chains,
                                        int64_t horizon);

// ln(1 + Delta (e^s - 1)), stable for large s and tiny Delta.
double LogOnePlusDeltaExpm1(double delta, double s);

// ln(1 + Delta(t) (e^eps_C - 1)).
double AgeDependentRisk(double eps_c, double delta_t);
double AgeDependentRisk(double eps_c, const DeltaFn& delta, int64_t t);

// Mechanism-independent bound for an irreducible, aperiodic, reversible
// chain. nullopt when no finite guarantee exists at this age.
absl::StatusOr<std::optional<double>> MechanismIndependentRisk(
    const FiniteMarkovChain& chain, int64_t t);

double BasicComposition(std::span<const double> budgets);

struct ScheduleEntry {
  int64_t publish_time = 0;  // S_n
  int64_t age = 0;           // A_n
  double eps_c = 0.0;        // eps_{C,n}
};

// Uniform (A, S_bar, eps_C) policy.
struct SimplifiedPolicy {
  int64_t age = 0;
  int64_t interval = 1;
  double eps_c = 0.0;

  absl::Status Validate() const;
};

class PolicySchedule {
 public:
  // Requires strictly increasing publish times, A_n >= 0, S_n - A_n >= 0 and
  // positive budgets.
  static absl::StatusOr<PolicySchedule> Create(std::vector<ScheduleEntry> entries);
  // S_n = n * S_bar for n = 1..epochs.
  static absl::StatusOr<PolicySchedule> Uniform(const SimplifiedPolicy& policy,
                                                int64_t epochs);

  const std::vector<ScheduleEntry>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }

 private:
  explicit PolicySchedule(std::vector<ScheduleEntry> entries)
      : entries_(std::move(entries)) {}

  std::vector<ScheduleEntry> entries_;
};

struct RiskCurve {
  std::vector<double> values;  // values[t] for t = 0..horizon
  int64_t horizon = 0;

  double at(int64_t t) const { return values[static_cast<size_t>(t)]; }
};

// Dense per-slot risk of a multi-query mechanism. Zero before the first
// publish. When A_n = 0 the history term eps(S_n) is the previous epoch's
// risk carried forward to slot S_n.
absl::StatusOr<RiskCurve> ComposeRiskCurve(const PolicySchedule& schedule,
                                           const DeltaFn& delta, int64_t horizon);

// Risk at each publish slot S_n within the horizon.
std::vector<double> InEpochPeaks(const PolicySchedule& schedule,
                                 const RiskCurve& curve);

struct PeakRiskResult {
  bool converges = false;
  // +infinity when the peaks diverge.
  double epsilon_star = 0.0;
  // Delta(A) Delta(S_bar - A) e^eps_C; the peaks converge iff this is < 1.
  double contraction = 0.0;
};

absl::StatusOr<PeakRiskResult> PeakRiskFixedPoint(const SimplifiedPolicy& policy,
                                                  const DeltaFn& delta);

// eps_n = ln(1 + Delta(A)(e^eps_C (1 + Delta(S_bar - A)(e^eps_{n-1} - 1)) - 1))
// from eps_0 = 0, for n = 1..count.
absl::StatusOr<std::vector<double>> IterateInEpochPeaks(
    const SimplifiedPolicy& policy, const DeltaFn& delta, int64_t count);

}  // namespace agedp

#endif  // AGEDP_GUARANTEE_CALCULUS_H_
