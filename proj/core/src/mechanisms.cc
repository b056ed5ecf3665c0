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
#include <utility>

#include "absl/strings/str_format.h"
#include "agedp/status_macros.h"

namespace agedp {
namespace {

const FiniteMarkovChain& ChainFor(std::span<const FiniteMarkovChain> chains,
                                  int user) {
  return chains.size() == 1 ? chains[0] : chains[static_cast<size_t>(user)];
}

absl::Status CheckChainCount(std::span<const FiniteMarkovChain> chains,
                             int num_users) {
  if (chains.empty()) return absl::InvalidArgumentError("no chains supplied");
  if (chains.size() != 1 && chains.size() != static_cast<size_t>(num_users)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "expected 1 or %d chains, got %d", num_users, chains.size()));
  }
  return absl::OkStatus();
}

absl::StatusOr<double> StructuralSensitivity(
    const QueryFunction& f, const std::vector<std::vector<double>>& values) {
  double widest = 0.0;
  for (const auto& v : values) {
    if (v.empty()) continue;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    widest = std::max(widest, *hi - *lo);
  }
  switch (f.structure()) {
    case QueryFunction::Structure::kConstant:
      return 0.0;
    case QueryFunction::Structure::kSum:
      return widest;
    case QueryFunction::Structure::kMean:
      return widest / f.num_users();
    case QueryFunction::Structure::kNone:
      break;
  }
  if (f.declared_sensitivity().has_value()) return *f.declared_sensitivity();
  return absl::ResourceExhaustedError(
      "database space is too large to enumerate and the query declares no "
      "structure; declare its l1 sensitivity explicitly");
}

}  // namespace

QueryFunction QueryFunction::Mean(int num_users) {
  return QueryFunction(
      num_users, 1, Structure::kMean,
      [num_users](std::span<const double> x) {
        double s = 0.0;
        for (double v : x) s += v;
        return Eigen::VectorXd::Constant(1, s / num_users);
      },
      std::nullopt);
}

QueryFunction QueryFunction::Sum(int num_users) {
  return QueryFunction(
      num_users, 1, Structure::kSum,
      [](std::span<const double> x) {
        double s = 0.0;
        for (double v : x) s += v;
        return Eigen::VectorXd::Constant(1, s);
      },
      std::nullopt);
}

QueryFunction QueryFunction::Constant(int num_users, Eigen::VectorXd value) {
  const int dim = static_cast<int>(value.size());
  return QueryFunction(
      num_users, dim, Structure::kConstant,
      [value = std::move(value)](std::span<const double>) { return value; },
      std::nullopt);
}

QueryFunction QueryFunction::Custom(int num_users, int dimension,
                                    Evaluator evaluator,
                                    std::optional<double> declared_sensitivity) {
  return QueryFunction(num_users, dimension, Structure::kNone,
                       std::move(evaluator), declared_sensitivity);
}

absl::StatusOr<Eigen::VectorXd> QueryFunction::Evaluate(
    std::span<const double> database) const {
  if (database.size() != static_cast<size_t>(num_users_)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "query expects %d users, database has %d", num_users_, database.size()));
  }
  Eigen::VectorXd out = evaluator_(database);
  if (out.size() != dimension_) {
    return absl::InternalError(absl::StrFormat(
        "query returned dimension %d, declared %d", out.size(), dimension_));
  }
  return out;
}

absl::StatusOr<double> L1Sensitivity(
    const QueryFunction& f, const std::vector<std::vector<double>>& per_user_values,
    int64_t max_neighbor_pairs) {
  const int n = f.num_users();
  if (per_user_values.size() != static_cast<size_t>(n)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "need value sets for %d users, got %d", n, per_user_values.size()));
  }
  double databases = 1.0;
  double alternatives = 0.0;
  for (const auto& v : per_user_values) {
    if (v.empty()) return absl::InvalidArgumentError("empty per-user value set");
    databases *= static_cast<double>(v.size());
    alternatives += static_cast<double>(v.size()) - 1.0;
  }
  const double pairs = databases * alternatives / 2.0;
  if (pairs > static_cast<double>(max_neighbor_pairs)) {
    return StructuralSensitivity(f, per_user_values);
  }

  std::vector<size_t> index(n, 0);
  std::vector<double> db(n), alt(n);
  double best = 0.0;
  while (true) {
    for (int i = 0; i < n; ++i) db[i] = per_user_values[i][index[i]];
    AGEDP_ASSIGN_OR_RETURN(const Eigen::VectorXd base, f.Evaluate(db));
    for (int i = 0; i < n; ++i) {
      for (size_t j = index[i] + 1; j < per_user_values[i].size(); ++j) {
        alt = db;
        alt[i] = per_user_values[i][j];
        AGEDP_ASSIGN_OR_RETURN(const Eigen::VectorXd other, f.Evaluate(alt));
        best = std::max(best, (base - other).lpNorm<1>());
      }
    }
    int k = 0;
    while (k < n && ++index[k] == per_user_values[k].size()) index[k++] = 0;
    if (k == n) break;
  }
  if (f.declared_sensitivity().has_value() &&
      *f.declared_sensitivity() < best - 1e-12) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "declared sensitivity %g is below the enumerated sensitivity %g",
        *f.declared_sensitivity(), best));
  }
  return best;
}

absl::StatusOr<LaplaceMechanism> LaplaceMechanism::Create(QueryFunction f,
                                                          double sensitivity,
                                                          double eps_c) {
  if (!(eps_c > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("eps_C must be positive, got %g", eps_c));
  }
  if (!(sensitivity >= 0.0) || !std::isfinite(sensitivity)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sensitivity must be finite and >= 0, got %g", sensitivity));
  }
  return LaplaceMechanism(std::move(f), sensitivity / eps_c, eps_c);
}

absl::StatusOr<Eigen::VectorXd> LaplaceMechanism::Release(
    std::span<const double> database, Rng& rng) const {
  AGEDP_ASSIGN_OR_RETURN(Eigen::VectorXd out, f_.Evaluate(database));
  if (scale_ > 0.0) {
    for (Eigen::Index i = 0; i < out.size(); ++i) out(i) += rng.Laplace(scale_);
  }
  return out;
}

Mechanism LaplaceMechanism::AsMechanism() const {
  return [self = *this](std::span<const double> db, Rng& rng) {
    return self.Release(db, rng).value();
  };
}

absl::StatusOr<AgingMechanism> AgingMechanism::Create(
    Mechanism base, std::span<const FiniteMarkovChain> chains, int num_users,
    int64_t age) {
  AGEDP_RETURN_IF_ERROR(CheckChainCount(chains, num_users));
  if (age < 0) return absl::InvalidArgumentError("age must be nonnegative");
  std::vector<BackwardSampler> samplers;
  for (const FiniteMarkovChain& chain : chains) {
    AGEDP_ASSIGN_OR_RETURN(BackwardSampler s, BackwardSampler::Create(chain, age));
    samplers.push_back(std::move(s));
  }
  return AgingMechanism(std::move(base),
                        std::vector<FiniteMarkovChain>(chains.begin(), chains.end()),
                        std::move(samplers), num_users);
}

absl::StatusOr<Eigen::VectorXd> AgingMechanism::Release(std::span<const int> states,
                                                        Rng& rng) const {
  if (states.size() != static_cast<size_t>(num_users_)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "expected %d user states, got %d", num_users_, states.size()));
  }
  std::vector<double> aged(states.size());
  for (int i = 0; i < num_users_; ++i) {
    const size_t c = samplers_.size() == 1 ? 0 : static_cast<size_t>(i);
    const FiniteMarkovChain& chain = chains_[c];
    if (states[i] < 0 || states[i] >= chain.num_states()) {
      return absl::InvalidArgumentError(
          absl::StrFormat("user %d state %d out of range", i, states[i]));
    }
    aged[i] = chain.states()[samplers_[c].Sample(states[i], rng)].value;
  }
  return base_(aged, rng);
}

absl::StatusOr<std::vector<int>> DrawStationaryStates(
    std::span<const FiniteMarkovChain> chains, int num_users, Rng& rng) {
  AGEDP_RETURN_IF_ERROR(CheckChainCount(chains, num_users));
  std::vector<Eigen::VectorXd> pis;
  for (const FiniteMarkovChain& chain : chains) {
    AGEDP_ASSIGN_OR_RETURN(Eigen::VectorXd pi, StationaryDistribution(chain));
    pis.push_back(std::move(pi));
  }
  std::vector<int> states(num_users);
  for (int i = 0; i < num_users; ++i) {
    const Eigen::VectorXd& pi = pis.size() == 1 ? pis[0] : pis[i];
    states[i] = rng.Categorical(std::span<const double>(pi.data(), pi.size()));
  }
  return states;
}

absl::StatusOr<std::vector<PublishedOutput>> RunMultiQuery(
    const PolicySchedule& schedule, std::span<const FiniteMarkovChain> chains,
    const QueryFunction& f, int64_t horizon, Rng& rng) {
  const int n = f.num_users();
  AGEDP_RETURN_IF_ERROR(CheckChainCount(chains, n));
  std::vector<std::vector<double>> value_sets;
  for (int i = 0; i < n; ++i) value_sets.push_back(ChainFor(chains, i).values());
  AGEDP_ASSIGN_OR_RETURN(const double sensitivity, L1Sensitivity(f, value_sets));

  std::vector<ScheduleEntry> due;
  for (const ScheduleEntry& e : schedule.entries()) {
    if (e.publish_time <= horizon) due.push_back(e);
  }
  std::vector<PublishedOutput> outputs;
  if (due.empty()) return outputs;

  int64_t last_input = 0;
  for (const ScheduleEntry& e : due) {
    last_input = std::max(last_input, e.publish_time - e.age);
  }
  // snapshots[s][i] is user i's state at slot s.
  Rng init = rng.Split(0);
  AGEDP_ASSIGN_OR_RETURN(std::vector<int> state, DrawStationaryStates(chains, n, init));
  std::vector<std::vector<int>> snapshots;
  snapshots.reserve(static_cast<size_t>(last_input) + 1);
  snapshots.push_back(state);
  std::vector<Rng> user_rngs;
  for (int i = 0; i < n; ++i) user_rngs.push_back(rng.Split(1 + static_cast<uint64_t>(i)));
  for (int64_t s = 1; s <= last_input; ++s) {
    for (int i = 0; i < n; ++i) state[i] = StepForward(ChainFor(chains, i), state[i], user_rngs[i]);
    snapshots.push_back(state);
  }

  Rng noise = rng.Split(1 + static_cast<uint64_t>(n));
  std::vector<double> db(n);
  for (size_t k = 0; k < due.size(); ++k) {
    const ScheduleEntry& e = due[k];
    const int64_t input_time = e.publish_time - e.age;
    const std::vector<int>& snap = snapshots[static_cast<size_t>(input_time)];
    for (int i = 0; i < n; ++i) db[i] = ChainFor(chains, i).states()[snap[i]].value;
    AGEDP_ASSIGN_OR_RETURN(const LaplaceMechanism mech,
                           LaplaceMechanism::Create(f, sensitivity, e.eps_c));
    AGEDP_ASSIGN_OR_RETURN(Eigen::VectorXd value, mech.Release(db, noise));
    outputs.push_back({std::move(value), e.publish_time, input_time,
                       static_cast<int64_t>(k) + 1});
  }
  return outputs;
}

std::vector<std::optional<int64_t>> AoiCurve(const PolicySchedule& schedule,
                                             int64_t horizon) {
  std::vector<std::optional<int64_t>> aoi(static_cast<size_t>(std::max<int64_t>(horizon, -1) + 1));
  const auto& entries = schedule.entries();
  size_t next = 0;
  std::optional<int64_t> current;
  for (int64_t t = 0; t <= horizon; ++t) {
    if (next < entries.size() && entries[next].publish_time == t) {
      current = entries[next].age;
      ++next;
    } else if (current.has_value()) {
      current = *current + 1;
    }
    aoi[static_cast<size_t>(t)] = current;
  }
  return aoi;
}

}  // namespace agedp
