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

// Query sensitivity, Laplace noising, artificial aging and multi-query
// publishing with age-of-information bookkeeping.

#ifndef AGEDP_MECHANISMS_H_
#define AGEDP_MECHANISMS_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "agedp/chain_models.h"
#include "agedp/guarantee_calculus.h"
#include "agedp/random.h"

namespace agedp {

inline constexpr int64_t kDefaultMaxNeighborPairs = 1'000'000;

// A query over a database holding one real value per user.
class QueryFunction {
 public:
  enum class Structure { kNone, kSum, kMean, kConstant };
  using Evaluator = std::function<Eigen::VectorXd(std::span<const double>)>;

  static QueryFunction Mean(int num_users);
  static QueryFunction Sum(int num_users);
  static QueryFunction Constant(int num_users, Eigen::VectorXd value);
  static QueryFunction Custom(int num_users, int dimension, Evaluator evaluator,
                             std::optional<double> declared_sensitivity = std::nullopt);

  absl::StatusOr<Eigen::VectorXd> Evaluate(std::span<const double> database) const;

  int num_users() const { return num_users_; }
  int dimension() const { return dimension_; }
  Structure structure() const { return structure_; }
  std::optional<double> declared_sensitivity() const { return declared_; }

 private:
  QueryFunction(int num_users, int dimension, Structure structure,
                Evaluator evaluator, std::optional<double> declared)
      : num_users_(num_users),
        dimension_(dimension),
        structure_(structure),
        evaluator_(std::move(evaluator)),
        declared_(declared) {}

  int num_users_;
  int dimension_;
  Structure structure_;
  Evaluator evaluator_;
  std::optional<double> declared_;
};

// Max l1 change of `f` between databases differing in one user. Enumerates
// neighbor pairs when there are at most `max_neighbor_pairs` of them,
// otherwise falls back to declared structure or sensitivity.
absl::StatusOr<double> L1Sensitivity(
    const QueryFunction& f, const std::vector<std::vector<double>>& per_user_values,
    int64_t max_neighbor_pairs = kDefaultMaxNeighborPairs);

// A single-query randomized mechanism over user values.
using Mechanism = std::function<Eigen::VectorXd(std::span<const double>, Rng&)>;

class LaplaceMechanism {
 public:
  static absl::StatusOr<LaplaceMechanism> Create(QueryFunction f,
                                                 double sensitivity, double eps_c);

  absl::StatusOr<Eigen::VectorXd> Release(std::span<const double> database,
                                          Rng& rng) const;
  // Laplace scale b = sensitivity / eps_C.
  double scale() const { return scale_; }
  double eps_c() const { return eps_c_; }
  const QueryFunction& query() const { return f_; }

  Mechanism AsMechanism() const;

 private:
  LaplaceMechanism(QueryFunction f, double scale, double eps_c)
      : f_(std::move(f)), scale_(scale), eps_c_(eps_c) {}

  QueryFunction f_;
  double scale_;
  double eps_c_;
};

// Applies a mechanism to a database whose users were each resampled `age`
// steps backward through their chain's reversed kernel.
class AgingMechanism {
 public:
  // `chains` holds one chain per user, or a single chain shared by all.
  static absl::StatusOr<AgingMechanism> Create(
      Mechanism base, std::span<const FiniteMarkovChain> chains, int num_users,
      int64_t age);

  // `states` holds per-user state indices.
  absl::StatusOr<Eigen::VectorXd> Release(std::span<const int> states,
                                          Rng& rng) const;

 private:
  AgingMechanism(Mechanism base, std::vector<FiniteMarkovChain> chains,
                 std::vector<BackwardSampler> samplers, int num_users)
      : base_(std::move(base)),
        chains_(std::move(chains)),
        samplers_(std::move(samplers)),
        num_users_(num_users) {}

  Mechanism base_;
  std::vector<FiniteMarkovChain> chains_;
  std::vector<BackwardSampler> samplers_;
  int num_users_;
};

struct PublishedOutput {
  Eigen::VectorXd value;
  int64_t publish_time = 0;
  int64_t input_timestamp = 0;
  int64_t query_index = 0;  // 1-based
};

// One stationary state per user, independently.
absl::StatusOr<std::vector<int>> DrawStationaryStates(
    std::span<const FiniteMarkovChain> chains, int num_users, Rng& rng);

// Simulates every user's chain forward from a stationary draw and publishes
// the n-th Laplace release of `f` on X_{S_n - A_n} at slot S_n, for all
// S_n <= horizon. `chains` follows the AgingMechanism convention.
absl::StatusOr<std::vector<PublishedOutput>> RunMultiQuery(
    const PolicySchedule& schedule, std::span<const FiniteMarkovChain> chains,
    const QueryFunction& f, int64_t horizon, Rng& rng);

// AoI(t) for t = 0..horizon; nullopt before the first publish.
std::vector<std::optional<int64_t>> AoiCurve(const PolicySchedule& schedule,
                                             int64_t horizon);

}  // namespace agedp

#endif  // AGEDP_MECHANISMS_H_
