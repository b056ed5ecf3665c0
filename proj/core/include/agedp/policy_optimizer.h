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

// Peak-risk minimization over uniform publishing policies under a peak-age
// penalty constraint, for Delta(t) = c rho^t.

#ifndef AGEDP_POLICY_OPTIMIZER_H_
#define AGEDP_POLICY_OPTIMIZER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "agedp/attack_sim.h"
#include "agedp/chain_models.h"
#include "agedp/guarantee_calculus.h"

namespace agedp {

// Sampling grid for the monotonicity check of a penalty.
struct PenaltyValidationGrid {
  double max_age = 50.0;
  int age_points = 26;
  double min_eps = 0.01;
  double max_eps = 10.0;
  int eps_points = 20;
  double slack = 1e-9;
};

// Noise-aware peak-age penalty f(t, eps_C): increasing in the age t and
// decreasing in the budget eps_C.
class PenaltyFunction {
 public:
  using Evaluator = std::function<double(double t, double eps_c)>;

  using ValidationGrid = PenaltyValidationGrid;

  // Checks sampled monotonicity on `grid` unless it is nullopt.
  static absl::StatusOr<PenaltyFunction> Create(
      std::string name, Evaluator evaluator,
      std::optional<ValidationGrid> grid = ValidationGrid());

  static absl::StatusOr<PenaltyFunction> MseTwoState(double p, double q,
                                                     int num_users);
  // Failure rate for a fixed count of users at +1 in X_0, or averaged over a
  // stationary X_0 when `x0_plus_count` is nullopt.
  static absl::StatusOr<PenaltyFunction> FailureRate(
      double p, double q, int num_users, std::optional<int> x0_plus_count);
  static absl::StatusOr<PenaltyFunction> Ar1Mse(
      const AR1Model& model, int num_users,
      NoiseVarianceConvention convention = NoiseVarianceConvention::kAsPrinted);
  // Bilinear interpolation on a rectangular grid, clamped at the edges.
  // values[i][j] is f(ages[i], eps[j]).
  static absl::StatusOr<PenaltyFunction> Table(
      std::vector<double> ages, std::vector<double> eps,
      std::vector<std::vector<double>> values);

  // The zero penalty; placeholder for problems assembled field by field.
  PenaltyFunction() : PenaltyFunction("zero", [](double, double) { return 0.0; }) {}

  double operator()(double t, double eps_c) const { return evaluator_(t, eps_c); }
  const std::string& name() const { return name_; }

  absl::Status ValidateMonotonicity(const ValidationGrid& grid) const;

 private:
  PenaltyFunction(std::string name, Evaluator evaluator)
      : name_(std::move(name)), evaluator_(std::move(evaluator)) {}

  std::string name_;
  Evaluator evaluator_;
};

// Budget at which the eps_C -> infinity limit of f is evaluated.
inline constexpr double kLimitEps = 1e6;

struct OptimizationProblem {
  double c = 1.0;
  double rho = 0.5;
  double f_bar = 0.0;
  PenaltyFunction penalty;
  int K = 1000;
  double phi = 1e-6;
  double eps_bar = 10.0;
  // Cap on the A_tilde / B_bar ceilings when f plateaus below f_bar.
  double max_age = 1e4;
};

enum class Branch { kInterior, kBoundary };
std::string BranchName(Branch branch);

struct RoundedPolicy {
  int64_t age = 0;
  int64_t interval = 0;
  // +infinity when the rounded point violates c^2 rho^S e^eps < 1.
  double objective = 0.0;
  double penalty = 0.0;
  bool feasible = false;
};

struct OptimizerSolution {
  double eps_c = 0.0;
  double age = 0.0;
  double interval = 0.0;
  double objective = 0.0;
  Branch branch = Branch::kInterior;
  double penalty = 0.0;
  // |2 c^2 rho^S e^eps - 1|.
  double stationarity_residual = 0.0;
  RoundedPolicy rounded;
  // True when the age ceiling hit max_age because f plateaus below f_bar.
  bool ceiling_capped = false;
  int64_t penalty_evaluations = 0;
  int feasible_grid_points = 0;
};

// True for the status returned when no grid point is feasible.
bool IsInfeasible(const absl::Status& status);

// ln(1 + c rho^A (e^eps - 1) / (1 - c^2 rho^S e^eps)).
absl::StatusOr<double> Objective(double c, double rho, double eps_c, double age,
                                 double interval);

// S_bar with rho^S e^eps = 1 / (2 c^2).
absl::StatusOr<double> StationaryInterval(double c, double rho, double eps_c);

// Interior branch: S_bar from StationaryInterval, bisection on A.
absl::StatusOr<OptimizerSolution> SolveInterior(const OptimizationProblem& problem);
// Boundary branch: A = 0, bisection on S_bar.
absl::StatusOr<OptimizerSolution> SolveBoundary(const OptimizationProblem& problem);
// Both branches; the smaller objective wins, the boundary on ties.
absl::StatusOr<OptimizerSolution> Solve(const OptimizationProblem& problem);

struct ScheduleGrid {
  std::vector<int64_t> ages;
  std::vector<int64_t> intervals;
  std::vector<double> budgets;
};

struct OptimalityReport {
  int epochs = 0;
  int64_t schedules_checked = 0;
  int64_t feasible_schedules = 0;
  double best_uniform_peak = 0.0;
  double best_overall_peak = 0.0;
  std::vector<ScheduleEntry> best_overall;
  SimplifiedPolicy best_uniform;
  bool uniform_attains_minimum = false;
};

// Enumerates every per-epoch choice (A_n, S_bar_n, eps_n) from `grid` for
// `epochs` epochs subject to f(A_n + S_bar_n, eps_n) <= f_bar, repeats the
// final choice forever, and compares the best uniform schedule against the
// best schedule overall. Peak risk is the supremum of the in-epoch peaks.
absl::StatusOr<OptimalityReport> VerifySimplifiedOptimality(
    double c, double rho, const PenaltyFunction& penalty, double f_bar,
    int epochs, const ScheduleGrid& grid, double slack = 1e-9);

struct NoTradeoffReport {
  bool no_tradeoff = false;
  double max_slope = 0.0;
  double worst_eps = 0.0;
  double worst_offset = 0.0;
  int64_t slopes_checked = 0;
};

// Samples g(eps) = f((ln(e^eps - 1) + eps) / ln(1/rho) + a, eps) on the
// grids; no tradeoff iff every finite-difference slope is <= 1e-9. Samples
// with a negative age are skipped.
absl::StatusOr<NoTradeoffReport> NoTradeoffCheck(const PenaltyFunction& penalty,
                                                 double rho,
                                                 const std::vector<double>& eps_grid,
                                                 const std::vector<double>& offsets);

}  // namespace agedp

#endif  // AGEDP_POLICY_OPTIMIZER_H_
