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

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "absl/strings/str_format.h"
#include "agedp/guarantee_calculus.h"
#include "agedp/status_macros.h"

namespace agedp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

absl::Status CheckDecay(double c, double rho) {
  return GeometricDecayModel::Create(c, rho).status();
}

absl::Status CheckProblem(const OptimizationProblem& p) {
  AGEDP_RETURN_IF_ERROR(CheckDecay(p.c, p.rho));
  if (p.K < 1) return absl::InvalidArgumentError("K must be at least 1");
  if (!(p.phi > 0.0)) return absl::InvalidArgumentError("phi must be positive");
  if (!(p.eps_bar > 0.0)) return absl::InvalidArgumentError("eps_bar must be positive");
  if (!(p.max_age > 0.0)) return absl::InvalidArgumentError("max_age must be positive");
  if (!std::isfinite(p.f_bar)) return absl::InvalidArgumentError("f_bar must be finite");
  return absl::OkStatus();
}

// Counts penalty evaluations made by a solver run.
class CountingPenalty {
 public:
  explicit CountingPenalty(const PenaltyFunction& f) : f_(f) {}
  double operator()(double t, double eps) {
    ++count_;
    return f_(t, eps);
  }
  int64_t count() const { return count_; }

 private:
  const PenaltyFunction& f_;
  int64_t count_ = 0;
};

struct Ceiling {
  double value = 0.0;
  bool capped = false;
  bool empty = false;  // f(0, inf) already exceeds f_bar
};

// Largest age t with lim_{eps -> inf} f(t, eps) <= f_bar, within phi.
Ceiling AgeCeiling(CountingPenalty& f, double f_bar, double phi, double max_age) {
  Ceiling out;
  if (f(0.0, kLimitEps) > f_bar) {
    out.empty = true;
    return out;
  }
  double lo = 0.0, hi = 1.0;
  while (f(hi, kLimitEps) <= f_bar) {
    lo = hi;
    if (hi >= max_age) {
      out.value = max_age;
      out.capped = true;
      return out;
    }
    hi = std::min(2.0 * hi, max_age);
  }
  while (hi - lo > phi) {
    const double mid = 0.5 * (lo + hi);
    (f(mid, kLimitEps) <= f_bar ? lo : hi) = mid;
  }
  out.value = lo;
  return out;
}

// Largest x in [0, upper] with g(x) <= f_bar, assuming g increasing; nullopt
// when g(0) > f_bar.
template <typename G>
std::optional<double> BisectMax(G&& g, double upper, double f_bar, double phi) {
  if (g(0.0) > f_bar) return std::nullopt;
  if (g(upper) <= f_bar) return upper;
  double lo = 0.0, hi = upper;
  while (hi - lo > phi) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) <= f_bar ? lo : hi) = mid;
  }
  return lo;
}

absl::Status Infeasible(const std::string& branch, const std::string& why) {
  return absl::OutOfRangeError(
      absl::StrFormat("%s branch infeasible: %s", branch, why));
}

void Finish(const OptimizationProblem& p, OptimizerSolution& s) {
  s.objective = Objective(p.c, p.rho, s.eps_c, s.age, s.interval).value_or(kInf);
  s.penalty = p.penalty(s.age + s.interval, s.eps_c);
  s.stationarity_residual =
      std::abs(2.0 * p.c * p.c * std::pow(p.rho, s.interval) * std::exp(s.eps_c) - 1.0);
  RoundedPolicy& r = s.rounded;
  r.age = std::llround(s.age);
  r.interval = std::max<int64_t>(1, std::llround(s.interval));
  const auto obj = Objective(p.c, p.rho, s.eps_c, static_cast<double>(r.age),
                             static_cast<double>(r.interval));
  r.objective = obj.ok() ? *obj : kInf;
  r.penalty = p.penalty(static_cast<double>(r.age + r.interval), s.eps_c);
  r.feasible = obj.ok() && r.penalty <= p.f_bar + p.phi;
}

double DivergenceTerm(double c, double rho, double eps, double interval) {
  return std::exp(2.0 * std::log(c) + interval * std::log(rho) + eps);
}

}  // namespace

absl::StatusOr<PenaltyFunction> PenaltyFunction::Create(
    std::string name, Evaluator evaluator, std::optional<ValidationGrid> grid) {
  PenaltyFunction f(std::move(name), std::move(evaluator));
  if (grid.has_value()) AGEDP_RETURN_IF_ERROR(f.ValidateMonotonicity(*grid));
  return f;
}

absl::Status PenaltyFunction::ValidateMonotonicity(const ValidationGrid& grid) const {
  std::vector<double> ages, eps;
  for (int i = 0; i < grid.age_points; ++i) {
    ages.push_back(grid.max_age * i / std::max(1, grid.age_points - 1));
  }
  for (int j = 0; j < grid.eps_points; ++j) {
    const double frac = static_cast<double>(j) / std::max(1, grid.eps_points - 1);
    eps.push_back(grid.min_eps * std::pow(grid.max_eps / grid.min_eps, frac));
  }
  std::vector<std::vector<double>> v(ages.size(), std::vector<double>(eps.size()));
  for (size_t i = 0; i < ages.size(); ++i) {
    for (size_t j = 0; j < eps.size(); ++j) {
      v[i][j] = evaluator_(ages[i], eps[j]);
      if (!std::isfinite(v[i][j])) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "penalty '%s' is not finite at (t=%g, eps=%g)", name_, ages[i], eps[j]));
      }
    }
  }
  for (size_t i = 0; i < ages.size(); ++i) {
    for (size_t j = 0; j < eps.size(); ++j) {
      if (i > 0 && v[i][j] < v[i - 1][j] - grid.slack) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "penalty '%s' decreases in t between t=%g and t=%g at eps=%g", name_,
            ages[i - 1], ages[i], eps[j]));
      }
      if (j > 0 && v[i][j] > v[i][j - 1] + grid.slack) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "penalty '%s' increases in eps between eps=%g and eps=%g at t=%g",
            name_, eps[j - 1], eps[j], ages[i]));
      }
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<PenaltyFunction> PenaltyFunction::MseTwoState(double p, double q,
                                                             int num_users) {
  AGEDP_RETURN_IF_ERROR(MsePenaltyTwoState(p, q, 0.0, 1.0, num_users).status());
  if (1.0 - p - q < 0.0) {
    return absl::InvalidArgumentError(
        "the MSE penalty needs 1 - p - q >= 0 for fractional ages");
  }
  return Create(absl::StrFormat("mse-two-state(p=%g,q=%g,I=%d)", p, q, num_users),
                [p, q, num_users](double t, double eps) {
                  return MsePenaltyTwoState(p, q, t, eps, num_users).value();
                });
}

absl::StatusOr<PenaltyFunction> PenaltyFunction::FailureRate(
    double p, double q, int num_users, std::optional<int> x0_plus_count) {
  if (1.0 - p - q < 0.0) {
    return absl::InvalidArgumentError(
        "the failure-rate penalty needs 1 - p - q >= 0 for fractional ages");
  }
  if (x0_plus_count.has_value()) {
    AGEDP_RETURN_IF_ERROR(
        FailureRateExact(p, q, 0.0, 1.0, num_users, *x0_plus_count).status());
    const int k0 = *x0_plus_count;
    return Create(
        absl::StrFormat("failure-rate(p=%g,q=%g,I=%d,x0_plus=%d)", p, q, num_users, k0),
        [p, q, num_users, k0](double t, double eps) {
          return FailureRateExact(p, q, t, eps, num_users, k0).value();
        });
  }
  AGEDP_RETURN_IF_ERROR(ExpectedFailureRate(p, q, 0.0, 1.0, num_users).status());
  return Create(
      absl::StrFormat("failure-rate(p=%g,q=%g,I=%d,x0=stationary)", p, q, num_users),
      [p, q, num_users](double t, double eps) {
        return ExpectedFailureRate(p, q, t, eps, num_users).value();
      });
}

absl::StatusOr<PenaltyFunction> PenaltyFunction::Ar1Mse(
    const AR1Model& model, int num_users, NoiseVarianceConvention convention) {
  AGEDP_RETURN_IF_ERROR(MsePenaltyAr1(model, 0.0, 1.0, num_users, convention).status());
  return Create(absl::StrFormat("ar1-mse(rho=%g,sigma=%g,I=%d)", model.rho(),
                                model.sigma(), num_users),
                [model, num_users, convention](double t, double eps) {
                  return MsePenaltyAr1(model, t, eps, num_users, convention).value();
                });
}

absl::StatusOr<PenaltyFunction> PenaltyFunction::Table(
    std::vector<double> ages, std::vector<double> eps,
    std::vector<std::vector<double>> values) {
  if (ages.size() < 2 || eps.size() < 2) {
    return absl::InvalidArgumentError("table penalty needs at least a 2x2 grid");
  }
  if (!std::is_sorted(ages.begin(), ages.end()) ||
      std::adjacent_find(ages.begin(), ages.end()) != ages.end() ||
      !std::is_sorted(eps.begin(), eps.end()) ||
      std::adjacent_find(eps.begin(), eps.end()) != eps.end()) {
    return absl::InvalidArgumentError("table axes must be strictly increasing");
  }
  if (values.size() != ages.size()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "table has %d rows but %d ages", values.size(), ages.size()));
  }
  for (const auto& row : values) {
    if (row.size() != eps.size()) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "table row has %d entries but there are %d budgets", row.size(), eps.size()));
    }
  }
  struct Grid {
    std::vector<double> ages, eps;
    std::vector<std::vector<double>> values;
  };
  auto g = std::make_shared<const Grid>(Grid{std::move(ages), std::move(eps), std::move(values)});
  auto locate = [](const std::vector<double>& axis, double x, size_t& i, double& w) {
    if (x <= axis.front()) {
      i = 0;
      w = 0.0;
      return;
    }
    if (x >= axis.back()) {
      i = axis.size() - 2;
      w = 1.0;
      return;
    }
    i = static_cast<size_t>(std::upper_bound(axis.begin(), axis.end(), x) - axis.begin()) - 1;
    w = (x - axis[i]) / (axis[i + 1] - axis[i]);
  };
  PenaltyFunction f("table", [g, locate](double t, double e) {
    size_t i, j;
    double wt, we;
    locate(g->ages, t, i, wt);
    locate(g->eps, e, j, we);
    const auto& v = g->values;
    return (1 - wt) * ((1 - we) * v[i][j] + we * v[i][j + 1]) +
           wt * ((1 - we) * v[i + 1][j] + we * v[i + 1][j + 1]);
  });
  // Monotone grid values make the interpolant monotone.
  for (size_t i = 0; i < g->ages.size(); ++i) {
    for (size_t j = 0; j < g->eps.size(); ++j) {
      if (i > 0 && g->values[i][j] < g->values[i - 1][j]) {
        return absl::InvalidArgumentError(
            absl::StrFormat("table penalty decreases in t at row %d", i));
      }
      if (j > 0 && g->values[i][j] > g->values[i][j - 1]) {
        return absl::InvalidArgumentError(
            absl::StrFormat("table penalty increases in eps at column %d", j));
      }
    }
  }
  return f;
}

std::string BranchName(Branch branch) {
  return branch == Branch::kInterior ? "interior" : "boundary";
}

bool IsInfeasible(const absl::Status& status) {
  return status.code() == absl::StatusCode::kOutOfRange;
}

absl::StatusOr<double> Objective(double c, double rho, double eps_c, double age,
                                 double interval) {
  AGEDP_RETURN_IF_ERROR(CheckDecay(c, rho));
  if (eps_c < 0.0 || age < 0.0) {
    return absl::InvalidArgumentError("eps_C and A must be nonnegative");
  }
  const double x = DivergenceTerm(c, rho, eps_c, interval);
  if (!(x < 1.0)) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "divergent regime: c^2 rho^S e^eps = %g >= 1, the peak risk is unbounded", x));
  }
  if (eps_c == 0.0) return 0.0;
  const double num = std::exp(std::log(c) + age * std::log(rho)) * std::expm1(eps_c);
  return std::log1p(num / (1.0 - x));
}

absl::StatusOr<double> StationaryInterval(double c, double rho, double eps_c) {
  AGEDP_RETURN_IF_ERROR(CheckDecay(c, rho));
  return (std::log(2.0 * c * c) + eps_c) / std::log(1.0 / rho);
}

absl::StatusOr<OptimizerSolution> SolveInterior(const OptimizationProblem& problem) {
  AGEDP_RETURN_IF_ERROR(CheckProblem(problem));
  CountingPenalty f(problem.penalty);
  const Ceiling ceiling = AgeCeiling(f, problem.f_bar, problem.phi, problem.max_age);
  OptimizerSolution best;
  double best_score = kInf;
  int feasible = 0;
  if (!ceiling.empty) {
    for (int k = 1; k <= problem.K; ++k) {
      const double eps = problem.eps_bar * k / problem.K;
      const double s = StationaryInterval(problem.c, problem.rho, eps).value();
      const auto a = BisectMax([&](double age) { return f(age + s, eps); },
                               ceiling.value, problem.f_bar, problem.phi);
      if (!a.has_value()) continue;
      ++feasible;
      const double score = std::exp(*a * std::log(problem.rho)) * std::expm1(eps);
      if (score < best_score) {  // strict: ties keep the smaller eps
        best_score = score;
        best.eps_c = eps;
        best.age = *a;
        best.interval = s;
      }
    }
  }
  if (feasible == 0) {
    return Infeasible("interior",
                      ceiling.empty
                          ? absl::StrFormat("f(0, eps -> inf) exceeds f_bar = %g",
                                            problem.f_bar)
                          : absl::StrFormat("f(S_bar(eps), eps) > f_bar = %g for "
                                            "every grid budget, even with A = 0",
                                            problem.f_bar));
  }
  best.branch = Branch::kInterior;
  best.ceiling_capped = ceiling.capped;
  best.feasible_grid_points = feasible;
  best.penalty_evaluations = f.count();
  Finish(problem, best);
  return best;
}

absl::StatusOr<OptimizerSolution> SolveBoundary(const OptimizationProblem& problem) {
  AGEDP_RETURN_IF_ERROR(CheckProblem(problem));
  CountingPenalty f(problem.penalty);
  const Ceiling ceiling = AgeCeiling(f, problem.f_bar, problem.phi, problem.max_age);
  OptimizerSolution best;
  double best_score = kInf;
  int feasible = 0;
  bool any_penalty_feasible = false;
  if (!ceiling.empty) {
    for (int k = 1; k <= problem.K; ++k) {
      const double eps = problem.eps_bar * k / problem.K;
      const auto s = BisectMax([&](double interval) { return f(interval, eps); },
                               ceiling.value, problem.f_bar, problem.phi);
      if (!s.has_value()) continue;
      any_penalty_feasible = true;
      const double x = DivergenceTerm(problem.c, problem.rho, eps, *s);
      if (!(x < 1.0)) continue;
      ++feasible;
      const double score = std::expm1(eps) / (1.0 - x);
      if (score < best_score) {
        best_score = score;
        best.eps_c = eps;
        best.age = 0.0;
        best.interval = *s;
      }
    }
  }
  if (feasible == 0) {
    std::string why;
    if (ceiling.empty) {
      why = absl::StrFormat("f(0, eps -> inf) exceeds f_bar = %g", problem.f_bar);
    } else if (!any_penalty_feasible) {
      why = absl::StrFormat("f(0, eps) > f_bar = %g for every grid budget", problem.f_bar);
    } else {
      why = "every penalty-feasible interval violates c^2 rho^S e^eps < 1";
    }
    return Infeasible("boundary", why);
  }
  best.branch = Branch::kBoundary;
  best.ceiling_capped = ceiling.capped;
  best.feasible_grid_points = feasible;
  best.penalty_evaluations = f.count();
  Finish(problem, best);
  return best;
}

absl::StatusOr<OptimizerSolution> Solve(const OptimizationProblem& problem) {
  AGEDP_RETURN_IF_ERROR(CheckProblem(problem));
  const absl::StatusOr<OptimizerSolution> interior = SolveInterior(problem);
  const absl::StatusOr<OptimizerSolution> boundary = SolveBoundary(problem);
  if (!interior.ok() && !IsInfeasible(interior.status())) return interior.status();
  if (!boundary.ok() && !IsInfeasible(boundary.status())) return boundary.status();
  if (!interior.ok() && !boundary.ok()) {
    return absl::OutOfRangeError(absl::StrFormat("infeasible: %s; %s",
                                                 interior.status().message(),
                                                 boundary.status().message()));
  }
  OptimizerSolution out;
  if (!interior.ok()) {
    out = *boundary;
  } else if (!boundary.ok()) {
    out = *interior;
  } else {
    out = interior->objective < boundary->objective ? *interior : *boundary;
  }
  out.penalty_evaluations = (interior.ok() ? interior->penalty_evaluations : 0) +
                            (boundary.ok() ? boundary->penalty_evaluations : 0);
  return out;
}

namespace {

struct Choice {
  int64_t age;
  int64_t interval;
  double eps;
};

// sup_n eps(S_n) for `choices` followed by the last choice repeated forever.
double PeakOfSchedule(const std::vector<Choice>& choices, const DeltaFn& delta) {
  constexpr int kTailEpochs = 20;
  int64_t first = 0;
  for (const Choice& ch : choices) first = std::max(first, ch.age);
  std::vector<ScheduleEntry> entries;
  int64_t s = first;
  auto push = [&](const Choice& ch) {
    entries.push_back({s, ch.age, ch.eps});
    s += ch.interval;
  };
  for (const Choice& ch : choices) push(ch);
  for (int i = 0; i < kTailEpochs; ++i) push(choices.back());
  const PolicySchedule schedule = PolicySchedule::Create(entries).value();
  const RiskCurve curve =
      ComposeRiskCurve(schedule, delta, entries.back().publish_time).value();
  double peak = 0.0;
  for (double v : InEpochPeaks(schedule, curve)) peak = std::max(peak, v);
  // Limit of the peaks under the repeated tail choice.
  const Choice& last = choices.back();
  const double da = delta(last.age);
  const double ds = delta(last.interval);
  const double x = ds * std::exp(last.eps);
  if (da > 0.0 && !(x < 1.0)) return kInf;
  const double limit = da > 0.0 ? std::log1p(da * std::expm1(last.eps) / (1.0 - x)) : 0.0;
  return std::max(peak, limit);
}

}  // namespace

absl::StatusOr<OptimalityReport> VerifySimplifiedOptimality(
    double c, double rho, const PenaltyFunction& penalty, double f_bar,
    int epochs, const ScheduleGrid& grid, double slack) {
  AGEDP_ASSIGN_OR_RETURN(const GeometricDecayModel model,
                         GeometricDecayModel::Create(c, rho));
  if (epochs < 1 || epochs > 4) {
    return absl::InvalidArgumentError("verification supports 1 to 4 epochs");
  }
  if (grid.ages.empty() || grid.intervals.empty() || grid.budgets.empty()) {
    return absl::InvalidArgumentError("empty verification grid");
  }
  for (int64_t a : grid.ages) {
    if (a < 0) return absl::InvalidArgumentError("grid ages must be >= 0");
  }
  for (int64_t s : grid.intervals) {
    if (s <= 0) return absl::InvalidArgumentError("grid intervals must be > 0");
  }
  for (double e : grid.budgets) {
    if (!(e > 0.0)) return absl::InvalidArgumentError("grid budgets must be > 0");
  }
  const DeltaFn delta = DeltaFromDecay(model);

  std::vector<Choice> choices;
  for (int64_t a : grid.ages) {
    for (int64_t s : grid.intervals) {
      for (double e : grid.budgets) {
        if (penalty(static_cast<double>(a + s), e) <= f_bar) choices.push_back({a, s, e});
      }
    }
  }
  OptimalityReport report;
  report.epochs = epochs;
  report.best_uniform_peak = kInf;
  report.best_overall_peak = kInf;
  const int64_t per_epoch = static_cast<int64_t>(grid.ages.size() *
                                                 grid.intervals.size() *
                                                 grid.budgets.size());
  report.schedules_checked = 1;
  for (int n = 0; n < epochs; ++n) report.schedules_checked *= per_epoch;
  if (choices.empty()) return report;

  std::vector<size_t> idx(static_cast<size_t>(epochs), 0);
  std::vector<Choice> schedule(static_cast<size_t>(epochs));
  while (true) {
    for (int n = 0; n < epochs; ++n) schedule[n] = choices[idx[n]];
    ++report.feasible_schedules;
    const double peak = PeakOfSchedule(schedule, delta);
    if (peak < report.best_overall_peak) {
      report.best_overall_peak = peak;
      report.best_overall.clear();
      int64_t first = 0;
      for (const Choice& ch : schedule) first = std::max(first, ch.age);
      int64_t s = first;
      for (const Choice& ch : schedule) {
        report.best_overall.push_back({s, ch.age, ch.eps});
        s += ch.interval;
      }
    }
    const bool uniform = std::all_of(idx.begin(), idx.end(),
                                     [&](size_t i) { return i == idx[0]; });
    if (uniform && peak < report.best_uniform_peak) {
      report.best_uniform_peak = peak;
      report.best_uniform = {schedule[0].age, schedule[0].interval, schedule[0].eps};
    }
    int k = 0;
    while (k < epochs && ++idx[k] == choices.size()) idx[k++] = 0;
    if (k == epochs) break;
  }
  report.uniform_attains_minimum =
      report.best_uniform_peak <= report.best_overall_peak + slack ||
      (std::isinf(report.best_uniform_peak) && std::isinf(report.best_overall_peak));
  return report;
}

absl::StatusOr<NoTradeoffReport> NoTradeoffCheck(const PenaltyFunction& penalty,
                                                 double rho,
                                                 const std::vector<double>& eps_grid,
                                                 const std::vector<double>& offsets) {
  if (!(rho > 0.0 && rho < 1.0)) {
    return absl::InvalidArgumentError("rho must lie in (0, 1)");
  }
  if (eps_grid.size() < 2) return absl::InvalidArgumentError("need at least two budgets");
  std::vector<double> eps = eps_grid;
  std::sort(eps.begin(), eps.end());
  if (!(eps.front() > 0.0)) return absl::InvalidArgumentError("budgets must be > 0");
  const double log_inv_rho = std::log(1.0 / rho);
  NoTradeoffReport report;
  report.max_slope = -kInf;
  for (double a : offsets) {
    std::optional<std::pair<double, double>> prev;
    for (double e : eps) {
      const double age = (std::log(std::expm1(e)) + e) / log_inv_rho + a;
      if (age < 0.0) {
        prev.reset();
        continue;
      }
      const double g = penalty(age, e);
      if (prev.has_value()) {
        const double slope = (g - prev->second) / (e - prev->first);
        ++report.slopes_checked;
        if (slope > report.max_slope) {
          report.max_slope = slope;
          report.worst_eps = e;
          report.worst_offset = a;
        }
      }
      prev = std::make_pair(e, g);
    }
  }
  report.no_tradeoff = report.slopes_checked > 0 && report.max_slope <= 1e-9;
  return report;
}

}  // namespace agedp
