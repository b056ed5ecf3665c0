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

#include "agedp/chain_models.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "agedp/status_macros.h"

namespace agedp {
namespace {

constexpr double kPositive = 0.0;

// Clips entries into [0, 1] and renormalizes rows whose sum drifted.
void Sanitize(Eigen::MatrixXd& m) {
  m = m.cwiseMax(0.0).cwiseMin(1.0);
  for (int i = 0; i < m.rows(); ++i) {
    const double sum = m.row(i).sum();
    if (std::abs(sum - 1.0) > kRowSumTolerance && sum > 0.0) m.row(i) /= sum;
  }
}

std::vector<int> Reachable(const Eigen::MatrixXd& p, int source, bool forward) {
  const int m = static_cast<int>(p.rows());
  std::vector<int> level(m, -1);
  std::deque<int> queue = {source};
  level[source] = 0;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int v = 0; v < m; ++v) {
      const double w = forward ? p(u, v) : p(v, u);
      if (w > kPositive && level[v] < 0) {
        level[v] = level[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return level;
}

absl::Status RequireSpectralPreconditions(const FiniteMarkovChain& chain) {
  AGEDP_RETURN_IF_ERROR(chain.CheckIrreducible());
  if (!chain.IsAperiodic()) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "chain is periodic with period %d; spectral bounds need aperiodicity",
        chain.Period()));
  }
  AGEDP_ASSIGN_OR_RETURN(const double residual, DetailedBalanceResidual(chain));
  if (residual >= kReversibilityTolerance) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "chain is not reversible (detailed-balance residual %g); spectral "
        "quantities need a real spectrum",
        residual));
  }
  return absl::OkStatus();
}

Eigen::MatrixXd Reverse(const Eigen::MatrixXd& pt, const Eigen::VectorXd& pi) {
  const int m = static_cast<int>(pt.rows());
  Eigen::MatrixXd r(m, m);
  for (int x = 0; x < m; ++x) {
    for (int y = 0; y < m; ++y) r(x, y) = pi(y) * pt(y, x) / pi(x);
  }
  Sanitize(r);
  return r;
}

absl::StatusOr<Eigen::VectorXd> PositiveStationary(const FiniteMarkovChain& chain) {
  AGEDP_ASSIGN_OR_RETURN(Eigen::VectorXd pi, StationaryDistribution(chain));
  for (int x = 0; x < pi.size(); ++x) {
    if (!(pi(x) > 0.0)) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "state '%s' has zero stationary mass; the reversed kernel is "
          "undefined",
          chain.states()[x].label));
    }
  }
  return pi;
}

}  // namespace

absl::StatusOr<FiniteMarkovChain> FiniteMarkovChain::Create(
    std::vector<ChainState> states, Eigen::MatrixXd transition) {
  const auto m = static_cast<Eigen::Index>(states.size());
  if (m == 0) return absl::InvalidArgumentError("chain needs at least one state");
  if (transition.rows() != m || transition.cols() != m) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "transition matrix is %dx%d but there are %d states", transition.rows(),
        transition.cols(), m));
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double v = transition(i, j);
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "transition(%d, %d) = %g is outside [0, 1]", i, j, v));
      }
    }
    const double sum = transition.row(i).sum();
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "row %d of the transition matrix sums to %.17g, not 1", i, sum));
    }
  }
  return FiniteMarkovChain(std::move(states), std::move(transition));
}

std::vector<double> FiniteMarkovChain::values() const {
  std::vector<double> out;
  out.reserve(states_.size());
  for (const ChainState& s : states_) out.push_back(s.value);
  return out;
}

absl::Status FiniteMarkovChain::CheckIrreducible() const {
  const std::vector<int> fwd = Reachable(transition_, 0, true);
  const std::vector<int> bwd = Reachable(transition_, 0, false);
  std::vector<std::string> unreachable, trapped;
  for (int x = 0; x < num_states(); ++x) {
    if (fwd[x] < 0) unreachable.push_back(states_[x].label);
    if (bwd[x] < 0) trapped.push_back(states_[x].label);
  }
  if (unreachable.empty() && trapped.empty()) return absl::OkStatus();
  std::string msg = "chain is reducible:";
  if (!unreachable.empty()) {
    absl::StrAppend(&msg, " states {", absl::StrJoin(unreachable, ", "),
                    "} are unreachable from '", states_[0].label, "'");
  }
  if (!trapped.empty()) {
    absl::StrAppend(&msg, unreachable.empty() ? "" : ";", " states {",
                    absl::StrJoin(trapped, ", "), "} cannot reach '",
                    states_[0].label, "'");
  }
  return absl::FailedPreconditionError(msg);
}

bool FiniteMarkovChain::IsIrreducible() const { return CheckIrreducible().ok(); }

int FiniteMarkovChain::Period() const {
  const std::vector<int> level = Reachable(transition_, 0, true);
  int g = 0;
  for (int u = 0; u < num_states(); ++u) {
    if (level[u] < 0) continue;
    for (int v = 0; v < num_states(); ++v) {
      if (transition_(u, v) > kPositive && level[v] >= 0) {
        g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
      }
    }
  }
  return g == 0 ? 1 : g;
}

absl::StatusOr<FiniteMarkovChain> TwoStateChain(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("two-state probabilities must lie in [0, 1], got p=%g q=%g", p, q));
  }
  Eigen::MatrixXd m(2, 2);
  m << 1.0 - p, p, q, 1.0 - q;
  return FiniteMarkovChain::Create({{"-1", -1.0}, {"+1", 1.0}}, std::move(m));
}

absl::StatusOr<Eigen::VectorXd> StationaryDistribution(
    const FiniteMarkovChain& chain) {
  AGEDP_RETURN_IF_ERROR(chain.CheckIrreducible());
  const int m = chain.num_states();
  Eigen::MatrixXd a =
      chain.transition().transpose() - Eigen::MatrixXd::Identity(m, m);
  a.row(m - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  b(m - 1) = 1.0;
  Eigen::VectorXd pi = a.fullPivLu().solve(b);
  pi = pi.cwiseMax(0.0);
  pi /= pi.sum();
  return pi;
}

Eigen::MatrixXd TStep(const FiniteMarkovChain& chain, int64_t t) {
  const int m = chain.num_states();
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(m, m);
  Eigen::MatrixXd base = chain.transition();
  while (t > 0) {
    if (t & 1) {
      result = result * base;
      Sanitize(result);
    }
    t >>= 1;
    if (t > 0) {
      base = base * base;
      Sanitize(base);
    }
  }
  return result;
}

absl::StatusOr<Eigen::MatrixXd> ReversedKernel(const FiniteMarkovChain& chain,
                                               int64_t t) {
  if (t < 0) return absl::InvalidArgumentError("step count must be nonnegative");
  AGEDP_ASSIGN_OR_RETURN(const Eigen::VectorXd pi, PositiveStationary(chain));
  return Reverse(TStep(chain, t), pi);
}

absl::StatusOr<double> TotalVariation(const Eigen::VectorXd& mu,
                                      const Eigen::VectorXd& pi) {
  if (mu.size() != pi.size()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "dimension mismatch: %d vs %d", mu.size(), pi.size()));
  }
  return std::min(1.0, 0.5 * (mu - pi).cwiseAbs().sum());
}

double MaxRowTotalVariation(const Eigen::MatrixXd& kernel) {
  double best = 0.0;
  for (Eigen::Index x = 0; x < kernel.rows(); ++x) {
    for (Eigen::Index y = x + 1; y < kernel.rows(); ++y) {
      best = std::max(best, 0.5 * (kernel.row(x) - kernel.row(y)).cwiseAbs().sum());
    }
  }
  return std::min(1.0, best);
}

absl::StatusOr<double> MaxTvDistance(std::span<const FiniteMarkovChain> chains,
                                     int64_t t) {
  if (t < 0) return absl::InvalidArgumentError("step count must be nonnegative");
  double best = 0.0;
  for (const FiniteMarkovChain& chain : chains) {
    AGEDP_ASSIGN_OR_RETURN(const Eigen::MatrixXd r, ReversedKernel(chain, t));
    best = std::max(best, MaxRowTotalVariation(r));
  }
  return best;
}

absl::StatusOr<std::vector<double>> MaxTvDistanceCurve(
    std::span<const FiniteMarkovChain> chains, int64_t horizon) {
  if (horizon < 0) return absl::InvalidArgumentError("horizon must be nonnegative");
  std::vector<double> curve(static_cast<size_t>(horizon) + 1, 0.0);
  for (const FiniteMarkovChain& chain : chains) {
    AGEDP_ASSIGN_OR_RETURN(const Eigen::VectorXd pi, PositiveStationary(chain));
    const int m = chain.num_states();
    Eigen::MatrixXd pt = Eigen::MatrixXd::Identity(m, m);
    for (int64_t t = 0; t <= horizon; ++t) {
      if (t > 0) {
        pt = pt * chain.transition();
        Sanitize(pt);
      }
      curve[t] = std::max(curve[t], MaxRowTotalVariation(Reverse(pt, pi)));
    }
  }
  return curve;
}

absl::StatusOr<double> DetailedBalanceResidual(const FiniteMarkovChain& chain) {
  AGEDP_ASSIGN_OR_RETURN(const Eigen::VectorXd pi, StationaryDistribution(chain));
  const Eigen::MatrixXd& p = chain.transition();
  double worst = 0.0;
  for (int x = 0; x < chain.num_states(); ++x) {
    for (int y = x + 1; y < chain.num_states(); ++y) {
      worst = std::max(worst, std::abs(pi(x) * p(x, y) - pi(y) * p(y, x)));
    }
  }
  return worst;
}

absl::StatusOr<bool> IsReversible(const FiniteMarkovChain& chain) {
  AGEDP_ASSIGN_OR_RETURN(const double residual, DetailedBalanceResidual(chain));
  return residual < kReversibilityTolerance;
}

absl::StatusOr<double> SpectralLambdaStar(const FiniteMarkovChain& chain) {
  AGEDP_RETURN_IF_ERROR(RequireSpectralPreconditions(chain));
  const int m = chain.num_states();
  if (m == 1) return 0.0;
  AGEDP_ASSIGN_OR_RETURN(const Eigen::VectorXd pi, PositiveStationary(chain));
  const Eigen::VectorXd sq = pi.cwiseSqrt();
  Eigen::MatrixXd s = sq.asDiagonal() * chain.transition() *
                      sq.cwiseInverse().asDiagonal();
  s = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    return absl::InternalError("eigen-decomposition did not converge");
  }
  // Ascending order; the last eigenvalue is the trivial 1.
  const Eigen::VectorXd& ev = solver.eigenvalues();
  const double lambda1 = ev(m - 2);
  const double lambda_min = ev(0);
  return std::clamp(std::max(lambda1, std::abs(lambda_min)), 0.0, 1.0);
}

absl::StatusOr<double> SpectralPrefactor(const FiniteMarkovChain& chain) {
  AGEDP_ASSIGN_OR_RETURN(const Eigen::VectorXd pi, PositiveStationary(chain));
  double best = 0.0;
  for (int x = 0; x < pi.size(); ++x) {
    best = std::max(best, std::sqrt((1.0 - pi(x)) / pi(x)));
  }
  return best;
}

absl::StatusOr<double> TvBoundSpectral(std::span<const FiniteMarkovChain> chains,
                                       int64_t t) {
  if (t < 0) return absl::InvalidArgumentError("step count must be nonnegative");
  double best = 0.0;
  for (const FiniteMarkovChain& chain : chains) {
    AGEDP_ASSIGN_OR_RETURN(const double lambda, SpectralLambdaStar(chain));
    AGEDP_ASSIGN_OR_RETURN(const double prefactor, SpectralPrefactor(chain));
    const double decay = t == 0 ? 1.0 : std::pow(lambda, static_cast<double>(t));
    best = std::max(best, std::min(1.0, prefactor * decay));
  }
  return best;
}

absl::StatusOr<double> RandomWalkSpectralBound(const UndirectedGraph& graph) {
  const int n = graph.num_vertices;
  if (n < 2) return absl::InvalidArgumentError("graph needs at least two vertices");
  std::vector<std::vector<int>> adj(n);
  for (const auto& [u, v] : graph.edges) {
    if (u < 0 || v < 0 || u >= n || v >= n) {
      return absl::InvalidArgumentError(
          absl::StrFormat("edge (%d, %d) references a missing vertex", u, v));
    }
    if (u == v) continue;
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  int max_degree = 0;
  for (auto& nbrs : adj) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    max_degree = std::max(max_degree, static_cast<int>(nbrs.size()));
  }
  int diameter = 0;
  for (int s = 0; s < n; ++s) {
    std::vector<int> dist(n, -1);
    std::deque<int> queue = {s};
    dist[s] = 0;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int v : adj[u]) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          queue.push_back(v);
        }
      }
    }
    for (int v = 0; v < n; ++v) {
      if (dist[v] < 0) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "graph is disconnected: vertex %d is unreachable from vertex %d", v, s));
      }
      diameter = std::max(diameter, dist[v]);
    }
  }
  return 1.0 - 1.0 / (static_cast<double>(n) * max_degree * (1.0 + diameter));
}

absl::StatusOr<GeometricDecayModel> GeometricDecayModel::Create(double c,
                                                                double rho) {
  if (!(c >= 1.0) || !std::isfinite(c)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("decay coefficient c must be finite and >= 1, got %g", c));
  }
  if (!(rho > 0.0 && rho < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("decay rate rho must lie in (0, 1), got %g", rho));
  }
  return GeometricDecayModel(c, rho);
}

double GeometricDecayModel::Delta(double t) const {
  if (t <= 0.0) return 1.0;
  // Evaluated in log space so huge ages underflow cleanly to zero.
  return std::min(1.0, std::exp(std::log(c_) + t * std::log(rho_)));
}

absl::StatusOr<GeometricDecayModel> FitGeometricDecay(
    std::span<const std::pair<double, double>> samples) {
  std::vector<std::pair<double, double>> usable;
  for (const auto& [t, delta] : samples) {
    if (delta > 1.0 || delta < 0.0 || !std::isfinite(t)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("sample (%g, %g) is outside the valid range", t, delta));
    }
    if (delta > 0.0) usable.emplace_back(t, std::log(delta));
  }
  if (usable.size() < 2) {
    return absl::InvalidArgumentError(
        "need at least two samples with positive Delta to fit a decay model");
  }
  const double n = static_cast<double>(usable.size());
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (const auto& [t, y] : usable) {
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  const double denom = n * stt - st * st;
  if (!(std::abs(denom) > 0.0)) {
    return absl::InvalidArgumentError("samples need at least two distinct ages");
  }
  double slope = (n * sty - st * sy) / denom;
  double intercept = (sy - slope * st) / n;
  if (intercept < 0.0) {
    // Best fit through log c = 0.
    if (!(stt > 0.0)) return absl::InvalidArgumentError("degenerate ages");
    intercept = 0.0;
    slope = sty / stt;
  }
  const double rho = std::exp(slope);
  if (!(rho > 0.0 && rho < 1.0)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "fitted decay rate %g is not in (0, 1); Delta does not decay", rho));
  }
  return GeometricDecayModel::Create(std::exp(intercept), rho);
}

absl::StatusOr<AR1Model> AR1Model::Create(double rho, double sigma) {
  if (!(std::abs(rho) < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("AR(1) coefficient must satisfy |rho| < 1, got %g", rho));
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("innovation sigma must be positive, got %g", sigma));
  }
  return AR1Model(rho, sigma);
}

double AR1Model::StationaryVariance() const {
  return sigma_ * sigma_ / (1.0 - rho_ * rho_);
}

absl::StatusOr<GaussianMoments> Ar1Conditional(const AR1Model& model, double x0,
                                               int64_t t) {
  if (t < 1) return absl::InvalidArgumentError("AR(1) conditional needs t >= 1");
  const double td = static_cast<double>(t);
  const double rho_t = std::pow(model.rho(), td);
  const double rho_2t = std::pow(model.rho() * model.rho(), td);
  return GaussianMoments{rho_t * x0, (1.0 - rho_2t) * model.StationaryVariance()};
}

absl::StatusOr<double> Ar1TvBound(const AR1Model& model, double x0, double x0p,
                                  int64_t t) {
  if (t < 1) return absl::InvalidArgumentError("AR(1) TV bound needs t >= 1");
  const double decay = std::pow(std::abs(model.rho()), static_cast<double>(t));
  return std::min(1.0, decay * std::abs(x0 - x0p) / (2.0 * model.sigma()));
}

absl::StatusOr<BackwardSampler> BackwardSampler::Create(
    const FiniteMarkovChain& chain, int64_t t) {
  AGEDP_ASSIGN_OR_RETURN(Eigen::MatrixXd kernel, ReversedKernel(chain, t));
  return BackwardSampler(std::move(kernel));
}

int BackwardSampler::Sample(int state, Rng& rng) const {
  const Eigen::VectorXd row = kernel_.row(state).transpose();
  return rng.Categorical(std::span<const double>(row.data(), row.size()));
}

absl::StatusOr<int> SampleBackward(const FiniteMarkovChain& chain, int state,
                                   int64_t t, Rng& rng) {
  if (state < 0 || state >= chain.num_states()) {
    return absl::InvalidArgumentError(absl::StrFormat("state %d out of range", state));
  }
  if (t == 0) return state;
  AGEDP_ASSIGN_OR_RETURN(const BackwardSampler sampler,
                         BackwardSampler::Create(chain, t));
  return sampler.Sample(state, rng);
}

int StepForward(const FiniteMarkovChain& chain, int state, Rng& rng) {
  const Eigen::VectorXd row = chain.transition().row(state).transpose();
  return rng.Categorical(std::span<const double>(row.data(), row.size()));
}

}  // namespace agedp
