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

// Finite-state Markov chains, AR(1) processes and the total-variation and
// spectral quantities that drive age-dependent privacy guarantees.

#ifndef AGEDP_CHAIN_MODELS_H_
#define AGEDP_CHAIN_MODELS_H_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "agedp/random.h"

namespace agedp {

// Tolerance on row sums of a transition matrix.
inline constexpr double kRowSumTolerance = 1e-12;
// Detailed-balance residual below which a chain is treated as reversible.
inline constexpr double kReversibilityTolerance = 1e-9;

struct ChainState {
  std::string label;
  double value = 0.0;
};

// A time-homogeneous Markov chain on a finite ordered state space. Each state
// carries a real payload (for example the +/-1 location of a user).
class FiniteMarkovChain {
 public:
  // Validates that `transition` is square, matches `states`, has entries in
  // [0, 1] and rows summing to one within kRowSumTolerance.
  static absl::StatusOr<FiniteMarkovChain> Create(std::vector<ChainState> states,
                                                  Eigen::MatrixXd transition);

  int num_states() const { return static_cast<int>(states_.size()); }
  const std::vector<ChainState>& states() const { return states_; }
  const Eigen::MatrixXd& transition() const { return transition_; }
  std::vector<double> values() const;

  // Strong connectivity of the transition graph.
  bool IsIrreducible() const;
  // Period of state 0. Only meaningful for irreducible chains.
  int Period() const;
  bool IsAperiodic() const { return Period() == 1; }

  // OK for irreducible chains; otherwise names the states that cannot be
  // reached from, or cannot reach, the first state.
  absl::Status CheckIrreducible() const;

 private:
  FiniteMarkovChain(std::vector<ChainState> states, Eigen::MatrixXd transition)
      : states_(std::move(states)), transition_(std::move(transition)) {}

  std::vector<ChainState> states_;
  Eigen::MatrixXd transition_;
};

// Two-state chain with P = [[1-p, p], [q, 1-q]]. State 0 carries value -1 and
// state 1 carries value +1.
absl::StatusOr<FiniteMarkovChain> TwoStateChain(double p, double q);

// Solves (P^T - I) pi = 0 with a normalization row.
absl::StatusOr<Eigen::VectorXd> StationaryDistribution(
    const FiniteMarkovChain& chain);

// P^t by repeated squaring. t = 0 gives the identity.
Eigen::MatrixXd TStep(const FiniteMarkovChain& chain, int64_t t);

// P_hat_t(x, y) = pi(y) P_t(y, x) / pi(x).
absl::StatusOr<Eigen::MatrixXd> ReversedKernel(const FiniteMarkovChain& chain,
                                               int64_t t);

// Half the l1 distance between two probability vectors.
absl::StatusOr<double> TotalVariation(const Eigen::VectorXd& mu,
                                      const Eigen::VectorXd& pi);

// Largest total-variation distance between two rows of a kernel.
double MaxRowTotalVariation(const Eigen::MatrixXd& kernel);

// Delta(t): max over users and state pairs of the TV distance between rows of
// the reversed t-step kernel.
absl::StatusOr<double> MaxTvDistance(std::span<const FiniteMarkovChain> chains,
                                     int64_t t);

// Delta(0), ..., Delta(horizon), computed incrementally.
absl::StatusOr<std::vector<double>> MaxTvDistanceCurve(
    std::span<const FiniteMarkovChain> chains, int64_t horizon);

// Max detailed-balance residual |pi(x)P(x,y) - pi(y)P(y,x)|.
absl::StatusOr<double> DetailedBalanceResidual(const FiniteMarkovChain& chain);
absl::StatusOr<bool> IsReversible(const FiniteMarkovChain& chain);

// max(lambda_1, |lambda_{m-1}|) for an irreducible, aperiodic, reversible
// chain. Single-state chains give 0.
absl::StatusOr<double> SpectralLambdaStar(const FiniteMarkovChain& chain);

// max_x sqrt((1 - pi(x)) / pi(x)).
absl::StatusOr<double> SpectralPrefactor(const FiniteMarkovChain& chain);

// max over users of min{1, prefactor * lambda_star^t}.
absl::StatusOr<double> TvBoundSpectral(std::span<const FiniteMarkovChain> chains,
                                       int64_t t);

struct UndirectedGraph {
  int num_vertices = 0;
  std::vector<std::pair<int, int>> edges;
};

// 1 - 1 / (|X| d* (1 + gamma*)) for the simple random walk on a connected
// graph with max degree d* and diameter gamma*.
absl::StatusOr<double> RandomWalkSpectralBound(const UndirectedGraph& graph);

// Delta(t) = min(1, c rho^t), defined for real t >= 0.
class GeometricDecayModel {
 public:
  static absl::StatusOr<GeometricDecayModel> Create(double c, double rho);

  double c() const { return c_; }
  double rho() const { return rho_; }
  double Delta(double t) const;

 private:
  GeometricDecayModel(double c, double rho) : c_(c), rho_(rho) {}

  double c_;
  double rho_;
};

// Least-squares fit of log Delta(t) = log c + t log rho. Samples with
// Delta = 0 are dropped. A fitted c below one is replaced by the best fit
// with c pinned at one.
absl::StatusOr<GeometricDecayModel> FitGeometricDecay(
    std::span<const std::pair<double, double>> samples);

// x_{t+1} = rho x_t + e_t with e_t ~ N(0, sigma^2).
class AR1Model {
 public:
  static absl::StatusOr<AR1Model> Create(double rho, double sigma);

  double rho() const { return rho_; }
  double sigma() const { return sigma_; }
  double StationaryVariance() const;

 private:
  AR1Model(double rho, double sigma) : rho_(rho), sigma_(sigma) {}

  double rho_;
  double sigma_;
};

struct GaussianMoments {
  double mean = 0.0;
  double variance = 0.0;
};

// Law of x_t given x_0 = x0.
absl::StatusOr<GaussianMoments> Ar1Conditional(const AR1Model& model, double x0,
                                               int64_t t);

// Pinsker bound min{1, |rho|^t |x0 - x0p| / (2 sigma)}.
absl::StatusOr<double> Ar1TvBound(const AR1Model& model, double x0, double x0p,
                                  int64_t t);

// Draws from the rows of a precomputed reversed t-step kernel.
class BackwardSampler {
 public:
  static absl::StatusOr<BackwardSampler> Create(const FiniteMarkovChain& chain,
                                                int64_t t);

  int Sample(int state, Rng& rng) const;
  const Eigen::MatrixXd& kernel() const { return kernel_; }

 private:
  explicit BackwardSampler(Eigen::MatrixXd kernel) : kernel_(std::move(kernel)) {}

  Eigen::MatrixXd kernel_;
};

absl::StatusOr<int> SampleBackward(const FiniteMarkovChain& chain, int state,
                                   int64_t t, Rng& rng);

// One forward transition from `state`.
int StepForward(const FiniteMarkovChain& chain, int state, Rng& rng);

}  // namespace agedp

#endif  // AGEDP_CHAIN_MODELS_H_
