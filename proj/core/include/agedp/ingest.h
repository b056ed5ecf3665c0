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

// Time-series ingestion: CSV readings to quantized state sequences to
// empirical Markov chains, and the end-to-end risk analysis built on them.

#ifndef AGEDP_INGEST_H_
#define AGEDP_INGEST_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "agedp/attack_sim.h"
#include "agedp/chain_models.h"
#include "agedp/random.h"

namespace agedp {

struct SeriesBundle {
  std::vector<std::string> user_ids;
  // series[i][s] is user i's reading at slot s.
  std::vector<std::vector<double>> series;
  double slot_seconds = 1800.0;
};

// Parses `user_id,slot_index,value` rows (header required). Every user must
// cover slots 0..n-1 exactly once; gaps and duplicates are rejected.
absl::StatusOr<SeriesBundle> ParseSeriesCsv(std::string_view text,
                                            double slot_seconds = 1800.0);

struct QuantizationSpec {
  enum class Mode { kEdges, kEqualWidth, kEqualFrequency };

  Mode mode = Mode::kEqualFrequency;
  int bins = 12;
  // Interior boundaries for kEdges; bins = edges.size() + 1.
  std::vector<double> edges;

  static QuantizationSpec Edges(std::vector<double> edges);
  static QuantizationSpec EqualWidth(int bins);
  static QuantizationSpec EqualFrequency(int bins);

  absl::Status Validate() const;
};

absl::StatusOr<QuantizationSpec::Mode> ParseQuantizationMode(std::string_view name);

struct Quantization {
  int num_bins = 0;
  std::vector<double> edges;            // interior boundaries
  std::vector<double> representatives;  // mean reading per bin
  std::vector<std::vector<int>> sequences;
};

// Bins are [edge_{k-1}, edge_k); edges are computed from the pooled readings
// of all users.
absl::StatusOr<Quantization> Quantize(const SeriesBundle& bundle,
                                      const QuantizationSpec& spec);

struct EstimatedChain {
  FiniteMarkovChain chain;
  bool irreducible = false;
  bool aperiodic = false;
  bool reversible = false;
  // States without observed transitions that became self-loops.
  std::vector<int> unobserved_rows;
  bool reversibilized = false;
};

// Row-normalized transition counts plus `smoothing` pseudo-counts per cell.
// With `reversibilize`, replaces P by (P + P_hat) / 2.
absl::StatusOr<EstimatedChain> EstimateChain(std::span<const int> sequence,
                                             std::vector<double> state_values,
                                             double smoothing = 1.0,
                                             bool reversibilize = false);

// (P + P_hat) / 2 with P_hat the one-step time reversal.
absl::StatusOr<FiniteMarkovChain> Reversibilize(const FiniteMarkovChain& chain);

// A path of `length` states from a stationary start.
absl::StatusOr<std::vector<int>> SimulatePath(const FiniteMarkovChain& chain,
                                              int64_t length, Rng& rng);

struct SyntheticOptions {
  int num_users = 40;
  int64_t length = 2000;
  int num_states = 4;
  uint64_t seed = kDefaultSeed;
  // Weight added to the diagonal of the symmetric weight matrix; larger
  // values give slower mixing.
  double laziness = 2.0;
};

struct SyntheticData {
  SeriesBundle bundle;
  std::vector<FiniteMarkovChain> chains;  // the generating chains
  std::vector<double> levels;             // reading emitted in each state
};

// Random reversible chains P = D^-1 W from symmetric positive weights W, one
// per user, sharing a common set of reading levels.
absl::StatusOr<SyntheticData> GenerateSyntheticBundle(const SyntheticOptions& options);

struct AnalyzeOptions {
  QuantizationSpec quantization;
  std::vector<double> eps_list = {0.5, 1.0, 2.0};
  int64_t horizon = 48;
  double smoothing = 1.0;
  bool reversibilize = false;
  int64_t mse_samples = 20'000;
  uint64_t seed = kDefaultSeed;
};

struct UserSpectrum {
  std::string user_id;
  double lambda_star = 0.0;
  double prefactor = 0.0;
  bool reversible = false;
};

struct AnalyzeReport {
  int num_states = 0;
  bool reversibilized = false;
  std::vector<UserSpectrum> users;
  // delta_bar[t] = min{1, max_i prefactor_i lambda_i^t}.
  std::vector<double> delta_bar;
  std::vector<double> eps_list;
  // risk[e][t] for eps_list[e].
  std::vector<std::vector<double>> risk;
  // mse[e][t]: Monte Carlo loss of the released mean at age t.
  std::vector<std::vector<Estimate>> mse;
  std::vector<TradeoffPoint> combined;
  std::vector<TradeoffPoint> noise_only;
  std::vector<TradeoffPoint> frontier;
};

// Quantize, estimate per-user chains, bound Delta through each chain's
// spectrum, and tabulate risk and loss. Non-reversible estimates are an
// error unless `reversibilize` is set.
absl::StatusOr<AnalyzeReport> AnalyzePipeline(const SeriesBundle& bundle,
                                              const AnalyzeOptions& options);

// Exact E[(mean(X_0) - mean(X_t))^2] for independent stationary users; the
// Laplace noise variance is added separately.
absl::StatusOr<double> ExactAgingMse(std::span<const FiniteMarkovChain> chains,
                                     int64_t t);

}  // namespace agedp

#endif  // AGEDP_INGEST_H_
