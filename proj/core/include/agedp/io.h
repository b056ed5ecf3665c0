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

// JSON and CSV formats used by the command-line tool, plus file helpers.

#ifndef AGEDP_IO_H_
#define AGEDP_IO_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "agedp/attack_sim.h"
#include "agedp/chain_models.h"
#include "agedp/guarantee_calculus.h"
#include "agedp/ingest.h"
#include "agedp/mechanisms.h"
#include "agedp/policy_optimizer.h"

namespace agedp {

absl::StatusOr<std::string> ReadFile(const std::string& path);
// Writes to a sibling temporary file and renames it over `path`, so a failed
// write never leaves a partial file behind.
absl::Status WriteFileAtomic(const std::string& path, std::string_view content);

// {"states": [{"label", "value"}], "transition": [[...]]}
absl::StatusOr<FiniteMarkovChain> ParseChainJson(std::string_view text);
std::string ChainToJson(const FiniteMarkovChain& chain);

// {"rho", "sigma"}
absl::StatusOr<AR1Model> ParseAr1Json(std::string_view text);
// {"c", "rho"}
absl::StatusOr<GeometricDecayModel> ParseDecayJson(std::string_view text);

// [{"S", "A", "eps_C"}]
absl::StatusOr<PolicySchedule> ParseScheduleJson(std::string_view text);
std::string ScheduleToJson(const PolicySchedule& schedule);

// {"c", "rho", "f_bar", "penalty": {"kind", ...}, "K", "phi", "eps_bar"}
// Penalty kinds: mse-two-state {p, q, num_users}; failure-rate {p, q,
// num_users, x0_plus_count?}; ar1-mse {rho, sigma, num_users, convention?};
// table {ages, eps, values}.
absl::StatusOr<OptimizationProblem> ParseProblemJson(std::string_view text);
std::string SolutionToJson(const OptimizationProblem& problem,
                           const OptimizerSolution& solution);

struct RunManifest {
  std::string command;
  uint64_t seed = 0;
  std::string chain_file;
  std::optional<PolicySchedule> schedule;
  std::vector<double> budgets;
  int64_t horizon = 0;
  int num_users = 0;
};
std::string ManifestToJson(const RunManifest& manifest);

std::string RiskCurveToCsv(const RiskCurve& curve);
std::string RiskCurveToJson(const RiskCurve& curve);
std::string OutputsToCsv(const std::vector<PublishedOutput>& outputs);
std::string OutputsToJson(const std::vector<PublishedOutput>& outputs);
std::string TradeoffToCsv(const std::vector<TradeoffPoint>& points);
std::string TradeoffToJson(const std::vector<TradeoffPoint>& points);

struct IngestedChain {
  std::string user_id;
  EstimatedChain estimate;
};
std::string IngestToJson(const Quantization& quantization,
                         const std::vector<IngestedChain>& chains);
std::string AnalyzeToJson(const AnalyzeReport& report);
// Long format: user-independent curves keyed by eps_C and t.
std::string AnalyzeToCsv(const AnalyzeReport& report);

// Shortest round-trip decimal, "inf" / "-inf" / "nan" for non-finite values.
std::string FormatDouble(double value);

}  // namespace agedp

#endif  // AGEDP_IO_H_
