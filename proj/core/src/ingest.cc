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

#include "agedp/ingest.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "agedp/guarantee_calculus.h"
#include "agedp/status_macros.h"

namespace agedp {
namespace {

absl::Status LineError(int line, std::string_view what) {
  return absl::InvalidArgumentError(absl::StrFormat("line %d: %s", line, std::string(what)));
}

}  // namespace

absl::StatusOr<SeriesBundle> ParseSeriesCsv(std::string_view text,
                                            double slot_seconds) {
  if (!(slot_seconds > 0.0)) {
    return absl::InvalidArgumentError("slot duration must be positive");
  }
  std::vector<absl::string_view> lines = absl::StrSplit(absl::string_view(text.data(), text.size()), '\n');
  int header_line = 0;
  int col_user = -1, col_slot = -1, col_value = -1;
  size_t i = 0;
  for (; i < lines.size(); ++i) {
    const absl::string_view line = absl::StripAsciiWhitespace(lines[i]);
    if (line.empty()) continue;
    header_line = static_cast<int>(i) + 1;
    std::vector<absl::string_view> cols = absl::StrSplit(line, ',');
    for (size_t c = 0; c < cols.size(); ++c) {
      const absl::string_view name = absl::StripAsciiWhitespace(cols[c]);
      if (name == "user_id") col_user = static_cast<int>(c);
      if (name == "slot_index") col_slot = static_cast<int>(c);
      if (name == "value") col_value = static_cast<int>(c);
    }
    break;
  }
  if (header_line == 0) return absl::InvalidArgumentError("CSV input is empty");
  if (col_user < 0 || col_slot < 0 || col_value < 0) {
    return LineError(header_line,
                     "header must name the columns user_id, slot_index, value");
  }
  const size_t needed = static_cast<size_t>(std::max({col_user, col_slot, col_value})) + 1;

  SeriesBundle bundle;
  bundle.slot_seconds = slot_seconds;
  std::unordered_map<std::string, size_t> user_index;
  std::vector<std::map<int64_t, std::pair<double, int>>> readings;
  for (++i; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    const absl::string_view line = absl::StripAsciiWhitespace(lines[i]);
    if (line.empty()) continue;
    std::vector<absl::string_view> cols = absl::StrSplit(line, ',');
    if (cols.size() < needed) {
      return LineError(line_no, absl::StrFormat("expected at least %d fields, got %d",
                                                needed, cols.size()));
    }
    const std::string user(absl::StripAsciiWhitespace(cols[col_user]));
    if (user.empty()) return LineError(line_no, "empty user_id");
    int64_t slot;
    if (!absl::SimpleAtoi(absl::StripAsciiWhitespace(cols[col_slot]), &slot) || slot < 0) {
      return LineError(line_no, absl::StrFormat("slot_index '%s' is not a nonnegative integer",
                                                std::string(cols[col_slot])));
    }
    double value;
    if (!absl::SimpleAtod(absl::StripAsciiWhitespace(cols[col_value]), &value) ||
        !std::isfinite(value)) {
      return LineError(line_no, absl::StrFormat("value '%s' is not a finite number",
                                                std::string(cols[col_value])));
    }
    auto [it, inserted] = user_index.emplace(user, bundle.user_ids.size());
    if (inserted) {
      bundle.user_ids.push_back(user);
      readings.emplace_back();
    }
    auto& series = readings[it->second];
    auto [slot_it, fresh] = series.emplace(slot, std::make_pair(value, line_no));
    if (!fresh) {
      return LineError(line_no, absl::StrFormat(
                                    "duplicate slot %d for user '%s' (first seen on line %d)",
                                    slot, user, slot_it->second.second));
    }
  }
  if (bundle.user_ids.empty()) return absl::InvalidArgumentError("CSV has no data rows");
  for (size_t u = 0; u < readings.size(); ++u) {
    std::vector<double> values;
    values.reserve(readings[u].size());
    int64_t expected = 0;
    for (const auto& [slot, entry] : readings[u]) {
      if (slot != expected) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "user '%s' is missing slot %d (next reading is slot %d on line %d); "
            "gaps are not imputed",
            bundle.user_ids[u], expected, slot, entry.second));
      }
      values.push_back(entry.first);
      ++expected;
    }
    bundle.series.push_back(std::move(values));
  }
  return bundle;
}

QuantizationSpec QuantizationSpec::Edges(std::vector<double> edges) {
  QuantizationSpec s;
  s.mode = Mode::kEdges;
  s.bins = static_cast<int>(edges.size()) + 1;
  s.edges = std::move(edges);
  return s;
}

QuantizationSpec QuantizationSpec::EqualWidth(int bins) {
  QuantizationSpec s;
  s.mode = Mode::kEqualWidth;
  s.bins = bins;
  return s;
}

QuantizationSpec QuantizationSpec::EqualFrequency(int bins) {
  QuantizationSpec s;
  s.mode = Mode::kEqualFrequency;
  s.bins = bins;
  return s;
}

absl::Status QuantizationSpec::Validate() const {
  if (mode == Mode::kEdges) {
    if (edges.empty()) return absl::InvalidArgumentError("need at least one bin edge");
    for (size_t i = 1; i < edges.size(); ++i) {
      if (!(edges[i] > edges[i - 1])) {
        return absl::InvalidArgumentError("bin edges must be strictly increasing");
      }
    }
    return absl::OkStatus();
  }
  if (bins < 2) return absl::InvalidArgumentError("need at least two bins");
  return absl::OkStatus();
}

absl::StatusOr<QuantizationSpec::Mode> ParseQuantizationMode(std::string_view name) {
  if (name == "edges") return QuantizationSpec::Mode::kEdges;
  if (name == "equal-width") return QuantizationSpec::Mode::kEqualWidth;
  if (name == "equal-frequency") return QuantizationSpec::Mode::kEqualFrequency;
  return absl::InvalidArgumentError(absl::StrFormat(
      "unknown quantization mode '%s' (expected edges, equal-width or "
      "equal-frequency)",
      std::string(name)));
}

absl::StatusOr<Quantization> Quantize(const SeriesBundle& bundle,
                                      const QuantizationSpec& spec) {
  AGEDP_RETURN_IF_ERROR(spec.Validate());
  std::vector<double> pooled;
  for (size_t u = 0; u < bundle.series.size(); ++u) {
    if (bundle.series[u].empty()) {
      return absl::InvalidArgumentError(
          absl::StrFormat("series for user %d is empty", u));
    }
    pooled.insert(pooled.end(), bundle.series[u].begin(), bundle.series[u].end());
  }
  if (pooled.empty()) return absl::InvalidArgumentError("no readings to quantize");
  std::sort(pooled.begin(), pooled.end());

  Quantization q;
  switch (spec.mode) {
    case QuantizationSpec::Mode::kEdges:
      q.edges = spec.edges;
      break;
    case QuantizationSpec::Mode::kEqualWidth: {
      const double lo = pooled.front(), hi = pooled.back();
      if (!(hi > lo)) {
        return absl::InvalidArgumentError(
            "all readings are equal; equal-width bins need a nonzero range");
      }
      for (int k = 1; k < spec.bins; ++k) q.edges.push_back(lo + (hi - lo) * k / spec.bins);
      break;
    }
    case QuantizationSpec::Mode::kEqualFrequency: {
      const size_t n = pooled.size();
      if (n < static_cast<size_t>(spec.bins)) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "%d readings cannot fill %d equal-frequency bins", n, spec.bins));
      }
      if (pooled.front() == pooled.back()) {
        return absl::InvalidArgumentError(
            "readings are constant; use equal-width bins or explicit edges");
      }
      for (int k = 1; k < spec.bins; ++k) {
        const size_t cut = k * n / spec.bins;
        const double edge = 0.5 * (pooled[cut - 1] + pooled[cut]);
        if (!q.edges.empty() && !(edge > q.edges.back())) {
          return absl::InvalidArgumentError(
              "readings are too heavily tied for equal-frequency bins; use "
              "equal-width bins or explicit edges");
        }
        q.edges.push_back(edge);
      }
      break;
    }
  }
  q.num_bins = static_cast<int>(q.edges.size()) + 1;
  std::vector<double> sums(q.num_bins, 0.0);
  std::vector<int64_t> counts(q.num_bins, 0);
  for (const auto& series : bundle.series) {
    std::vector<int> states(series.size());
    for (size_t s = 0; s < series.size(); ++s) {
      const int bin = static_cast<int>(
          std::upper_bound(q.edges.begin(), q.edges.end(), series[s]) - q.edges.begin());
      states[s] = bin;
      sums[bin] += series[s];
      ++counts[bin];
    }
    q.sequences.push_back(std::move(states));
  }
  q.representatives.resize(q.num_bins);
  for (int k = 0; k < q.num_bins; ++k) {
    if (counts[k] > 0) {
      q.representatives[k] = sums[k] / counts[k];
    } else if (k == 0) {
      q.representatives[k] = q.edges.front();
    } else if (k == q.num_bins - 1) {
      q.representatives[k] = q.edges.back();
    } else {
      q.representatives[k] = 0.5 * (q.edges[k - 1] + q.edges[k]);
    }
  }
  return q;
}

absl::StatusOr<FiniteMarkovChain> Reversibilize(const FiniteMarkovChain& chain) {
  AGEDP_ASSIGN_OR_RETURN(const Eigen::MatrixXd reversed, ReversedKernel(chain, 1));
  Eigen::MatrixXd p = 0.5 * (chain.transition() + reversed);
  for (int i = 0; i < p.rows(); ++i) p.row(i) /= p.row(i).sum();
  return FiniteMarkovChain::Create(chain.states(), std::move(p));
}

absl::StatusOr<EstimatedChain> EstimateChain(std::span<const int> sequence,
                                             std::vector<double> state_values,
                                             double smoothing, bool reversibilize) {
  const int m = static_cast<int>(state_values.size());
  if (sequence.empty()) return absl::InvalidArgumentError("empty state sequence");
  if (sequence.size() < 2) {
    return absl::InvalidArgumentError("need at least two observations to count transitions");
  }
  if (m < 1) return absl::InvalidArgumentError("need at least one state");
  if (!(smoothing >= 0.0)) return absl::InvalidArgumentError("smoothing must be >= 0");
  Eigen::MatrixXd counts = Eigen::MatrixXd::Constant(m, m, smoothing);
  for (size_t s = 0; s < sequence.size(); ++s) {
    if (sequence[s] < 0 || sequence[s] >= m) {
      return absl::InvalidArgumentError(
          absl::StrFormat("state %d at position %d is out of range", sequence[s], s));
    }
    if (s > 0) counts(sequence[s - 1], sequence[s]) += 1.0;
  }
  std::vector<int> unobserved;
  for (int x = 0; x < m; ++x) {
    const double total = counts.row(x).sum();
    if (total > 0.0) {
      counts.row(x) /= total;
    } else {
      counts.row(x).setZero();
      counts(x, x) = 1.0;
      unobserved.push_back(x);
    }
  }
  std::vector<ChainState> states;
  for (int x = 0; x < m; ++x) {
    states.push_back({absl::StrFormat("s%d", x), state_values[x]});
  }
  AGEDP_ASSIGN_OR_RETURN(FiniteMarkovChain chain,
                         FiniteMarkovChain::Create(std::move(states), std::move(counts)));
  const bool irreducible = chain.IsIrreducible();
  if (reversibilize) {
    if (!irreducible) {
      return absl::FailedPreconditionError(
          "cannot reversibilize a reducible estimate; increase smoothing");
    }
    AGEDP_ASSIGN_OR_RETURN(chain, Reversibilize(chain));
  }
  EstimatedChain out{std::move(chain), false, false, false, {}, false};
  out.irreducible = out.chain.IsIrreducible();
  out.aperiodic = out.irreducible && out.chain.IsAperiodic();
  out.reversible = out.irreducible && IsReversible(out.chain).value_or(false);
  out.unobserved_rows = std::move(unobserved);
  out.reversibilized = reversibilize;
  return out;
}

absl::StatusOr<std::vector<int>> SimulatePath(const FiniteMarkovChain& chain,
                                              int64_t length, Rng& rng) {
  if (length < 1) return absl::InvalidArgumentError("path length must be positive");
  AGEDP_ASSIGN_OR_RETURN(const Eigen::VectorXd pi, StationaryDistribution(chain));
  std::vector<int> path(static_cast<size_t>(length));
  path[0] = rng.Categorical(std::span<const double>(pi.data(), pi.size()));
  for (int64_t s = 1; s < length; ++s) path[s] = StepForward(chain, path[s - 1], rng);
  return path;
}

absl::StatusOr<SyntheticData> GenerateSyntheticBundle(const SyntheticOptions& o) {
  if (o.num_users < 1 || o.length < 2 || o.num_states < 2) {
    return absl::InvalidArgumentError(
        "synthetic data needs >= 1 user, >= 2 slots and >= 2 states");
  }
  if (!(o.laziness >= 0.0)) return absl::InvalidArgumentError("laziness must be >= 0");
  const int m = o.num_states;
  Rng root(o.seed);
  SyntheticData data;
  for (int k = 0; k < m; ++k) data.levels.push_back(0.25 + 0.5 * k);
  std::vector<ChainState> states;
  for (int k = 0; k < m; ++k) states.push_back({absl::StrFormat("level%d", k), data.levels[k]});
  for (int u = 0; u < o.num_users; ++u) {
    Rng rng = root.Split(static_cast<uint64_t>(u));
    Eigen::MatrixXd w(m, m);
    for (int x = 0; x < m; ++x) {
      for (int y = x; y < m; ++y) w(x, y) = w(y, x) = 0.1 + rng.Uniform();
      w(x, x) += o.laziness * rng.Uniform();
    }
    Eigen::MatrixXd p = w;
    for (int x = 0; x < m; ++x) p.row(x) /= w.row(x).sum();
    AGEDP_ASSIGN_OR_RETURN(FiniteMarkovChain chain, FiniteMarkovChain::Create(states, p));
    AGEDP_ASSIGN_OR_RETURN(const std::vector<int> path, SimulatePath(chain, o.length, rng));
    std::vector<double> series(path.size());
    for (size_t s = 0; s < path.size(); ++s) series[s] = data.levels[path[s]];
    data.bundle.user_ids.push_back(absl::StrFormat("user%03d", u));
    data.bundle.series.push_back(std::move(series));
    data.chains.push_back(std::move(chain));
  }
  return data;
}

absl::StatusOr<double> ExactAgingMse(std::span<const FiniteMarkovChain> chains,
                                     int64_t t) {
  if (chains.empty()) return absl::InvalidArgumentError("no chains");
  double total = 0.0;
  for (const FiniteMarkovChain& chain : chains) {
    AGEDP_ASSIGN_OR_RETURN(const Eigen::VectorXd pi, StationaryDistribution(chain));
    const Eigen::MatrixXd pt = TStep(chain, t);
    for (int x = 0; x < chain.num_states(); ++x) {
      for (int y = 0; y < chain.num_states(); ++y) {
        const double d = chain.states()[x].value - chain.states()[y].value;
        total += pi(x) * pt(x, y) * d * d;
      }
    }
  }
  const double n = static_cast<double>(chains.size());
  return total / (n * n);
}

absl::StatusOr<AnalyzeReport> AnalyzePipeline(const SeriesBundle& bundle,
                                              const AnalyzeOptions& options) {
  if (options.horizon < 0) return absl::InvalidArgumentError("horizon must be >= 0");
  if (options.eps_list.empty()) return absl::InvalidArgumentError("empty eps_C list");
  for (double e : options.eps_list) {
    if (!(e > 0.0)) return absl::InvalidArgumentError("eps_C values must be positive");
  }
  if (options.mse_samples < 2) return absl::InvalidArgumentError("need >= 2 MSE samples");
  AGEDP_ASSIGN_OR_RETURN(const Quantization q, Quantize(bundle, options.quantization));

  AnalyzeReport report;
  report.num_states = q.num_bins;
  report.reversibilized = options.reversibilize;
  report.eps_list = options.eps_list;
  std::vector<FiniteMarkovChain> chains;
  for (size_t u = 0; u < q.sequences.size(); ++u) {
    AGEDP_ASSIGN_OR_RETURN(EstimatedChain est,
                           EstimateChain(q.sequences[u], q.representatives,
                                         options.smoothing, options.reversibilize));
    if (!est.reversible) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "estimated chain for user '%s' is not reversible; the spectral bound "
          "needs reversibility (enable reversibilization to symmetrize)",
          bundle.user_ids[u]));
    }
    UserSpectrum spec;
    spec.user_id = bundle.user_ids[u];
    AGEDP_ASSIGN_OR_RETURN(spec.lambda_star, SpectralLambdaStar(est.chain));
    AGEDP_ASSIGN_OR_RETURN(spec.prefactor, SpectralPrefactor(est.chain));
    spec.reversible = true;
    report.users.push_back(spec);
    chains.push_back(std::move(est.chain));
  }

  const int64_t h = options.horizon;
  report.delta_bar.resize(static_cast<size_t>(h) + 1);
  for (int64_t t = 0; t <= h; ++t) {
    double worst = 0.0;
    for (const UserSpectrum& u : report.users) {
      const double decay = t == 0 ? 1.0 : std::pow(u.lambda_star, static_cast<double>(t));
      worst = std::max(worst, std::min(1.0, u.prefactor * decay));
    }
    report.delta_bar[t] = worst;
  }
  for (double eps : options.eps_list) {
    std::vector<double> curve;
    for (double d : report.delta_bar) curve.push_back(AgeDependentRisk(eps, d));
    report.risk.push_back(std::move(curve));
  }

  // Monte Carlo loss of the noisy mean. The aging error and the unit Laplace
  // draw are shared across budgets.
  const int n = static_cast<int>(chains.size());
  const auto [lo, hi] = std::minmax_element(q.representatives.begin(), q.representatives.end());
  const double sensitivity = (*hi - *lo) / n;
  std::vector<Eigen::VectorXd> pis;
  for (const FiniteMarkovChain& c : chains) pis.push_back(StationaryDistribution(c).value());
  report.mse.assign(options.eps_list.size(), std::vector<Estimate>(static_cast<size_t>(h) + 1));
  Rng root(options.seed);
  const int64_t samples = options.mse_samples;
  std::vector<double> diff(static_cast<size_t>(samples)), unit(static_cast<size_t>(samples));
  std::vector<Eigen::MatrixXd> pt(chains.size());
  for (size_t u = 0; u < chains.size(); ++u) {
    pt[u] = Eigen::MatrixXd::Identity(chains[u].num_states(), chains[u].num_states());
  }
  for (int64_t t = 0; t <= h; ++t) {
    if (t > 0) {
      for (size_t u = 0; u < chains.size(); ++u) pt[u] = pt[u] * chains[u].transition();
    }
    Rng rng = root.Split(static_cast<uint64_t>(t));
    for (int64_t s = 0; s < samples; ++s) {
      double d = 0.0;
      for (int u = 0; u < n; ++u) {
        const Eigen::VectorXd& pi = pis[u];
        const int x0 = rng.Categorical(std::span<const double>(pi.data(), pi.size()));
        const Eigen::VectorXd row = pt[u].row(x0).transpose();
        const int xt = rng.Categorical(std::span<const double>(row.data(), row.size()));
        d += chains[u].states()[x0].value - chains[u].states()[xt].value;
      }
      diff[s] = d / n;
      unit[s] = rng.Laplace(1.0);
    }
    for (size_t e = 0; e < options.eps_list.size(); ++e) {
      const double b = sensitivity / options.eps_list[e];
      double sum = 0.0, sum_sq = 0.0;
      for (int64_t s = 0; s < samples; ++s) {
        const double err = diff[s] + b * unit[s];
        const double v = err * err;
        sum += v;
        sum_sq += v * v;
      }
      const double mean = sum / samples;
      const double var = std::max(0.0, (sum_sq - samples * mean * mean) / (samples - 1));
      report.mse[e][t] = Estimate{mean, std::sqrt(var / samples), samples};
    }
  }

  for (size_t e = 0; e < options.eps_list.size(); ++e) {
    const double eps = options.eps_list[e];
    for (int64_t t = 0; t <= h; ++t) {
      report.combined.push_back({"combined", static_cast<double>(t), 0.0, eps,
                                 report.risk[e][t], report.mse[e][t].mean,
                                 report.mse[e][t].std_error});
    }
    report.noise_only.push_back({"noise-only", 0.0, 0.0, eps, eps,
                                 report.mse[e][0].mean, report.mse[e][0].std_error});
  }
  report.frontier = ParetoFrontier(report.combined);
  for (TradeoffPoint& p : report.frontier) p.scheme = "frontier";
  return report;
}

}  // namespace agedp
