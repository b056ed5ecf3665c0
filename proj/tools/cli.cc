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

#include "cli.h"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "agedp/attack_sim.h"
#include "agedp/chain_models.h"
#include "agedp/guarantee_calculus.h"
#include "agedp/ingest.h"
#include "agedp/io.h"
#include "agedp/mechanisms.h"
#include "agedp/policy_optimizer.h"
#include "agedp/random.h"
#include "agedp/status_macros.h"

namespace agedp::cli {
namespace {

enum class Format { kDefault, kCsv, kJson };

struct Globals {
  std::string out_path;
  std::string format = "default";
  uint64_t seed = kDefaultSeed;
  bool seed_given = false;
};

class Emitter {
 public:
  Emitter(const Globals& g, std::ostream& out) : g_(g), out_(out) {}

  absl::Status Emit(const std::string& payload) const {
    if (g_.out_path.empty()) {
      out_ << payload;
      out_.flush();
      return absl::OkStatus();
    }
    return WriteFileAtomic(g_.out_path, payload);
  }

 private:
  const Globals& g_;
  std::ostream& out_;
};

absl::StatusOr<Format> ResolveFormat(const Globals& g, Format fallback) {
  if (g.format == "default") return fallback;
  if (g.format == "csv") return Format::kCsv;
  if (g.format == "json") return Format::kJson;
  return absl::InvalidArgumentError(
      absl::StrFormat("--format must be csv or json, got '%s'", g.format));
}

absl::StatusOr<uint64_t> ResolveSeed(const Globals& g) {
  if (g.seed_given) return g.seed;
  if (const char* env = std::getenv("AGEDP_SEED"); env != nullptr && *env != '\0') {
    uint64_t seed;
    if (!absl::SimpleAtoi(env, &seed)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("AGEDP_SEED='%s' is not an unsigned integer", env));
    }
    return seed;
  }
  return kDefaultSeed;
}

absl::StatusOr<FiniteMarkovChain> LoadChain(const std::string& path) {
  AGEDP_ASSIGN_OR_RETURN(const std::string text, ReadFile(path));
  absl::StatusOr<FiniteMarkovChain> chain = ParseChainJson(text);
  if (!chain.ok()) {
    return absl::Status(chain.status().code(),
                        absl::StrCat(path, ": ", chain.status().message()));
  }
  return chain;
}

template <typename T, typename Parser>
absl::StatusOr<T> LoadWith(const std::string& path, Parser parse) {
  AGEDP_ASSIGN_OR_RETURN(const std::string text, ReadFile(path));
  absl::StatusOr<T> value = parse(text);
  if (!value.ok()) {
    return absl::Status(value.status().code(),
                        absl::StrCat(path, ": ", value.status().message()));
  }
  return value;
}

absl::Status RequireExactlyOne(std::initializer_list<bool> given, const char* names) {
  int count = 0;
  for (bool b : given) count += b ? 1 : 0;
  if (count != 1) {
    return absl::InvalidArgumentError(absl::StrFormat("give exactly one of %s", names));
  }
  return absl::OkStatus();
}

std::string PeakCsv(const PeakRiskResult& r) {
  return absl::StrCat("converges,epsilon_star,contraction\n", r.converges ? "true" : "false",
                      ",", FormatDouble(r.epsilon_star), ",", FormatDouble(r.contraction),
                      "\n");
}

std::string PeakJson(const PeakRiskResult& r) {
  return absl::StrFormat(
      "{\n  \"converges\": %s,\n  \"epsilon_star\": %s,\n  \"contraction\": %s\n}\n",
      r.converges ? "true" : "false",
      std::isfinite(r.epsilon_star) ? FormatDouble(r.epsilon_star) : "\"inf\"",
      FormatDouble(r.contraction));
}

// ---- risk ------------------------------------------------------------------

struct RiskArgs {
  std::string chain, decay, ar1;
  double eps = 0.0;
  int64_t horizon = 50;
  std::string bound = "exact";
  double gap = 2.0;
};

absl::Status RunRisk(const RiskArgs& a, const Globals& g, const Emitter& emit) {
  AGEDP_RETURN_IF_ERROR(RequireExactlyOne(
      {!a.chain.empty(), !a.decay.empty(), !a.ar1.empty()}, "--chain, --decay, --ar1"));
  if (!(a.eps > 0.0) || !std::isfinite(a.eps)) {
    return absl::InvalidArgumentError("--eps must be positive and finite");
  }
  if (a.horizon < 0) return absl::InvalidArgumentError("--horizon must be >= 0");
  AGEDP_ASSIGN_OR_RETURN(const Format fmt, ResolveFormat(g, Format::kCsv));
  std::vector<double> deltas;
  if (!a.chain.empty()) {
    AGEDP_ASSIGN_OR_RETURN(const FiniteMarkovChain chain, LoadChain(a.chain));
    std::vector<FiniteMarkovChain> chains{chain};
    if (a.bound == "exact") {
      AGEDP_ASSIGN_OR_RETURN(deltas, MaxTvDistanceCurve(chains, a.horizon));
    } else if (a.bound == "spectral") {
      for (int64_t t = 0; t <= a.horizon; ++t) {
        AGEDP_ASSIGN_OR_RETURN(const double d, TvBoundSpectral(chains, t));
        deltas.push_back(d);
      }
    } else {
      return absl::InvalidArgumentError("--bound must be exact or spectral");
    }
  } else if (!a.decay.empty()) {
    AGEDP_ASSIGN_OR_RETURN(const GeometricDecayModel model,
                           LoadWith<GeometricDecayModel>(a.decay, ParseDecayJson));
    for (int64_t t = 0; t <= a.horizon; ++t) deltas.push_back(model.Delta(t));
  } else {
    AGEDP_ASSIGN_OR_RETURN(const AR1Model model, LoadWith<AR1Model>(a.ar1, ParseAr1Json));
    if (!(a.gap >= 0.0)) return absl::InvalidArgumentError("--gap must be >= 0");
    deltas.push_back(1.0);
    for (int64_t t = 1; t <= a.horizon; ++t) {
      AGEDP_ASSIGN_OR_RETURN(const double d, Ar1TvBound(model, a.gap / 2, -a.gap / 2, t));
      deltas.push_back(d);
    }
  }
  RiskCurve curve;
  curve.horizon = a.horizon;
  for (double d : deltas) curve.values.push_back(AgeDependentRisk(a.eps, d));
  return emit.Emit(fmt == Format::kJson ? RiskCurveToJson(curve) : RiskCurveToCsv(curve));
}

// ---- compose ---------------------------------------------------------------

struct ComposeArgs {
  std::string schedule, chain, decay;
  bool delta_one = false;
  int64_t horizon = -1;
};

absl::Status RunCompose(const ComposeArgs& a, const Globals& g, const Emitter& emit) {
  AGEDP_RETURN_IF_ERROR(RequireExactlyOne({!a.chain.empty(), !a.decay.empty(), a.delta_one},
                                          "--chain, --decay, --delta-one"));
  AGEDP_ASSIGN_OR_RETURN(const Format fmt, ResolveFormat(g, Format::kCsv));
  AGEDP_ASSIGN_OR_RETURN(const PolicySchedule schedule,
                         LoadWith<PolicySchedule>(a.schedule, ParseScheduleJson));
  const int64_t horizon =
      a.horizon >= 0 ? a.horizon
                     : (schedule.size() == 0 ? 0 : schedule.entries().back().publish_time);
  DeltaFn delta;
  if (a.delta_one) {
    delta = [](int64_t) { return 1.0; };
  } else if (!a.decay.empty()) {
    AGEDP_ASSIGN_OR_RETURN(const GeometricDecayModel model,
                           LoadWith<GeometricDecayModel>(a.decay, ParseDecayJson));
    delta = DeltaFromDecay(model);
  } else {
    AGEDP_ASSIGN_OR_RETURN(const FiniteMarkovChain chain, LoadChain(a.chain));
    std::vector<FiniteMarkovChain> chains{chain};
    AGEDP_ASSIGN_OR_RETURN(delta, DeltaFromChains(chains, horizon));
  }
  AGEDP_ASSIGN_OR_RETURN(const RiskCurve curve, ComposeRiskCurve(schedule, delta, horizon));
  return emit.Emit(fmt == Format::kJson ? RiskCurveToJson(curve) : RiskCurveToCsv(curve));
}

// ---- peak ------------------------------------------------------------------

struct PeakArgs {
  int64_t age = 0;
  int64_t interval = 1;
  double eps = 0.0;
  double c = 1.0;
  double rho = std::numeric_limits<double>::quiet_NaN();
  std::string chain;
};

absl::Status RunPeak(const PeakArgs& a, const Globals& g, const Emitter& emit) {
  AGEDP_ASSIGN_OR_RETURN(const Format fmt, ResolveFormat(g, Format::kCsv));
  SimplifiedPolicy policy{a.age, a.interval, a.eps};
  AGEDP_RETURN_IF_ERROR(policy.Validate());
  AGEDP_RETURN_IF_ERROR(
      RequireExactlyOne({!std::isnan(a.rho), !a.chain.empty()}, "--rho, --chain"));
  DeltaFn delta;
  if (!a.chain.empty()) {
    AGEDP_ASSIGN_OR_RETURN(const FiniteMarkovChain chain, LoadChain(a.chain));
    std::vector<FiniteMarkovChain> chains{chain};
    AGEDP_ASSIGN_OR_RETURN(delta, DeltaFromChains(chains, a.interval));
  } else {
    AGEDP_ASSIGN_OR_RETURN(const GeometricDecayModel model,
                           GeometricDecayModel::Create(a.c, a.rho));
    delta = DeltaFromDecay(model);
  }
  AGEDP_ASSIGN_OR_RETURN(const PeakRiskResult r, PeakRiskFixedPoint(policy, delta));
  return emit.Emit(fmt == Format::kJson ? PeakJson(r) : PeakCsv(r));
}

// ---- optimize --------------------------------------------------------------

absl::Status RunOptimize(const std::string& problem_path, const Globals& g,
                         const Emitter& emit) {
  AGEDP_ASSIGN_OR_RETURN(const Format fmt, ResolveFormat(g, Format::kJson));
  AGEDP_ASSIGN_OR_RETURN(const OptimizationProblem problem,
                         LoadWith<OptimizationProblem>(problem_path, ParseProblemJson));
  AGEDP_ASSIGN_OR_RETURN(const OptimizerSolution s, Solve(problem));
  if (fmt == Format::kJson) return emit.Emit(SolutionToJson(problem, s));
  return emit.Emit(absl::StrCat(
      "branch,eps_C,A,S_bar,objective,rounded_A,rounded_S_bar,rounded_objective,"
      "rounded_feasible\n",
      BranchName(s.branch), ",", FormatDouble(s.eps_c), ",", FormatDouble(s.age), ",",
      FormatDouble(s.interval), ",", FormatDouble(s.objective), ",", s.rounded.age, ",",
      s.rounded.interval, ",", FormatDouble(s.rounded.objective), ",",
      s.rounded.feasible ? "true" : "false", "\n"));
}

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
  std::string chain, schedule, manifest, query = "mean";
  int num_users = 20;
  int64_t horizon = -1;
};

absl::Status RunSimulate(const SimulateArgs& a, const Globals& g, const Emitter& emit) {
  AGEDP_ASSIGN_OR_RETURN(const Format fmt, ResolveFormat(g, Format::kCsv));
  AGEDP_ASSIGN_OR_RETURN(const uint64_t seed, ResolveSeed(g));
  if (a.num_users < 1) return absl::InvalidArgumentError("--num-users must be >= 1");
  QueryFunction f = QueryFunction::Mean(a.num_users);
  if (a.query == "sum") {
    f = QueryFunction::Sum(a.num_users);
  } else if (a.query != "mean") {
    return absl::InvalidArgumentError("--query must be mean or sum");
  }
  AGEDP_ASSIGN_OR_RETURN(const FiniteMarkovChain chain, LoadChain(a.chain));
  AGEDP_ASSIGN_OR_RETURN(const PolicySchedule schedule,
                         LoadWith<PolicySchedule>(a.schedule, ParseScheduleJson));
  const int64_t horizon =
      a.horizon >= 0 ? a.horizon
                     : (schedule.size() == 0 ? 0 : schedule.entries().back().publish_time);
  std::vector<FiniteMarkovChain> chains{chain};
  Rng rng(seed);
  AGEDP_ASSIGN_OR_RETURN(const std::vector<PublishedOutput> outputs,
                         RunMultiQuery(schedule, chains, f, horizon, rng));
  if (!a.manifest.empty()) {
    RunManifest m;
    m.command = "simulate";
    m.seed = seed;
    m.chain_file = a.chain;
    m.schedule = schedule;
    for (const ScheduleEntry& e : schedule.entries()) m.budgets.push_back(e.eps_c);
    m.horizon = horizon;
    m.num_users = a.num_users;
    AGEDP_RETURN_IF_ERROR(WriteFileAtomic(a.manifest, ManifestToJson(m)));
  }
  return emit.Emit(fmt == Format::kJson ? OutputsToJson(outputs) : OutputsToCsv(outputs));
}

// ---- attack ----------------------------------------------------------------

struct AttackArgs {
  double eps = 0.0, p = 0.1, q = 0.1;
  std::vector<int64_t> ts{0};
};

absl::Status RunAttack(const AttackArgs& a, const Globals& g, const Emitter& emit) {
  AGEDP_ASSIGN_OR_RETURN(const Format fmt, ResolveFormat(g, Format::kCsv));
  std::vector<double> acc;
  for (int64_t t : a.ts) {
    AGEDP_ASSIGN_OR_RETURN(const double v, AttackAccuracyAfter(a.eps, a.p, a.q, t));
    acc.push_back(v);
  }
  std::string payload;
  if (fmt == Format::kJson) {
    payload = "[\n";
    for (size_t i = 0; i < acc.size(); ++i) {
      absl::StrAppend(&payload, "  {\"t\": ", a.ts[i], ", \"accuracy\": ",
                      FormatDouble(acc[i]), "}", i + 1 < acc.size() ? "," : "", "\n");
    }
    payload += "]\n";
  } else {
    payload = "t,accuracy\n";
    for (size_t i = 0; i < acc.size(); ++i) {
      absl::StrAppend(&payload, a.ts[i], ",", absl::StrFormat("%.5f", acc[i]), "\n");
    }
  }
  return emit.Emit(payload);
}

// ---- sweep -----------------------------------------------------------------

struct SweepArgs {
  std::string scenario = "two-state-mse";
  SweepConfig config;
  int x0_plus = -1;
  std::string convention = "as-printed";
  std::string frontier_out;
};

absl::Status RunSweep(SweepArgs a, const Globals& g, const Emitter& emit) {
  AGEDP_ASSIGN_OR_RETURN(const Format fmt, ResolveFormat(g, Format::kCsv));
  AGEDP_ASSIGN_OR_RETURN(a.config.scenario, ParseSweepScenario(a.scenario));
  AGEDP_ASSIGN_OR_RETURN(a.config.seed, ResolveSeed(g));
  if (a.x0_plus >= 0) a.config.x0_plus_count = a.x0_plus;
  if (a.convention == "laplace") {
    a.config.ar1_convention = NoiseVarianceConvention::kLaplace;
  } else if (a.convention != "as-printed") {
    return absl::InvalidArgumentError("--convention must be as-printed or laplace");
  }
  AGEDP_ASSIGN_OR_RETURN(const SweepResult r, TradeoffSweep(a.config));
  std::vector<TradeoffPoint> all = r.combined;
  all.insert(all.end(), r.noise_only.begin(), r.noise_only.end());
  all.insert(all.end(), r.frontier.begin(), r.frontier.end());
  if (!a.frontier_out.empty()) {
    AGEDP_RETURN_IF_ERROR(WriteFileAtomic(a.frontier_out, TradeoffToCsv(r.frontier)));
  }
  return emit.Emit(fmt == Format::kJson ? TradeoffToJson(all) : TradeoffToCsv(all));
}

// ---- ingest / analyze / synth ----------------------------------------------

struct QuantArgs {
  std::string csv;
  double slot_seconds = 1800.0;
  std::string mode = "equal-frequency";
  int bins = 12;
  std::vector<double> edges;
  double smoothing = 1.0;
  bool reversibilize = false;
};

absl::StatusOr<QuantizationSpec> BuildSpec(const QuantArgs& a) {
  AGEDP_ASSIGN_OR_RETURN(const QuantizationSpec::Mode mode, ParseQuantizationMode(a.mode));
  QuantizationSpec spec;
  switch (mode) {
    case QuantizationSpec::Mode::kEdges:
      spec = QuantizationSpec::Edges(a.edges);
      break;
    case QuantizationSpec::Mode::kEqualWidth:
      spec = QuantizationSpec::EqualWidth(a.bins);
      break;
    case QuantizationSpec::Mode::kEqualFrequency:
      spec = QuantizationSpec::EqualFrequency(a.bins);
      break;
  }
  AGEDP_RETURN_IF_ERROR(spec.Validate());
  return spec;
}

absl::StatusOr<SeriesBundle> LoadBundle(const QuantArgs& a) {
  AGEDP_ASSIGN_OR_RETURN(const std::string text, ReadFile(a.csv));
  absl::StatusOr<SeriesBundle> bundle = ParseSeriesCsv(text, a.slot_seconds);
  if (!bundle.ok()) {
    return absl::Status(bundle.status().code(),
                        absl::StrCat(a.csv, ": ", bundle.status().message()));
  }
  return bundle;
}

absl::Status RunIngest(const QuantArgs& a, const Globals& g, const Emitter& emit) {
  AGEDP_ASSIGN_OR_RETURN(const Format fmt, ResolveFormat(g, Format::kJson));
  if (fmt != Format::kJson) return absl::InvalidArgumentError("ingest only writes JSON");
  AGEDP_ASSIGN_OR_RETURN(const QuantizationSpec spec, BuildSpec(a));
  AGEDP_ASSIGN_OR_RETURN(const SeriesBundle bundle, LoadBundle(a));
  AGEDP_ASSIGN_OR_RETURN(const Quantization q, Quantize(bundle, spec));
  std::vector<IngestedChain> chains;
  for (size_t u = 0; u < q.sequences.size(); ++u) {
    AGEDP_ASSIGN_OR_RETURN(EstimatedChain est,
                           EstimateChain(q.sequences[u], q.representatives, a.smoothing,
                                         a.reversibilize));
    chains.push_back({bundle.user_ids[u], std::move(est)});
  }
  return emit.Emit(IngestToJson(q, chains));
}

struct AnalyzeArgs {
  QuantArgs quant;
  std::vector<double> eps{0.5, 1.0, 2.0};
  int64_t horizon = 48;
  int64_t mse_samples = 20000;
  std::string frontier_out;
};

absl::Status RunAnalyze(const AnalyzeArgs& a, const Globals& g, const Emitter& emit) {
  AGEDP_ASSIGN_OR_RETURN(const Format fmt, ResolveFormat(g, Format::kCsv));
  AnalyzeOptions options;
  AGEDP_ASSIGN_OR_RETURN(options.quantization, BuildSpec(a.quant));
  AGEDP_ASSIGN_OR_RETURN(options.seed, ResolveSeed(g));
  options.eps_list = a.eps;
  options.horizon = a.horizon;
  options.smoothing = a.quant.smoothing;
  options.reversibilize = a.quant.reversibilize;
  options.mse_samples = a.mse_samples;
  AGEDP_ASSIGN_OR_RETURN(const SeriesBundle bundle, LoadBundle(a.quant));
  AGEDP_ASSIGN_OR_RETURN(const AnalyzeReport report, AnalyzePipeline(bundle, options));
  if (!a.frontier_out.empty()) {
    std::vector<TradeoffPoint> points = report.noise_only;
    points.insert(points.end(), report.frontier.begin(), report.frontier.end());
    AGEDP_RETURN_IF_ERROR(WriteFileAtomic(a.frontier_out, TradeoffToCsv(points)));
  }
  return emit.Emit(fmt == Format::kJson ? AnalyzeToJson(report) : AnalyzeToCsv(report));
}

absl::Status RunSynth(SyntheticOptions o, const Globals& g, const Emitter& emit) {
  AGEDP_ASSIGN_OR_RETURN(const Format fmt, ResolveFormat(g, Format::kCsv));
  if (fmt != Format::kCsv) return absl::InvalidArgumentError("synth only writes CSV");
  AGEDP_ASSIGN_OR_RETURN(o.seed, ResolveSeed(g));
  AGEDP_ASSIGN_OR_RETURN(const SyntheticData data, GenerateSyntheticBundle(o));
  std::string payload = "user_id,slot_index,value\n";
  for (size_t u = 0; u < data.bundle.series.size(); ++u) {
    const auto& series = data.bundle.series[u];
    for (size_t s = 0; s < series.size(); ++s) {
      absl::StrAppend(&payload, data.bundle.user_ids[u], ",", s, ",",
                      FormatDouble(series[s]), "\n");
    }
  }
  return emit.Emit(payload);
}

void AddQuantOptions(CLI::App* cmd, QuantArgs& a) {
  cmd->add_option("--csv", a.csv, "Input CSV with columns user_id, slot_index, value")
      ->required();
  cmd->add_option("--slot-seconds", a.slot_seconds, "Slot duration in seconds");
  cmd->add_option("--quantization", a.mode, "edges | equal-width | equal-frequency");
  cmd->add_option("--bins", a.bins, "Number of bins");
  cmd->add_option("--edges", a.edges, "Explicit bin edges (with --quantization edges)")
      ->delimiter(',');
  cmd->add_option("--smoothing", a.smoothing, "Additive pseudo-count per transition");
  cmd->add_flag("--reversibilize", a.reversibilize,
                "Replace each estimate by (P + P_reversed) / 2");
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Age-dependent differential privacy toolkit", "agedp"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--out", g.out_path, "Write the primary output to this file");
  app.add_option("--format", g.format, "csv | json");
  CLI::Option* seed_opt = app.add_option("--seed", g.seed, "Random seed (else AGEDP_SEED)");

  RiskArgs risk;
  CLI::App* c_risk = app.add_subcommand("risk", "Single-query risk curve");
  c_risk->add_option("--chain", risk.chain, "Chain JSON file");
  c_risk->add_option("--decay", risk.decay, "Decay model JSON file {c, rho}");
  c_risk->add_option("--ar1", risk.ar1, "AR(1) model JSON file {rho, sigma}");
  c_risk->add_option("--eps", risk.eps, "Mechanism budget eps_C")->required();
  c_risk->add_option("--horizon", risk.horizon, "Largest age t");
  c_risk->add_option("--bound", risk.bound, "exact | spectral (chains)");
  c_risk->add_option("--gap", risk.gap, "Neighbor distance |x0 - x0'| (AR1)");

  ComposeArgs compose;
  CLI::App* c_compose = app.add_subcommand("compose", "Multi-query risk curve");
  c_compose->add_option("--schedule", compose.schedule, "Schedule JSON file")->required();
  c_compose->add_option("--chain", compose.chain, "Chain JSON file");
  c_compose->add_option("--decay", compose.decay, "Decay model JSON file");
  c_compose->add_flag("--delta-one", compose.delta_one, "Take Delta = 1 at every age");
  c_compose->add_option("--horizon", compose.horizon, "Last slot (default: last publish)");

  PeakArgs peak;
  CLI::App* c_peak = app.add_subcommand("peak", "Limiting peak risk of a uniform policy");
  c_peak->add_option("--age", peak.age, "Input age A")->required();
  c_peak->add_option("--interval", peak.interval, "Publishing interval S_bar")->required();
  c_peak->add_option("--eps", peak.eps, "Per-release budget eps_C")->required();
  c_peak->add_option("--c", peak.c, "Decay prefactor c");
  c_peak->add_option("--rho", peak.rho, "Decay rate rho");
  c_peak->add_option("--chain", peak.chain, "Chain JSON file instead of a decay model");

  std::string problem_path;
  CLI::App* c_opt = app.add_subcommand("optimize", "Optimal uniform update policy");
  c_opt->add_option("--problem", problem_path, "Problem JSON file")->required();

  SimulateArgs sim;
  CLI::App* c_sim = app.add_subcommand("simulate", "Run the multi-query mechanism");
  c_sim->add_option("--chain", sim.chain, "Chain JSON file shared by all users")->required();
  c_sim->add_option("--schedule", sim.schedule, "Schedule JSON file")->required();
  c_sim->add_option("--num-users", sim.num_users, "Number of users");
  c_sim->add_option("--horizon", sim.horizon, "Last slot (default: last publish)");
  c_sim->add_option("--query", sim.query, "mean | sum");
  c_sim->add_option("--manifest", sim.manifest, "Also write a run manifest JSON here");

  AttackArgs attack;
  CLI::App* c_attack = app.add_subcommand("attack", "Bayes attack accuracy after t steps");
  c_attack->add_option("--eps", attack.eps, "Mechanism budget")->required();
  c_attack->add_option("--p", attack.p, "Transition probability -1 -> +1");
  c_attack->add_option("--q", attack.q, "Transition probability +1 -> -1");
  c_attack->add_option("--t", attack.ts, "Ages (repeat or comma-separate)")->delimiter(',');

  SweepArgs sweep;
  CLI::App* c_sweep = app.add_subcommand("sweep", "Risk/loss tradeoff sweep");
  c_sweep->add_option("--scenario", sweep.scenario,
                      "two-state-mse | failure-rate | ar1-mse | multi-query-peak");
  c_sweep->add_option("--p", sweep.config.p, "Two-state p");
  c_sweep->add_option("--q", sweep.config.q, "Two-state q");
  c_sweep->add_option("--num-users", sweep.config.num_users, "Number of users I");
  c_sweep->add_option("--ar1-rho", sweep.config.ar1_rho, "AR(1) coefficient");
  c_sweep->add_option("--ar1-sigma", sweep.config.ar1_sigma, "AR(1) innovation scale");
  c_sweep->add_option("--ar1-gap", sweep.config.ar1_neighbor_gap, "AR(1) neighbor gap");
  c_sweep->add_option("--convention", sweep.convention, "as-printed | laplace");
  c_sweep->add_option("--ages", sweep.config.ages, "Ages t or A")->delimiter(',');
  c_sweep->add_option("--intervals", sweep.config.intervals, "Intervals S_bar")
      ->delimiter(',');
  c_sweep->add_option("--eps", sweep.config.eps_grid, "Budget grid")->delimiter(',');
  c_sweep->add_option("--x0-plus", sweep.x0_plus, "Users at +1 in X_0 (default: stationary)");
  c_sweep->add_flag("--monte-carlo", sweep.config.monte_carlo, "Monte Carlo losses");
  c_sweep->add_option("--samples", sweep.config.samples, "Monte Carlo samples");
  c_sweep->add_flag("--failure-loss", sweep.config.peak_uses_failure_rate,
                    "Multi-query loss is the failure rate");
  c_sweep->add_option("--frontier-out", sweep.frontier_out, "Also write the frontier CSV");

  QuantArgs ingest;
  CLI::App* c_ingest = app.add_subcommand("ingest", "Estimate per-user chains from a CSV");
  AddQuantOptions(c_ingest, ingest);

  AnalyzeArgs analyze;
  CLI::App* c_analyze = app.add_subcommand("analyze", "Full trace-driven pipeline");
  AddQuantOptions(c_analyze, analyze.quant);
  c_analyze->add_option("--eps", analyze.eps, "Budgets eps_C")->delimiter(',');
  c_analyze->add_option("--horizon", analyze.horizon, "Largest age t");
  c_analyze->add_option("--mse-samples", analyze.mse_samples, "Monte Carlo samples per age");
  c_analyze->add_option("--frontier-out", analyze.frontier_out,
                        "Also write noise-only and frontier points");

  SyntheticOptions synth;
  CLI::App* c_synth = app.add_subcommand("synth", "Synthetic readings from random chains");
  c_synth->add_option("--num-users", synth.num_users, "Number of users");
  c_synth->add_option("--length", synth.length, "Slots per user");
  c_synth->add_option("--states", synth.num_states, "States per chain");
  c_synth->add_option("--laziness", synth.laziness, "Extra self-loop weight");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }
  g.seed_given = seed_opt->count() > 0;

  const Emitter emit(g, out);
  absl::Status status;
  if (c_risk->parsed()) status = RunRisk(risk, g, emit);
  else if (c_compose->parsed()) status = RunCompose(compose, g, emit);
  else if (c_peak->parsed()) status = RunPeak(peak, g, emit);
  else if (c_opt->parsed()) status = RunOptimize(problem_path, g, emit);
  else if (c_sim->parsed()) status = RunSimulate(sim, g, emit);
  else if (c_attack->parsed()) status = RunAttack(attack, g, emit);
  else if (c_sweep->parsed()) status = RunSweep(sweep, g, emit);
  else if (c_ingest->parsed()) status = RunIngest(ingest, g, emit);
  else if (c_analyze->parsed()) status = RunAnalyze(analyze, g, emit);
  else if (c_synth->parsed()) status = RunSynth(synth, g, emit);

  if (status.ok()) return kExitOk;
  if (IsInfeasible(status)) {
    err << "error: " << status.message() << "\n";
    return kExitInfeasible;
  }
  err << "error: " << status.message() << "\n";
  return kExitInputError;
}

}  // namespace agedp::cli
