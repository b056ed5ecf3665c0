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

#include "agedp/io.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "agedp/status_macros.h"
#include "json.hpp"

namespace agedp {
namespace {

using nlohmann::json;

absl::StatusOr<json> ParseJson(std::string_view text, absl::string_view what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    int line = 1, column = 1;
    const size_t limit = std::min<size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    return absl::InvalidArgumentError(absl::StrFormat(
        "%s: JSON syntax error at line %d, column %d", what, line, column));
  }
}

// Typed field access with path-qualified messages.
absl::StatusOr<double> GetNumber(const json& obj, const std::string& key,
                                 absl::string_view where) {
  if (!obj.is_object() || !obj.contains(key)) {
    return absl::InvalidArgumentError(absl::StrFormat("%s: missing field '%s'", where, key));
  }
  const json& v = obj.at(key);
  if (!v.is_number()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("%s: field '%s' must be a number", where, key));
  }
  return v.get<double>();
}

absl::StatusOr<double> GetNumberOr(const json& obj, const std::string& key,
                                   double fallback, absl::string_view where) {
  if (!obj.contains(key)) return fallback;
  return GetNumber(obj, key, where);
}

absl::StatusOr<int64_t> GetInteger(const json& obj, const std::string& key,
                                   absl::string_view where) {
  if (!obj.is_object() || !obj.contains(key)) {
    return absl::InvalidArgumentError(absl::StrFormat("%s: missing field '%s'", where, key));
  }
  const json& v = obj.at(key);
  if (!v.is_number_integer()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("%s: field '%s' must be an integer", where, key));
  }
  return v.get<int64_t>();
}

absl::StatusOr<std::vector<double>> GetNumberArray(const json& obj,
                                                   const std::string& key,
                                                   absl::string_view where) {
  if (!obj.contains(key) || !obj.at(key).is_array()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("%s: field '%s' must be an array of numbers", where, key));
  }
  std::vector<double> out;
  for (const json& v : obj.at(key)) {
    if (!v.is_number()) {
      return absl::InvalidArgumentError(
          absl::StrFormat("%s: field '%s' must contain only numbers", where, key));
    }
    out.push_back(v.get<double>());
  }
  return out;
}

json Number(double v) {
  if (std::isfinite(v)) return v;
  return FormatDouble(v);
}

json ChainJson(const FiniteMarkovChain& chain) {
  json states = json::array();
  for (const ChainState& s : chain.states()) {
    states.push_back({{"label", s.label}, {"value", s.value}});
  }
  json rows = json::array();
  for (int i = 0; i < chain.num_states(); ++i) {
    json row = json::array();
    for (int j = 0; j < chain.num_states(); ++j) row.push_back(chain.transition()(i, j));
    rows.push_back(std::move(row));
  }
  return {{"states", std::move(states)}, {"transition", std::move(rows)}};
}

absl::StatusOr<FiniteMarkovChain> ChainFromJson(const json& doc) {
  constexpr absl::string_view kWhere = "chain";
  if (!doc.is_object() || !doc.contains("states") || !doc.at("states").is_array()) {
    return absl::InvalidArgumentError("chain: field 'states' must be an array");
  }
  std::vector<ChainState> states;
  for (const json& s : doc.at("states")) {
    ChainState state;
    if (!s.is_object() || !s.contains("label") || !s.at("label").is_string()) {
      return absl::InvalidArgumentError("chain: every state needs a string 'label'");
    }
    state.label = s.at("label").get<std::string>();
    AGEDP_ASSIGN_OR_RETURN(state.value, GetNumber(s, "value", kWhere));
    states.push_back(std::move(state));
  }
  if (!doc.contains("transition") || !doc.at("transition").is_array()) {
    return absl::InvalidArgumentError("chain: field 'transition' must be an array of rows");
  }
  const json& rows = doc.at("transition");
  const size_t m = states.size();
  if (rows.size() != m) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "chain: transition has %d rows but there are %d states", rows.size(), m));
  }
  Eigen::MatrixXd p(m, m);
  for (size_t i = 0; i < m; ++i) {
    if (!rows[i].is_array() || rows[i].size() != m) {
      return absl::InvalidArgumentError(
          absl::StrFormat("chain: transition row %d must have %d entries", i, m));
    }
    for (size_t j = 0; j < m; ++j) {
      if (!rows[i][j].is_number()) {
        return absl::InvalidArgumentError(
            absl::StrFormat("chain: transition[%d][%d] is not a number", i, j));
      }
      p(i, j) = rows[i][j].get<double>();
    }
  }
  return FiniteMarkovChain::Create(std::move(states), std::move(p));
}

json ScheduleJson(const PolicySchedule& schedule) {
  json arr = json::array();
  for (const ScheduleEntry& e : schedule.entries()) {
    arr.push_back({{"S", e.publish_time}, {"A", e.age}, {"eps_C", e.eps_c}});
  }
  return arr;
}

absl::StatusOr<PenaltyFunction> PenaltyFromJson(const json& spec) {
  constexpr absl::string_view kWhere = "penalty";
  if (!spec.is_object() || !spec.contains("kind") || !spec.at("kind").is_string()) {
    return absl::InvalidArgumentError("penalty: needs a string field 'kind'");
  }
  const std::string kind = spec.at("kind").get<std::string>();
  if (kind == "mse-two-state" || kind == "failure-rate") {
    AGEDP_ASSIGN_OR_RETURN(const double p, GetNumber(spec, "p", kWhere));
    AGEDP_ASSIGN_OR_RETURN(const double q, GetNumber(spec, "q", kWhere));
    AGEDP_ASSIGN_OR_RETURN(const int64_t n, GetInteger(spec, "num_users", kWhere));
    if (kind == "mse-two-state") return PenaltyFunction::MseTwoState(p, q, static_cast<int>(n));
    std::optional<int> x0;
    if (spec.contains("x0_plus_count")) {
      AGEDP_ASSIGN_OR_RETURN(const int64_t k, GetInteger(spec, "x0_plus_count", kWhere));
      x0 = static_cast<int>(k);
    }
    return PenaltyFunction::FailureRate(p, q, static_cast<int>(n), x0);
  }
  if (kind == "ar1-mse") {
    AGEDP_ASSIGN_OR_RETURN(const double rho, GetNumber(spec, "rho", kWhere));
    AGEDP_ASSIGN_OR_RETURN(const double sigma, GetNumber(spec, "sigma", kWhere));
    AGEDP_ASSIGN_OR_RETURN(const int64_t n, GetInteger(spec, "num_users", kWhere));
    NoiseVarianceConvention conv = NoiseVarianceConvention::kAsPrinted;
    if (spec.contains("convention")) {
      const json& c = spec.at("convention");
      if (c == "as-printed") {
        conv = NoiseVarianceConvention::kAsPrinted;
      } else if (c == "laplace") {
        conv = NoiseVarianceConvention::kLaplace;
      } else {
        return absl::InvalidArgumentError(
            "penalty: convention must be \"as-printed\" or \"laplace\"");
      }
    }
    AGEDP_ASSIGN_OR_RETURN(const AR1Model model, AR1Model::Create(rho, sigma));
    return PenaltyFunction::Ar1Mse(model, static_cast<int>(n), conv);
  }
  if (kind == "table") {
    AGEDP_ASSIGN_OR_RETURN(std::vector<double> ages, GetNumberArray(spec, "ages", kWhere));
    AGEDP_ASSIGN_OR_RETURN(std::vector<double> eps, GetNumberArray(spec, "eps", kWhere));
    if (!spec.contains("values") || !spec.at("values").is_array()) {
      return absl::InvalidArgumentError("penalty: 'values' must be a 2-D array");
    }
    std::vector<std::vector<double>> values;
    for (const json& row : spec.at("values")) {
      if (!row.is_array()) {
        return absl::InvalidArgumentError("penalty: 'values' must be a 2-D array");
      }
      std::vector<double> r;
      for (const json& v : row) {
        if (!v.is_number()) {
          return absl::InvalidArgumentError("penalty: 'values' must contain only numbers");
        }
        r.push_back(v.get<double>());
      }
      values.push_back(std::move(r));
    }
    return PenaltyFunction::Table(std::move(ages), std::move(eps), std::move(values));
  }
  return absl::InvalidArgumentError(absl::StrFormat(
      "penalty: unknown kind '%s' (expected mse-two-state, failure-rate, ar1-mse "
      "or table)",
      kind));
}

std::string Dump(const json& doc) { return doc.dump(2) + "\n"; }

json PointJson(const TradeoffPoint& p) {
  return {{"scheme", p.scheme},   {"knob_t_or_A", p.knob_t_or_a},
          {"knob_S", p.knob_s},   {"eps_C", p.eps_c},
          {"risk", Number(p.risk)}, {"loss", Number(p.loss)},
          {"loss_stderr", Number(p.loss_stderr)}};
}

}  // namespace

std::string FormatDouble(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrFormat("cannot open '%s'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) return absl::DataLossError(absl::StrFormat("error reading '%s'", path));
  return ss.str();
}

absl::Status WriteFileAtomic(const std::string& path, std::string_view content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      return absl::PermissionDeniedError(
          absl::StrFormat("cannot open '%s' for writing", tmp));
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      return absl::DataLossError(absl::StrFormat("error writing '%s'", tmp));
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    return absl::PermissionDeniedError(absl::StrFormat("cannot rename onto '%s'", path));
  }
  return absl::OkStatus();
}

absl::StatusOr<FiniteMarkovChain> ParseChainJson(std::string_view text) {
  AGEDP_ASSIGN_OR_RETURN(const json doc, ParseJson(text, "chain"));
  return ChainFromJson(doc);
}

std::string ChainToJson(const FiniteMarkovChain& chain) { return Dump(ChainJson(chain)); }

absl::StatusOr<AR1Model> ParseAr1Json(std::string_view text) {
  AGEDP_ASSIGN_OR_RETURN(const json doc, ParseJson(text, "ar1 model"));
  AGEDP_ASSIGN_OR_RETURN(const double rho, GetNumber(doc, "rho", "ar1 model"));
  AGEDP_ASSIGN_OR_RETURN(const double sigma, GetNumber(doc, "sigma", "ar1 model"));
  return AR1Model::Create(rho, sigma);
}

absl::StatusOr<GeometricDecayModel> ParseDecayJson(std::string_view text) {
  AGEDP_ASSIGN_OR_RETURN(const json doc, ParseJson(text, "decay model"));
  AGEDP_ASSIGN_OR_RETURN(const double c, GetNumber(doc, "c", "decay model"));
  AGEDP_ASSIGN_OR_RETURN(const double rho, GetNumber(doc, "rho", "decay model"));
  return GeometricDecayModel::Create(c, rho);
}

absl::StatusOr<PolicySchedule> ParseScheduleJson(std::string_view text) {
  AGEDP_ASSIGN_OR_RETURN(const json doc, ParseJson(text, "schedule"));
  if (!doc.is_array()) {
    return absl::InvalidArgumentError("schedule: expected an array of {S, A, eps_C}");
  }
  std::vector<ScheduleEntry> entries;
  for (size_t n = 0; n < doc.size(); ++n) {
    const std::string where = absl::StrFormat("schedule entry %d", n + 1);
    ScheduleEntry e;
    AGEDP_ASSIGN_OR_RETURN(e.publish_time, GetInteger(doc[n], "S", where));
    AGEDP_ASSIGN_OR_RETURN(e.age, GetInteger(doc[n], "A", where));
    AGEDP_ASSIGN_OR_RETURN(e.eps_c, GetNumber(doc[n], "eps_C", where));
    entries.push_back(e);
  }
  return PolicySchedule::Create(std::move(entries));
}

std::string ScheduleToJson(const PolicySchedule& schedule) {
  return Dump(ScheduleJson(schedule));
}

absl::StatusOr<OptimizationProblem> ParseProblemJson(std::string_view text) {
  constexpr absl::string_view kWhere = "problem";
  AGEDP_ASSIGN_OR_RETURN(const json doc, ParseJson(text, kWhere));
  if (!doc.is_object()) return absl::InvalidArgumentError("problem: expected an object");
  OptimizationProblem problem;
  AGEDP_ASSIGN_OR_RETURN(problem.c, GetNumberOr(doc, "c", problem.c, kWhere));
  AGEDP_ASSIGN_OR_RETURN(problem.rho, GetNumberOr(doc, "rho", problem.rho, kWhere));
  AGEDP_ASSIGN_OR_RETURN(problem.f_bar, GetNumber(doc, "f_bar", kWhere));
  if (doc.contains("K")) {
    AGEDP_ASSIGN_OR_RETURN(const int64_t k, GetInteger(doc, "K", kWhere));
    if (k < 1 || k > 100000000) {
      return absl::InvalidArgumentError("problem: K must be in [1, 1e8]");
    }
    problem.K = static_cast<int>(k);
  }
  AGEDP_ASSIGN_OR_RETURN(problem.phi, GetNumberOr(doc, "phi", problem.phi, kWhere));
  AGEDP_ASSIGN_OR_RETURN(problem.eps_bar,
                         GetNumberOr(doc, "eps_bar", problem.eps_bar, kWhere));
  AGEDP_ASSIGN_OR_RETURN(problem.max_age,
                         GetNumberOr(doc, "max_age", problem.max_age, kWhere));
  if (!doc.contains("penalty")) return absl::InvalidArgumentError("problem: missing 'penalty'");
  AGEDP_ASSIGN_OR_RETURN(problem.penalty, PenaltyFromJson(doc.at("penalty")));
  return problem;
}

std::string SolutionToJson(const OptimizationProblem& problem,
                           const OptimizerSolution& s) {
  json doc = {
      {"problem",
       {{"c", problem.c},
        {"rho", problem.rho},
        {"f_bar", problem.f_bar},
        {"penalty", problem.penalty.name()},
        {"K", problem.K},
        {"phi", problem.phi},
        {"eps_bar", problem.eps_bar}}},
      {"relaxed",
       {{"eps_C", s.eps_c},
        {"A", s.age},
        {"S_bar", s.interval},
        {"objective", Number(s.objective)},
        {"penalty", Number(s.penalty)}}},
      {"rounded",
       {{"A", s.rounded.age},
        {"S_bar", s.rounded.interval},
        {"eps_C", s.eps_c},
        {"objective", Number(s.rounded.objective)},
        {"penalty", Number(s.rounded.penalty)},
        {"feasible", s.rounded.feasible}}},
      {"diagnostics",
       {{"branch", BranchName(s.branch)},
        {"stationarity_residual", s.stationarity_residual},
        {"ceiling_capped", s.ceiling_capped},
        {"penalty_evaluations", s.penalty_evaluations},
        {"feasible_grid_points", s.feasible_grid_points}}}};
  return Dump(doc);
}

std::string ManifestToJson(const RunManifest& m) {
  json doc = {{"command", m.command},
              {"seed", m.seed},
              {"chain_file", m.chain_file},
              {"budgets", m.budgets},
              {"horizon", m.horizon},
              {"num_users", m.num_users}};
  doc["schedule"] = m.schedule.has_value() ? ScheduleJson(*m.schedule) : json(nullptr);
  return Dump(doc);
}

std::string RiskCurveToCsv(const RiskCurve& curve) {
  std::string out = "t,epsilon\n";
  for (size_t t = 0; t < curve.values.size(); ++t) {
    absl::StrAppend(&out, t, ",", FormatDouble(curve.values[t]), "\n");
  }
  return out;
}

std::string RiskCurveToJson(const RiskCurve& curve) {
  json arr = json::array();
  for (size_t t = 0; t < curve.values.size(); ++t) {
    arr.push_back({{"t", t}, {"epsilon", Number(curve.values[t])}});
  }
  return Dump(arr);
}

std::string OutputsToCsv(const std::vector<PublishedOutput>& outputs) {
  const Eigen::Index dim = outputs.empty() ? 1 : outputs.front().value.size();
  std::string out = "query_index,publish_time,input_timestamp";
  if (dim == 1) {
    out += ",value";
  } else {
    for (Eigen::Index d = 0; d < dim; ++d) absl::StrAppend(&out, ",value_", d);
  }
  out += "\n";
  for (const PublishedOutput& o : outputs) {
    absl::StrAppend(&out, o.query_index, ",", o.publish_time, ",", o.input_timestamp);
    for (Eigen::Index d = 0; d < o.value.size(); ++d) {
      absl::StrAppend(&out, ",", FormatDouble(o.value(d)));
    }
    out += "\n";
  }
  return out;
}

std::string OutputsToJson(const std::vector<PublishedOutput>& outputs) {
  json arr = json::array();
  for (const PublishedOutput& o : outputs) {
    arr.push_back({{"query_index", o.query_index},
                   {"publish_time", o.publish_time},
                   {"input_timestamp", o.input_timestamp},
                   {"value", std::vector<double>(o.value.data(),
                                                 o.value.data() + o.value.size())}});
  }
  return Dump(arr);
}

std::string TradeoffToCsv(const std::vector<TradeoffPoint>& points) {
  std::string out = "scheme,knob_t_or_A,knob_S,eps_C,risk,loss,loss_stderr\n";
  for (const TradeoffPoint& p : points) {
    absl::StrAppend(&out, p.scheme, ",", FormatDouble(p.knob_t_or_a), ",",
                    FormatDouble(p.knob_s), ",", FormatDouble(p.eps_c), ",",
                    FormatDouble(p.risk), ",", FormatDouble(p.loss), ",",
                    FormatDouble(p.loss_stderr), "\n");
  }
  return out;
}

std::string TradeoffToJson(const std::vector<TradeoffPoint>& points) {
  json arr = json::array();
  for (const TradeoffPoint& p : points) arr.push_back(PointJson(p));
  return Dump(arr);
}

std::string IngestToJson(const Quantization& q, const std::vector<IngestedChain>& chains) {
  json users = json::array();
  for (const IngestedChain& c : chains) {
    json u = ChainJson(c.estimate.chain);
    u["user_id"] = c.user_id;
    u["irreducible"] = c.estimate.irreducible;
    u["aperiodic"] = c.estimate.aperiodic;
    u["reversible"] = c.estimate.reversible;
    u["reversibilized"] = c.estimate.reversibilized;
    u["unobserved_rows"] = c.estimate.unobserved_rows;
    users.push_back(std::move(u));
  }
  json doc = {{"num_states", q.num_bins},
              {"edges", q.edges},
              {"representatives", q.representatives},
              {"users", std::move(users)}};
  return Dump(doc);
}

std::string AnalyzeToJson(const AnalyzeReport& r) {
  json users = json::array();
  for (const UserSpectrum& u : r.users) {
    users.push_back({{"user_id", u.user_id},
                     {"lambda_star", u.lambda_star},
                     {"prefactor", u.prefactor},
                     {"reversible", u.reversible}});
  }
  json curves = json::array();
  for (size_t e = 0; e < r.eps_list.size(); ++e) {
    json mse = json::array(), se = json::array();
    for (const Estimate& m : r.mse[e]) {
      mse.push_back(m.mean);
      se.push_back(m.std_error);
    }
    curves.push_back({{"eps_C", r.eps_list[e]},
                      {"risk", r.risk[e]},
                      {"mse", std::move(mse)},
                      {"mse_stderr", std::move(se)}});
  }
  json frontier = json::array();
  for (const TradeoffPoint& p : r.frontier) frontier.push_back(PointJson(p));
  json noise = json::array();
  for (const TradeoffPoint& p : r.noise_only) noise.push_back(PointJson(p));
  json doc = {{"num_states", r.num_states},
              {"reversibilized", r.reversibilized},
              {"users", std::move(users)},
              {"delta_bar", r.delta_bar},
              {"curves", std::move(curves)},
              {"noise_only", std::move(noise)},
              {"frontier", std::move(frontier)}};
  return Dump(doc);
}

std::string AnalyzeToCsv(const AnalyzeReport& r) {
  std::string out = "eps_C,t,delta_bar,epsilon,mse,mse_stderr\n";
  for (size_t e = 0; e < r.eps_list.size(); ++e) {
    for (size_t t = 0; t < r.delta_bar.size(); ++t) {
      absl::StrAppend(&out, FormatDouble(r.eps_list[e]), ",", t, ",",
                      FormatDouble(r.delta_bar[t]), ",", FormatDouble(r.risk[e][t]), ",",
                      FormatDouble(r.mse[e][t].mean), ",",
                      FormatDouble(r.mse[e][t].std_error), "\n");
    }
  }
  return out;
}

}  // namespace agedp
