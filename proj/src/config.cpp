// Copyright 2026 The mdport Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mdport/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mdport/error.hpp"

namespace mdport {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
  fail(ErrorCode::kParseError, "config " + where + ": " + what);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) schema_error(where, "expected a number");
  return j.get<double>();
}

Vector vector_of(const json& j, const std::string& where) {
  if (!j.is_array()) schema_error(where, "expected an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Index>(i)) = number(j[i], where + "[" + std::to_string(i) + "]");
  }
  return v;
}

std::vector<Vector> rows_of(const json& j, const std::string& where) {
  if (!j.is_array()) schema_error(where, "expected an array of arrays");
  std::vector<Vector> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(vector_of(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Matrix matrix_of(const json& j, const std::string& where) {
  const std::vector<Vector> rows = rows_of(j, where);
  if (rows.empty()) return Matrix(0, 0);
  Matrix m(static_cast<Index>(rows.size()), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) schema_error(where, "ragged rows");
    m.row(static_cast<Index>(i)) = rows[i].transpose();
  }
  return m;
}

EnvelopeSpec envelope_of(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    schema_error(where, "envelope needs a string \"kind\"");
  }
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "mad") return EnvelopeSpec::mad();
  if (kind == "cvar") return EnvelopeSpec::cvar(number(j.value("alpha", json()), where + ".alpha"));
  if (kind == "stddev") return EnvelopeSpec::stddev();
  if (kind == "mixed_cvar") {
    if (!j.contains("terms") || !j["terms"].is_array()) schema_error(where, "missing \"terms\"");
    std::vector<double> alphas;
    std::vector<double> lambdas;
    for (const json& t : j["terms"]) {
      alphas.push_back(number(t.value("alpha", json()), where + ".terms.alpha"));
      lambdas.push_back(number(t.value("lambda", json()), where + ".terms.lambda"));
    }
    return EnvelopeSpec::mixed_cvar(alphas, lambdas);
  }
  if (kind == "scale") {
    if (!j.contains("inner")) schema_error(where, "missing \"inner\"");
    return EnvelopeSpec::scaled(number(j.value("lambda", json()), where + ".lambda"),
                                envelope_of(j["inner"], where + ".inner"));
  }
  if (kind == "mix" || kind == "max") {
    if (!j.contains("parts") || !j["parts"].is_array()) schema_error(where, "missing \"parts\"");
    std::vector<EnvelopeSpec> parts;
    std::vector<double> lambdas;
    for (std::size_t i = 0; i < j["parts"].size(); ++i) {
      const json& p = j["parts"][i];
      const std::string at = where + ".parts[" + std::to_string(i) + "]";
      if (kind == "mix") {
        lambdas.push_back(number(p.value("lambda", json()), at + ".lambda"));
        if (!p.contains("envelope")) schema_error(at, "missing \"envelope\"");
        parts.push_back(envelope_of(p["envelope"], at + ".envelope"));
      } else {
        parts.push_back(envelope_of(p, at));
      }
    }
    return kind == "mix" ? EnvelopeSpec::mix(parts, lambdas) : EnvelopeSpec::max(parts);
  }
  if (kind == "custom") {
    if (!j.contains("generators")) schema_error(where, "missing \"generators\"");
    return EnvelopeSpec::custom(rows_of(j["generators"], where + ".generators"));
  }
  schema_error(where, "unknown envelope kind \"" + kind + "\"");
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kParseError, what + " is not valid JSON: " + e.what());
  }
}

}  // namespace

const FiniteProbSpace& RunConfig::require_space() const {
  require(space.has_value(), ErrorCode::kInvalidArgument, "config has no probability space");
  return *space;
}

const Matrix& RunConfig::require_returns() const {
  require(returns.has_value(), ErrorCode::kInvalidArgument, "config has no returns");
  return *returns;
}

const EnvelopeSpec& RunConfig::require_measure() const {
  require(measure.has_value(), ErrorCode::kInvalidArgument, "config has no \"measure\"");
  return *measure;
}

MarketModel RunConfig::market() const {
  const Matrix& r = require_returns();
  const FiniteProbSpace& s = require_space();
  require(r.cols() == s.size(), ErrorCode::kDimensionMismatch,
          "returns have " + std::to_string(r.cols()) + " scenarios, space has " +
              std::to_string(s.size()));
  const double target = delta.value_or(delta_market.value_or(0.0));
  if (centered) {
    return MarketModel::from_centered(s, r, mu.value_or(Vector::Zero(r.rows())), target);
  }
  MarketModel m = center_market(r, s, riskless_rate, target);
  if (mu) {
    require(mu->size() == m.assets(), ErrorCode::kDimensionMismatch, "mu length");
    m.mu = *mu;
  }
  return m;
}

RunConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  const json j = parse_json(json_text, "config");
  if (!j.is_object()) schema_error("root", "expected an object");
  RunConfig cfg;
  cfg.schema = j.value("schema", 1);
  if (cfg.schema != 1) schema_error("schema", "only schema 1 is supported");

  if (j.contains("space")) {
    const json& s = j["space"];
    if (s.contains("uniform")) {
      if (!s["uniform"].is_number_integer()) schema_error("space.uniform", "expected an integer");
      cfg.space = FiniteProbSpace::uniform(s["uniform"].get<Index>());
    } else if (s.contains("weights")) {
      cfg.space = FiniteProbSpace(vector_of(s["weights"], "space.weights"));
    } else {
      schema_error("space", "expected \"uniform\" or \"weights\"");
    }
  }

  if (j.contains("returns")) {
    const json& r = j["returns"];
    const bool inline_rows = r.contains("scenarios");
    const bool from_csv = r.contains("csv");
    if (inline_rows == from_csv) {
      schema_error("returns", "exactly one of \"scenarios\" and \"csv\" is required");
    }
    if (inline_rows) {
      cfg.returns = matrix_of(r["scenarios"], "returns.scenarios").transpose();
    } else {
      if (!r["csv"].is_string()) schema_error("returns.csv", "expected a path");
      std::filesystem::path path = r["csv"].get<std::string>();
      if (path.is_relative()) path = base_dir / path;
      ScenarioTable table = ingest_csv(path);
      if (!cfg.space) cfg.space = table.space;
      cfg.returns = std::move(table.returns);
    }
    cfg.centered = r.value("centered", true);
    if (r.contains("riskless_rate")) cfg.riskless_rate = number(r["riskless_rate"], "returns.riskless_rate");
  }

  if (j.contains("measure")) cfg.measure = envelope_of(j["measure"], "measure");
  if (j.contains("mu")) cfg.mu = vector_of(j["mu"], "mu");
  if (j.contains("delta")) cfg.delta = number(j["delta"], "delta");
  if (j.contains("x_market")) cfg.x_market = vector_of(j["x_market"], "x_market");
  if (j.contains("delta_market")) cfg.delta_market = number(j["delta_market"], "delta_market");

  if (j.contains("views")) {
    const json& v = j["views"];
    if (v.contains("posterior_weights")) {
      cfg.posterior_weights = vector_of(v["posterior_weights"], "views.posterior_weights");
    } else {
      Views views;
      views.pick = matrix_of(v.value("pick", json::array()), "views.pick");
      views.values = vector_of(v.value("values", json::array()), "views.values");
      views.noise_cov = matrix_of(v.value("noise_cov", json::array()), "views.noise_cov");
      if (views.pick.rows() == 0) {
        views.pick.resize(0, 0);
        views.noise_cov.resize(0, 0);
      }
      cfg.views = std::move(views);
    }
  }

  if (j.contains("agents")) {
    if (!j["agents"].is_array()) schema_error("agents", "expected an array");
    for (std::size_t i = 0; i < j["agents"].size(); ++i) {
      const json& a = j["agents"][i];
      const std::string at = "agents[" + std::to_string(i) + "]";
      if (!a.contains("measure")) schema_error(at, "missing \"measure\"");
      cfg.agents.push_back(envelope_of(a["measure"], at + ".measure"));
    }
  }
  if (j.contains("capital")) cfg.capital = number(j["capital"], "capital");

  if (j.contains("selector")) {
    if (!j["selector"].is_string()) schema_error("selector", "expected a string");
    cfg.selector = j["selector"].get<std::string>();
    if (cfg.selector != "robust" && cfg.selector != "law_invariant" && cfg.selector != "steiner") {
      schema_error("selector", "expected robust, law_invariant or steiner");
    }
  }
  if (j.contains("payoff")) cfg.payoff = vector_of(j["payoff"], "payoff");
  if (j.contains("subportfolios")) cfg.subportfolios = rows_of(j["subportfolios"], "subportfolios");
  if (j.contains("vertices")) cfg.vertices = rows_of(j["vertices"], "vertices");

  if (j.contains("mc_samples")) {
    if (!j["mc_samples"].is_number_unsigned()) schema_error("mc_samples", "expected a count");
    cfg.steiner.samples = j["mc_samples"].get<std::size_t>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) schema_error("seed", "expected a non-negative integer");
    cfg.steiner.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("workers")) {
    if (!j["workers"].is_number_unsigned()) schema_error("workers", "expected a count");
    cfg.steiner.workers = j["workers"].get<unsigned>();
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream file(path);
  require(file.good(), ErrorCode::kParseError, "cannot open config " + path.string());
  std::stringstream buffer;
  buffer << file.rdbuf();
  return parse_config(buffer.str(), path.parent_path());
}

EnvelopeSpec parse_envelope_spec(const std::string& json_text) {
  return envelope_of(parse_json(json_text, "envelope"), "measure");
}

std::vector<Vector> parse_points(const std::string& json_text) {
  return rows_of(parse_json(json_text, "vertex list"), "vertices");
}

}  // namespace mdport
