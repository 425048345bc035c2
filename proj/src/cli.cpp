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

#include "mdport/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "mdport/allocation.hpp"
#include "mdport/blacklitterman.hpp"
#include "mdport/config.hpp"
#include "mdport/error.hpp"
#include "mdport/forward.hpp"
#include "mdport/golden.hpp"
#include "mdport/inverse.hpp"

namespace mdport::cli {

namespace {

using json = nlohmann::ordered_json;

// 12 significant digits; the shortest round-trip form of the rounded value
// is what the serializer prints.
double round12(double v) {
  if (!std::isfinite(v)) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round12(v);
}

json vec(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(num(v(i)));
  return out;
}

json points(const std::vector<Vector>& ps) {
  json out = json::array();
  for (const Vector& p : ps) out.push_back(vec(p));
  return out;
}

json indices(const std::vector<Index>& idx) {
  json out = json::array();
  for (Index i : idx) out.push_back(i);
  return out;
}

json strings(const std::vector<std::string>& s) {
  json out = json::array();
  for (const std::string& x : s) out.push_back(x);
  return out;
}

json steiner_json(const SteinerResult& s) {
  return {{"point", vec(s.point)},
          {"std_error", vec(s.std_error)},
          {"exact", s.exact},
          {"samples", s.samples}};
}

json certificate_json(const lp::Certificate& c) {
  return {{"primal_infeasibility", num(c.primal_infeasibility)},
          {"dual_infeasibility", num(c.dual_infeasibility)},
          {"complementary_slackness", num(c.complementary_slackness)},
          {"duality_gap", num(c.duality_gap)},
          {"ok", c.ok}};
}

json forward_json(const ForwardSolution& f) {
  return {{"x", vec(f.x)},
          {"optimal_value", num(f.optimal_value)},
          {"unique", f.unique},
          {"optimal_set", points(f.optimal_set.vertices())},
          {"active", indices(f.active)},
          {"generator_duals", vec(f.generator_duals)},
          {"return_dual", num(f.return_dual)},
          {"binding_residual", num(f.binding_residual)},
          {"strong_duality_residual", num(f.strong_duality_residual)},
          {"iterations", f.iterations},
          {"certificate", certificate_json(f.certificate)}};
}

json uniqueness_json(const UniquenessReport& u) {
  return {{"unique", u.unique},
          {"active", indices(u.active)},
          {"active_rank", u.active_rank},
          {"independent", indices(u.independent)},
          {"mu_residual", num(u.mu_residual)},
          {"consistent", u.consistent},
          {"narrative", u.narrative}};
}

json selector_json(const SelectorResult& s) {
  return {{"q", vec(s.q)},
          {"exact", s.exact},
          {"std_error", vec(s.std_error)},
          {"method", s.method},
          {"diagnostics", strings(s.diagnostics)}};
}

json inverse_json(const InverseSolutionSet& m) {
  json verified = json::array();
  for (bool v : m.verified) verified.push_back(static_cast<bool>(v));
  return {{"vertices", points(m.polytope.vertices())},
          {"delta_scale", num(m.delta_scale)},
          {"deviation", num(m.deviation)},
          {"active", indices(m.active)},
          {"verified", verified}};
}

json dichotomy_json(const DichotomyReport& d) {
  return {{"branch", d.branch},
          {"forward_unique", d.forward_unique},
          {"assets", d.assets},
          {"inverse_vertices", d.inverse_vertices},
          {"active_generators", d.active_generators},
          {"face_vertices", d.face_vertices},
          {"face_dimension", d.face_dimension},
          {"violations", strings(d.violations)}};
}

void print_diagnostics(std::ostream& err, const std::vector<std::string>& notes) {
  for (const std::string& n : notes) err << "note: " << n << '\n';
}

// Flags shared by every subcommand.
struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<unsigned> workers;

  void attach(CLI::App* app, bool config_required) {
    auto* opt = app->add_option("--config", config_path, "JSON run configuration");
    if (config_required) opt->required();
    app->add_option("--seed", seed, "Monte-Carlo seed (overrides the config)");
    app->add_option("--samples", samples, "Monte-Carlo sample count");
    app->add_option("--workers", workers, "Monte-Carlo worker threads");
  }

  RunConfig load() const {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    apply(cfg.steiner);
    return cfg;
  }

  void apply(SteinerConfig& s) const {
    if (seed) s.seed = *seed;
    if (samples) s.samples = *samples;
    if (workers) s.workers = *workers;
  }
};

double require_value(const std::optional<double>& v, const char* name) {
  require(v.has_value(), ErrorCode::kParseError, std::string("config is missing \"") + name + "\"");
  return *v;
}

const Vector& require_vector(const std::optional<Vector>& v, const char* name) {
  require(v.has_value(), ErrorCode::kParseError, std::string("config is missing \"") + name + "\"");
  return *v;
}

json cmd_forward(const RunConfig& cfg, std::ostream& err) {
  const MarketModel market = cfg.market();
  const RiskEnvelope env = build_envelope(cfg.require_measure(), market.space);
  print_diagnostics(err, env.diagnostics());
  const double delta = require_value(cfg.delta, "delta");
  const PortfolioRiskGenerators gens = portfolio_risk_generators(market, env);
  const ForwardSolution f = solve_forward(gens, market.mu, delta);
  const UniquenessReport u = diagnose_uniqueness(f, gens, market.mu);
  err << u.narrative << '\n';
  json out = forward_json(f);
  out["measure"] = env.spec().label();
  out["mu"] = vec(market.mu);
  out["delta"] = num(delta);
  out["generators"] = points(gens.generators);
  out["diagnosis"] = uniqueness_json(u);
  return out;
}

json cmd_inverse(const RunConfig& cfg, std::ostream& err) {
  const MarketModel market = cfg.market();
  const RiskEnvelope env = build_envelope(cfg.require_measure(), market.space);
  print_diagnostics(err, env.diagnostics());
  const Vector& x_m = require_vector(cfg.x_market, "x_market");
  const double d_m = require_value(cfg.delta_market, "delta_market");
  const RobustMu r = robust_mu(market, env, x_m, d_m, cfg.steiner);
  const DichotomyReport d =
      analyze_dichotomy(portfolio_risk_generators(market, env), x_m, d_m);
  print_diagnostics(err, r.selector.diagnostics);
  for (const std::string& v : d.violations) err << "warning: " << v << '\n';
  json out;
  out["measure"] = env.spec().label();
  out["inverse_set"] = inverse_json(r.set);
  out["robust_mu"] = vec(r.mu);
  out["in_set"] = r.in_set;
  out["selector"] = selector_json(r.selector);
  out["dichotomy"] = dichotomy_json(d);
  return out;
}

json cmd_selector(const RunConfig& cfg, std::ostream& err) {
  const FiniteProbSpace& space = cfg.require_space();
  const RiskEnvelope env = build_envelope(cfg.require_measure(), space);
  print_diagnostics(err, env.diagnostics());
  RandomVariable x;
  if (cfg.payoff) {
    x = *cfg.payoff;
  } else {
    x = cfg.market().portfolio_return(require_vector(cfg.x_market, "payoff or x_market"));
  }
  space.check_dimension(x, "payoff");
  const RiskIdentifierSet ids = env.risk_identifiers(x);
  SelectorResult s;
  if (cfg.selector == "robust") {
    s = robust_selector(env, x, cfg.steiner);
  } else if (cfg.selector == "steiner") {
    s = steiner_selector(env, x, cfg.steiner);
  } else if (cfg.selector == "law_invariant") {
    s.q = law_invariant_selector(env, x);
    s.std_error = Vector::Zero(x.size());
    s.method = "law_invariant";
  } else {
    fail(ErrorCode::kParseError, "unknown selector \"" + cfg.selector + "\"");
  }
  print_diagnostics(err, s.diagnostics);
  json out = selector_json(s);
  out["selector"] = cfg.selector;
  out["measure"] = env.spec().label();
  out["deviation"] = num(ids.deviation);
  out["identifiers"] = points(ids.polytope.vertices());
  out["gap"] = num(identifier_gap(env, x, s.q));
  return out;
}

json cmd_steiner(const RunConfig& cfg, const std::string& inline_vertices) {
  const std::vector<Vector> pts = inline_vertices.empty() ? cfg.vertices
                                                          : parse_points(inline_vertices);
  require(!pts.empty(), ErrorCode::kParseError, "no vertices given (--vertices or config)");
  const VPolytope p = VPolytope::from_points(pts);
  json out = steiner_json(steiner_point(p, cfg.steiner));
  out["vertices"] = points(p.vertices());
  out["affine_dimension"] = p.affine_dimension();
  return out;
}

json cmd_alloc(const RunConfig& cfg, std::ostream& err) {
  const FiniteProbSpace& space = cfg.require_space();
  const RiskEnvelope env = build_envelope(cfg.require_measure(), space);
  print_diagnostics(err, env.diagnostics());
  require(!cfg.subportfolios.empty(), ErrorCode::kParseError,
          "config is missing \"subportfolios\"");
  for (const Vector& x : cfg.subportfolios) space.check_dimension(x, "subportfolio");
  const CapitalAllocationResult a =
      capital_allocation(env.as_risk_function(), cfg.subportfolios, cfg.steiner);
  double sum = 0.0;
  json standalone = json::array();
  for (const Vector& x : cfg.subportfolios) standalone.push_back(num(env.evaluate(x)));
  for (double k : a.contributions) sum += k;
  json contributions = json::array();
  for (double k : a.contributions) contributions.push_back(num(k));
  return {{"measure", env.spec().label()},
          {"contributions", contributions},
          {"total_risk", num(a.total_risk)},
          {"contribution_sum", num(sum)},
          {"standalone_risk", standalone},
          {"gradient", steiner_json(a.gradient)}};
}

json cmd_coop(const RunConfig& cfg, std::ostream& err) {
  const FiniteProbSpace& space = cfg.require_space();
  const Matrix& returns = cfg.require_returns();
  require(returns.cols() == space.size(), ErrorCode::kDimensionMismatch,
          "returns and space disagree on the scenario count");
  require(cfg.agents.size() >= 2, ErrorCode::kParseError, "need at least two agents");
  std::vector<RiskEnvelope> envs;
  for (const EnvelopeSpec& spec : cfg.agents) {
    envs.push_back(build_envelope(spec, space));
    print_diagnostics(err, envs.back().diagnostics());
  }
  const CooperativeSolution s =
      fair_side_payments(solve_cooperative(returns, envs, cfg.capital), cfg.steiner);
  json individual = json::array();
  for (const IndividualOptimum& o : s.individual) {
    individual.push_back(
        {{"x", vec(o.x)}, {"payoff", vec(o.payoff)}, {"utility", num(o.utility)}});
  }
  json agents = json::array();
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    agents.push_back({{"measure", s.agents[i].spec().label()},
                      {"share", vec(s.shares[i])},
                      {"utility", num(s.utilities[i])},
                      {"side_payment", num(s.side_payments[i])},
                      {"final_share", vec(s.final_shares[i])},
                      {"final_utility", num(s.final_utilities[i])}});
  }
  double individual_sum = 0.0;
  for (const IndividualOptimum& o : s.individual) individual_sum += o.utility;
  if (!s.synergy) err << "warning: cooperation does not improve on the individual optima\n";
  return {{"x", vec(s.x)},
          {"payoff", vec(s.payoff)},
          {"coalition_utility", num(s.coalition_utility)},
          {"individual_utility_sum", num(individual_sum)},
          {"synergy", s.synergy},
          {"individual", individual},
          {"coalition_envelope", points(s.coalition.generators())},
          {"identifiers", points(s.identifiers.polytope.vertices())},
          {"critical_scenario", steiner_json(s.critical_scenario)},
          {"agents", agents}};
}

json cmd_bl(const RunConfig& cfg, std::ostream& err) {
  const MarketModel market = cfg.market();
  const Vector& x_m = require_vector(cfg.x_market, "x_market");
  const double d_m = require_value(cfg.delta_market, "delta_market");
  const BlResult r = bl_pipeline(market, cfg.require_measure(), x_m, d_m, cfg.views,
                                 cfg.posterior_weights, cfg.steiner);
  err << r.narrative << '\n';
  json out;
  out["measure"] = cfg.require_measure().label();
  out["mu_eq"] = vec(r.mu_eq);
  out["posterior_weights"] = vec(r.posterior.weights());
  out["mu_post"] = vec(r.mu_post);
  json cols = json::array();
  for (Index j = 0; j < r.posterior_market.scenarios(); ++j) {
    cols.push_back(vec(r.posterior_market.centered_returns.col(j)));
  }
  out["posterior_scenarios"] = cols;
  out["forward"] = forward_json(r.forward);
  out["diagnosis"] = uniqueness_json(r.diagnosis);
  return out;
}

json cmd_paper_examples(std::ostream& err, bool& all_passed) {
  const std::vector<GoldenResult> results = run_golden_cases();
  json cases = json::array();
  all_passed = true;
  for (const GoldenResult& r : results) {
    all_passed = all_passed && r.passed;
    char line[160];
    std::snprintf(line, sizeof line, "%-28s %s  max_error=%.3g", r.name.c_str(),
                  r.passed ? "PASS" : "FAIL", r.max_error);
    err << line << "  " << r.detail << '\n';
    cases.push_back({{"name", r.name},
                     {"passed", r.passed},
                     {"max_error", num(r.max_error)},
                     {"detail", r.detail}});
  }
  return {{"passed", all_passed}, {"cases", cases}};
}

json error_json(std::string_view code, const std::string& message) {
  return {{"error", {{"code", std::string(code)}, {"message", message}}}};
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mean-deviation portfolio optimization on finite scenario spaces", "mdport"};
  app.require_subcommand(1);

  Common forward, inverse, selector, steiner, alloc, coop, bl;
  forward.attach(app.add_subcommand("forward", "Minimum-deviation portfolio for a target mean"),
                 true);
  inverse.attach(app.add_subcommand("inverse", "Expected returns implied by a market portfolio"),
                 true);
  selector.attach(app.add_subcommand("selector", "Select a risk identifier for a payoff"), true);
  CLI::App* steiner_cmd = app.add_subcommand("steiner", "Steiner point of a polytope");
  steiner.attach(steiner_cmd, false);
  std::string vertices;
  steiner_cmd->add_option("--vertices", vertices, "JSON array of points");
  alloc.attach(app.add_subcommand("alloc", "Capital allocation by extended gradient"), true);
  coop.attach(app.add_subcommand("coop", "Cooperative investment with fair side payments"), true);
  bl.attach(app.add_subcommand("bl", "Scenario-reweighting Black-Litterman pipeline"), true);
  CLI::App* examples = app.add_subcommand("paper-examples", "Run the golden regression cases");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    out << error_json("ParseError", e.what()).dump(2) << '\n';
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    json result;
    int code = 0;
    if (app.got_subcommand("forward")) {
      result = cmd_forward(forward.load(), err);
    } else if (app.got_subcommand("inverse")) {
      result = cmd_inverse(inverse.load(), err);
    } else if (app.got_subcommand("selector")) {
      result = cmd_selector(selector.load(), err);
    } else if (app.got_subcommand("steiner")) {
      result = cmd_steiner(steiner.load(), vertices);
    } else if (app.got_subcommand("alloc")) {
      result = cmd_alloc(alloc.load(), err);
    } else if (app.got_subcommand("coop")) {
      result = cmd_coop(coop.load(), err);
    } else if (app.got_subcommand("bl")) {
      result = cmd_bl(bl.load(), err);
    } else if (examples->parsed()) {
      bool passed = false;
      result = cmd_paper_examples(err, passed);
      code = passed ? 0 : 2;
    }
    out << result.dump(2) << '\n';
    return code;
  } catch (const Error& e) {
    out << error_json(to_string(e.code()), e.what()).dump(2) << '\n';
    err << "error: " << e.what() << '\n';
    return is_validation_error(e.code()) ? 1 : 2;
  } catch (const nlohmann::json::exception& e) {
    out << error_json("ParseError", e.what()).dump(2) << '\n';
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    out << error_json("InternalError", e.what()).dump(2) << '\n';
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

int run(int argc, const char* const* argv) { return run(argc, argv, std::cout, std::cerr); }

}  // namespace mdport::cli
