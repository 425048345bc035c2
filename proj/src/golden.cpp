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

#include "mdport/golden.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "mdport/allocation.hpp"
#include "mdport/blacklitterman.hpp"
#include "mdport/error.hpp"
#include "mdport/forward.hpp"
#include "mdport/inverse.hpp"

namespace mdport {

namespace {

constexpr double kTol = 1e-9;

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

// Scenario rows -> n x N matrix.
Matrix scenarios(std::initializer_list<std::initializer_list<double>> rows) {
  const auto big_n = static_cast<Index>(rows.size());
  const auto n = static_cast<Index>(rows.begin()->size());
  Matrix m(n, big_n);
  Index j = 0;
  for (const auto& row : rows) {
    Index i = 0;
    for (double x : row) m(i++, j) = x;
    ++j;
  }
  return m;
}

std::vector<Vector> permutations(Vector v) {
  std::vector<Vector> out;
  std::sort(v.data(), v.data() + v.size());
  do {
    out.push_back(v);
  } while (std::next_permutation(v.data(), v.data() + v.size()));
  return out;
}

class Case {
 public:
  explicit Case(std::string name) { result_.name = std::move(name); }

  void near(double got, double want, const std::string& what, double tol = kTol) {
    const double err = std::abs(got - want);
    note(err, tol, what);
  }
  void near(const Vector& got, const Vector& want, const std::string& what, double tol = kTol) {
    if (got.size() != want.size()) {
      fail_with(what + ": length " + std::to_string(got.size()) + " != " +
                std::to_string(want.size()));
      return;
    }
    note((got - want).cwiseAbs().maxCoeff(), tol, what);
  }
  void same_set(const std::vector<Vector>& got, const std::vector<Vector>& want,
                const std::string& what, double tol = kTol) {
    if (got.size() != want.size()) {
      fail_with(what + ": " + std::to_string(got.size()) + " points, expected " +
                std::to_string(want.size()));
      return;
    }
    double worst = 0.0;
    for (const Vector& w : want) {
      double best = std::numeric_limits<double>::infinity();
      for (const Vector& g : got) best = std::min(best, (g - w).cwiseAbs().maxCoeff());
      worst = std::max(worst, best);
    }
    note(worst, tol, what);
  }
  void check(bool condition, const std::string& what) {
    if (!condition) fail_with(what);
  }
  void fail_with(const std::string& what) {
    failed_ = true;
    if (!result_.detail.empty()) result_.detail += "; ";
    result_.detail += what;
  }
  GoldenResult finish() {
    result_.passed = !failed_;
    if (result_.passed && result_.detail.empty()) result_.detail = "ok";
    return result_;
  }

 private:
  void note(double err, double tol, const std::string& what) {
    result_.max_error = std::max(result_.max_error, err);
    if (!(err <= tol)) {
      std::ostringstream msg;
      msg << what << " off by " << err;
      fail_with(msg.str());
    }
  }

  GoldenResult result_;
  bool failed_ = false;
};

GoldenResult run_case(const std::string& name, const std::function<void(Case&)>& body) {
  Case c(name);
  try {
    body(c);
  } catch (const std::exception& e) {
    c.fail_with(std::string("exception: ") + e.what());
  }
  return c.finish();
}

MarketModel two_asset_market(const Vector& mu, double target) {
  return MarketModel::from_centered(FiniteProbSpace::uniform(3),
                                    scenarios({{-1, 0}, {0, -1}, {1, 1}}), mu, target);
}

MarketModel mad_market() {
  return MarketModel::from_centered(FiniteProbSpace::uniform(3),
                                    scenarios({{-1, -2}, {-1, 1}, {2, 1}}), vec({0.4, 0.6}), 0.5);
}

std::vector<Vector> coalition_vertices() {
  std::vector<Vector> out = permutations(vec({1.5, 1.0, 0.5}));
  for (const Vector& v : permutations(vec({4.0 / 3, 4.0 / 3, 1.0 / 3}))) out.push_back(v);
  return out;
}

RiskEnvelope agent_one() { return build_cvar(FiniteProbSpace::uniform(3), 2.0 / 3); }
RiskEnvelope agent_two() { return scale(build_mad(FiniteProbSpace::uniform(3)), 0.5); }

}  // namespace

std::vector<GoldenResult> run_golden_cases() {
  std::vector<GoldenResult> out;

  out.push_back(run_case("mad-envelope", [](Case& c) {
    for (Index n = 2; n <= 5; ++n) {
      c.check(build_mad(FiniteProbSpace::uniform(n)).size() == (Index{1} << n) - 2,
              "MAD generator count for N = " + std::to_string(n));
    }
    const RiskEnvelope mad = build_mad(FiniteProbSpace::uniform(3));
    c.same_set(mad.generators(),
               {vec({-1.0 / 3, 5.0 / 3, 5.0 / 3}), vec({5.0 / 3, -1.0 / 3, 5.0 / 3}),
                vec({5.0 / 3, 5.0 / 3, -1.0 / 3}), vec({1.0 / 3, 1.0 / 3, 7.0 / 3}),
                vec({1.0 / 3, 7.0 / 3, 1.0 / 3}), vec({7.0 / 3, 1.0 / 3, 1.0 / 3})},
               "uniform N = 3 MAD generators");
  }));

  out.push_back(run_case("cvar-envelope", [](Case& c) {
    c.check(build_cvar(FiniteProbSpace::uniform(6), 2.0 / 6).size() == 15,
            "C(6, 2) generators for alpha = 2/6");
    c.same_set(build_cvar(FiniteProbSpace::uniform(3), 0.05).generators(),
               permutations(vec({3, 0, 0})), "alpha = 0.05 generators");
  }));

  out.push_back(run_case("deviation-and-identifiers", [](Case& c) {
    const FiniteProbSpace space = FiniteProbSpace::uniform(3);
    const Vector x = vec({-1.5, 0, 1.5});
    c.near(space.expectation(x), 0.0, "E[X]");
    const RiskEnvelope mad = build_mad(space);
    c.near(mad.evaluate(x), 1.0, "MAD(X)");
    c.same_set(mad.risk_identifiers(x).polytope.vertices(),
               {vec({7.0 / 3, 1.0 / 3, 1.0 / 3}), vec({5.0 / 3, 5.0 / 3, -1.0 / 3})},
               "MAD identifier segment");
    bool rejected = false;
    try {
      build_envelope(EnvelopeSpec::stddev(), space);
    } catch (const Error& e) {
      rejected = e.code() == ErrorCode::kUnsupported;
    }
    c.check(rejected, "standard deviation must be rejected as unsupported");
  }));

  out.push_back(run_case("coalition-envelope", [](Case& c) {
    const RiskEnvelope coalition = cooperative_envelope({agent_one(), agent_two()});
    c.same_set(coalition.generators(), coalition_vertices(), "intersection vertices");
    const Vector x = vec({-2, 6.0 / 5, 22.0 / 5});
    const RiskIdentifierSet ids = coalition.risk_identifiers(x);
    c.same_set(ids.polytope.vertices(), {vec({1.5, 1, 0.5}), vec({4.0 / 3, 4.0 / 3, 1.0 / 3})},
               "identifier face of X*");
    c.near(coalition.space().expectation(x.cwiseProduct(ids.polytope.vertex(0))), 2.0 / 15,
           "E[Q X*]");
    const SupportResult face = support(coalition.polytope(), -x / 3.0);
    c.check(face.face.size() == 2, "support face of the coalition envelope has two vertices");
    c.near(steiner_point(ids.polytope).point, vec({17.0 / 12, 7.0 / 6, 5.0 / 12}),
           "Steiner point of the identifier face");
  }));

  out.push_back(run_case("forward-problems", [](Case& c) {
    const RiskEnvelope cvar = build_cvar(FiniteProbSpace::uniform(3), 0.05);
    const PortfolioRiskGenerators gens =
        portfolio_risk_generators(two_asset_market(vec({0, 0.5}), 0.4), cvar);
    c.same_set(gens.generators, {vec({1, 0}), vec({0, 1}), vec({-1, -1})},
               "portfolio risk generators");

    const ForwardSolution degenerate = solve_forward(gens, vec({0, 0.5}), 0.4);
    c.near(degenerate.optimal_value, 0.8, "degenerate optimal value");
    c.check(!degenerate.unique, "degenerate problem must have a non-unique optimum");
    c.same_set(degenerate.optimal_set.vertices(), {vec({-1.6, 0.8}), vec({0.8, 0.8})},
               "degenerate optimal face", 1e-8);
    const UniquenessReport report = diagnose_uniqueness(degenerate, gens, vec({0, 0.5}));
    c.check(report.active.size() == 1 && report.consistent,
            "mu must lie in the span of the single active generator");

    const ForwardSolution cv =
        solve_forward(two_asset_market(vec({1.0 / 3, 2.0 / 3}), 0.5), cvar, 0.5);
    c.check(cv.unique, "CVaR forward solution must be unique");
    c.near(cv.x, vec({0.5, 0.5}), "CVaR forward solution");

    const MarketModel market = mad_market();
    const ForwardSolution mad = solve_forward(market, build_mad(market.space), 0.5);
    c.near(mad.x, vec({0.5, 0.5}), "MAD forward solution");
    c.near(market.portfolio_return(mad.x), vec({-1.5, 0, 1.5}), "MAD optimal payoff");
  }));

  out.push_back(run_case("inverse-problems", [](Case& c) {
    const RiskEnvelope cvar = build_cvar(FiniteProbSpace::uniform(3), 0.05);
    const MarketModel two = two_asset_market(vec({1.0 / 3, 2.0 / 3}), 0.5);

    const InverseSolutionSet degenerate = inverse_solution_set(two, cvar, vec({0.2, 0.8}), 0.4);
    c.check(degenerate.polytope.is_singleton(), "inverse set must be a singleton");
    c.near(degenerate.polytope.vertex(0), vec({0, 0.5}), "unique inverse solution");
    c.check(degenerate.all_verified(), "inverse solution re-solves");
    c.check(verify_dichotomy(two, cvar, vec({0.2, 0.8}), 0.4).branch == 2,
            "degenerate case is the single-active-generator branch");

    const RobustMu cv = robust_mu(two, cvar, vec({0.5, 0.5}), 0.5);
    c.same_set(cv.set.polytope.vertices(), {vec({0, 1}), vec({1, 0})}, "CVaR inverse set");
    c.same_set(cvar.risk_identifiers(vec({-0.5, -0.5, 1})).polytope.vertices(),
               {vec({3, 0, 0}), vec({0, 3, 0})}, "CVaR identifier family");
    c.near(cv.selector.q, vec({1.5, 1.5, 0}), "CVaR robust selector");
    c.near(cv.mu, vec({0.5, 0.5}), "CVaR robust mu");
    c.near(law_invariant_selector(cvar, vec({-0.5, -0.5, 1})), vec({1.5, 1.5, 0}),
           "CVaR law-invariant selector");

    const MarketModel market = mad_market();
    const RobustMu mad = robust_mu(market, build_mad(market.space), vec({0.5, 0.5}), 0.5);
    c.same_set(mad.set.polytope.vertices(), {vec({0.5 + 1.0 / 6, 0.5 - 1.0 / 6}),
                                             vec({0.5 - 1.0 / 6, 0.5 + 1.0 / 6})},
               "MAD inverse set");
    c.near(mad.selector.q, vec({2, 1, 0}), "MAD robust selector");
    c.near(mad.mu, vec({0.5, 0.5}), "MAD robust mu");
    c.check(mad.in_set && cv.in_set, "robust mu lies in the inverse set");
  }));

  out.push_back(run_case("black-litterman", [](Case& c) {
    const MarketModel prior = two_asset_market(vec({0, 0}), 0.4);
    const BlResult none = bl_pipeline(prior, EnvelopeSpec::cvar(0.05), vec({0.2, 0.8}), 0.4,
                                      std::nullopt, std::nullopt);
    c.near(none.mu_eq, vec({0, 0.5}), "equilibrium mu");
    c.check(!none.forward.unique, "no-view problem is degenerate");
    c.same_set(none.forward.optimal_set.vertices(), {vec({-1.6, 0.8}), vec({0.8, 0.8})},
               "no-view optimal face", 1e-8);

    const BlResult post = bl_pipeline(prior, EnvelopeSpec::cvar(0.05), vec({0.2, 0.8}), 0.4,
                                      std::nullopt, vec({0.25, 0.25, 0.5}));
    c.near(post.mu_post, vec({0.25, 0.75}), "posterior mean");
    const Matrix& r = post.posterior_market.centered_returns;
    c.near(r.col(0), vec({-1.25, -0.25}), "posterior scenario 1");
    c.near(r.col(1), vec({-0.25, -1.25}), "posterior scenario 2");
    c.near(r.col(2), vec({0.75, 0.75}), "posterior scenario 3");
    c.check(post.forward.unique, "posterior optimum is unique");
    c.near(post.forward.x, vec({0.4, 0.4}), "posterior optimum");
    const PortfolioRiskGenerators gens = portfolio_risk_generators(
        post.posterior_market, build_envelope(EnvelopeSpec::cvar(0.05), post.posterior));
    std::vector<Vector> active;
    for (Index i : post.forward.active) active.push_back(gens.generators[static_cast<std::size_t>(i)]);
    c.same_set(active, {vec({1.25, 0.25}), vec({0.25, 1.25})}, "active posterior generators");
  }));

  out.push_back(run_case("cooperative-investment", [](Case& c) {
    Matrix returns(2, 3);
    returns << -1, 1, 1, -1, -1, 7;
    const std::vector<RiskEnvelope> agents = {agent_one(), agent_two()};
    const CooperativeSolution sol = fair_side_payments(solve_cooperative(returns, agents));
    c.near(sol.individual[0].x(1), 0.0, "agent 1 individual t");
    c.near(sol.individual[0].utility, 0.0, "agent 1 individual utility");
    c.near(sol.individual[1].x(1), 0.2, "agent 2 individual t");
    c.near(sol.individual[1].utility, 1.0 / 15, "agent 2 individual utility");
    c.near(sol.x(1), 0.2, "cooperative t");
    c.near(sol.payoff, vec({-2, 6.0 / 5, 22.0 / 5}), "joint payoff");
    c.near(sol.coalition_utility, 2.0 / 15, "coalition utility");
    c.same_set(sol.coalition.generators(), coalition_vertices(), "coalition envelope");
    c.near(sol.critical_scenario.point, vec({17.0 / 12, 7.0 / 6, 5.0 / 12}), "critical scenario");
    c.near(sol.side_payments[0], -1.0 / 15, "side payment");
    c.near(sol.final_shares[0], vec({1.0 / 15, 1.0 / 15, 1.0 / 15}), "final share 1");
    c.near(sol.final_shares[1], vec({-31.0 / 15, 17.0 / 15, 13.0 / 3}), "final share 2");
  }));

  return out;
}

}  // namespace mdport
