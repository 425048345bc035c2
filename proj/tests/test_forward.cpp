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

#include <doctest.h>

#include <random>

#include "mdport/error.hpp"
#include "mdport/forward.hpp"
#include "test_support.hpp"

using namespace mdport;
using namespace mdport::testing;

namespace {

MarketModel two_asset(const Vector& mu) {
  return MarketModel::from_centered(FiniteProbSpace::uniform(3),
                                    scenarios({{-1, 0}, {0, -1}, {1, 1}}), mu);
}

// min A over D_i x <= A, mu^T x = delta by basis enumeration in (x, A).
double forward_oracle(const PortfolioRiskGenerators& g, const Vector& mu, double delta) {
  const Index n = g.assets();
  const Index m = g.size();
  Matrix a = Matrix::Zero(m + 2, n + 1);
  Vector b = Vector::Zero(m + 2);
  for (Index i = 0; i < m; ++i) {
    a.row(i).head(n) = g.generators[static_cast<std::size_t>(i)].transpose();
    a(i, n) = -1;
  }
  a.row(m).head(n) = mu.transpose();
  b(m) = delta;
  a.row(m + 1).head(n) = -mu.transpose();
  b(m + 1) = -delta;
  return enumerate_minimum(Vector::Unit(n + 1, n), a, b);
}

}  // namespace

TEST_CASE("portfolio risk generators of the two-asset CVaR market") {
  const MarketModel m = two_asset(vec({0, 0.5}));
  const PortfolioRiskGenerators g =
      portfolio_risk_generators(m, build_cvar(m.space, 0.05));
  CHECK(same_points(g.generators, {vec({1, 0}), vec({0, 1}), vec({-1, -1})}, 1e-12));
  CHECK(g.risk(vec({0.3, 0.8})) == doctest::Approx(0.8));
}

TEST_CASE("unique and degenerate forward solutions") {
  const RiskEnvelope cvar = build_cvar(FiniteProbSpace::uniform(3), 0.05);
  const ForwardSolution unique = solve_forward(two_asset(vec({1.0 / 3, 2.0 / 3})), cvar, 0.5);
  CHECK(unique.unique);
  CHECK(max_abs(unique.x - vec({0.5, 0.5})) <= 1e-9);
  CHECK(unique.optimal_value == doctest::Approx(0.5));
  CHECK(unique.certificate.ok);

  const MarketModel m = two_asset(vec({0, 0.5}));
  const PortfolioRiskGenerators g = portfolio_risk_generators(m, cvar);
  const ForwardSolution degenerate = solve_forward(g, m.mu, 0.4);
  CHECK_FALSE(degenerate.unique);
  CHECK(degenerate.optimal_value == doctest::Approx(0.8));
  CHECK(same_points(degenerate.optimal_set.vertices(), {vec({-1.6, 0.8}), vec({0.8, 0.8})},
                    1e-8));
  const UniquenessReport r = diagnose_uniqueness(degenerate, g, m.mu);
  CHECK_FALSE(r.unique);
  CHECK(r.active.size() == 1);
  CHECK(r.consistent);
  CHECK(r.mu_residual <= 1e-9);
}

TEST_CASE("MAD forward solution") {
  const MarketModel m = MarketModel::from_centered(
      FiniteProbSpace::uniform(3), scenarios({{-1, -2}, {-1, 1}, {2, 1}}), vec({0.4, 0.6}));
  const RiskEnvelope mad = build_mad(m.space);
  const ForwardSolution f = solve_forward(m, mad, 0.5);
  CHECK(f.unique);
  CHECK(max_abs(f.x - vec({0.5, 0.5})) <= 1e-9);
  CHECK(mad.evaluate(m.portfolio_return(f.x)) == doctest::Approx(1.0));
}

TEST_CASE("infeasible targets are reported") {
  const RiskEnvelope cvar = build_cvar(FiniteProbSpace::uniform(3), 0.05);
  CHECK_THROWS_AS(solve_forward(two_asset(vec({0, 0})), cvar, 0.5), Error);
  CHECK_THROWS_AS(solve_forward(two_asset(vec({0, 1})), cvar, -0.5), Error);
}

TEST_CASE("random forward problems match the basis-enumeration oracle") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = 2 + trial % 2;
    const Index big_n = 4 + trial % 3;
    const FiniteProbSpace s(random_weights(rng, big_n));
    MarketModel m = random_market(rng, s, n);
    m.mu = gaussian_vector(rng, n);
    const RiskEnvelope env = trial % 2 ? build_mad(s) : build_cvar(s, 0.3);
    const PortfolioRiskGenerators g = portfolio_risk_generators(m, env);
    const double delta = 0.5;
    const ForwardSolution f = solve_forward(g, m.mu, delta);
    CAPTURE(trial);
    CHECK(f.optimal_value == doctest::Approx(forward_oracle(g, m.mu, delta)).epsilon(1e-9));
    CHECK(f.certificate.ok);
    CHECK(std::abs(m.mu.dot(f.x) - delta) <= 1e-9);
    CHECK(f.strong_duality_residual <= 1e-9);
    CHECK(g.risk(f.x) == doctest::Approx(f.optimal_value).epsilon(1e-9));
    CHECK(env.evaluate(m.portfolio_return(f.x)) ==
          doctest::Approx(f.optimal_value).epsilon(1e-9));
    for (const Vector& v : f.optimal_set.vertices()) {
      CHECK(g.risk(v) == doctest::Approx(f.optimal_value).epsilon(1e-8));
    }
    const UniquenessReport r = diagnose_uniqueness(f, g, m.mu);
    CHECK(r.unique == f.unique);
    if (f.unique) CHECK(r.independent.size() == static_cast<std::size_t>(n));
    if (!f.unique) CHECK(r.consistent);
  }
}
