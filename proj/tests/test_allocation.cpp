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

#include "mdport/allocation.hpp"
#include "mdport/error.hpp"
#include "test_support.hpp"

using namespace mdport;
using namespace mdport::testing;

TEST_CASE("MAD capital allocation of symmetric subportfolios") {
  const RiskEnvelope mad = build_mad(FiniteProbSpace::uniform(3));
  const CapitalAllocationResult a =
      capital_allocation(mad.as_risk_function(), {vec({-1, 0, 1}), vec({-0.5, 0, 0.5})});
  CHECK(a.total_risk == doctest::Approx(1.0));
  CHECK(a.contributions[0] == doctest::Approx(2.0 / 3));
  CHECK(a.contributions[1] == doctest::Approx(1.0 / 3));
  CHECK(max_abs(a.gradient.point - vec({-1.0 / 3, 0, 1.0 / 3})) <= 1e-12);
}

TEST_CASE("allocation is full and diversified on random portfolios") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 30; ++trial) {
    const FiniteProbSpace s = FiniteProbSpace::uniform(4);
    const RiskEnvelope env = trial % 2 ? build_mad(s) : build_cvar(s, 0.5);
    std::vector<RandomVariable> parts;
    for (int k = 0; k < 3; ++k) parts.push_back(gaussian_vector(rng, 4));
    const CapitalAllocationResult a =
        capital_allocation(env.as_risk_function(), parts, {4096, 9, 1, false});
    double sum = 0.0;
    for (std::size_t k = 0; k < parts.size(); ++k) {
      sum += a.contributions[k];
      CHECK(a.contributions[k] <= env.evaluate(parts[k]) + 1e-8);
    }
    CHECK(sum == doctest::Approx(a.total_risk).epsilon(1e-8));
  }
}

TEST_CASE("non-homogeneous risk functions are rejected") {
  const PwlConvexFunction affine({vec({1, 0}), vec({0, 1})}, {1.0, 0.0});
  CHECK_THROWS_AS(capital_allocation(affine, {vec({1, 0})}), Error);
}

TEST_CASE("cooperative envelope is the intersection of the agents' envelopes") {
  const FiniteProbSpace s = FiniteProbSpace::uniform(3);
  const RiskEnvelope both =
      cooperative_envelope({build_cvar(s, 2.0 / 3), scale(build_mad(s), 0.5)});
  CHECK(both.size() == 9);
  std::mt19937_64 rng(71);
  const RiskEnvelope a = build_cvar(s, 2.0 / 3);
  const RiskEnvelope b = scale(build_mad(s), 0.5);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector x = gaussian_vector(rng, 3);
    CHECK(both.evaluate(x) <= std::min(a.evaluate(x), b.evaluate(x)) + 1e-12);
  }
}

TEST_CASE("cooperative investment with fair side payments") {
  Matrix returns(2, 3);
  returns << -1, 1, 1, -1, -1, 7;
  const FiniteProbSpace s = FiniteProbSpace::uniform(3);
  const CooperativeSolution sol = fair_side_payments(
      solve_cooperative(returns, {build_cvar(s, 2.0 / 3), scale(build_mad(s), 0.5)}));
  CHECK(sol.synergy);
  CHECK(sol.coalition_utility == doctest::Approx(2.0 / 15));
  CHECK(sol.side_payments[0] + sol.side_payments[1] == doctest::Approx(0.0));
  CHECK(sol.side_payments[0] == doctest::Approx(-1.0 / 15));
  CHECK(max_abs(sol.final_shares[0] + sol.final_shares[1] - sol.payoff) <= 1e-12);
  double total = 0.0;
  for (double u : sol.final_utilities) total += u;
  CHECK(total == doctest::Approx(sol.coalition_utility));
  for (std::size_t i = 0; i < sol.individual.size(); ++i) {
    CHECK(sol.final_utilities[i] >= sol.individual[i].utility - 1e-12);
  }
}
