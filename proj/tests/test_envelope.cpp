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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mdport/envelope.hpp"
#include "mdport/error.hpp"
#include "test_support.hpp"

using namespace mdport;
using namespace mdport::testing;

namespace {

double mad_oracle(const FiniteProbSpace& s, const Vector& x) {
  const double m = s.expectation(x);
  return s.expectation((x.array() - m).abs().matrix());
}

// E[X] minus the mean of the lower alpha-tail of X.
double cvar_oracle(const FiniteProbSpace& s, const Vector& x, double alpha) {
  std::vector<Index> order(static_cast<std::size_t>(x.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return x(a) < x(b); });
  double mass = 0.0;
  double tail = 0.0;
  for (Index j : order) {
    const double take = std::min(s.weight(j), alpha - mass);
    if (take <= 0) break;
    tail += take * x(j);
    mass += take;
  }
  return s.expectation(x) - tail / alpha;
}

double binomial(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void check_generators_are_densities(const RiskEnvelope& env) {
  for (const Vector& q : env.generators()) {
    CHECK(std::abs(env.space().expectation(q) - 1.0) <= 1e-12);
  }
}

}  // namespace

TEST_CASE("MAD envelope cardinality and deviation") {
  for (Index n = 2; n <= 7; ++n) {
    const RiskEnvelope mad = build_mad(FiniteProbSpace::uniform(n));
    CHECK(mad.size() == (Index{1} << n) - 2);
    check_generators_are_densities(mad);
  }
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = 3 + trial % 5;
    const FiniteProbSpace s(random_weights(rng, n));
    const RiskEnvelope mad = build_mad(s);
    check_generators_are_densities(mad);
    const Vector x = gaussian_vector(rng, n);
    CHECK(mad.evaluate(x) == doctest::Approx(mad_oracle(s, x)).epsilon(1e-12));
  }
}

TEST_CASE("MAD scenario guard") {
  CHECK_THROWS_AS(build_mad(FiniteProbSpace::uniform(kMadScenarioGuard + 1)), Error);
}

TEST_CASE("CVaR envelope cardinality on uniform spaces") {
  for (int n = 2; n <= 8; ++n) {
    for (int k = 1; k < n; ++k) {
      const RiskEnvelope env = build_cvar(FiniteProbSpace::uniform(n), double(k) / n);
      CHECK(double(env.size()) == binomial(n, k));
    }
  }
}

TEST_CASE("CVaR deviation matches the sorted-tail oracle") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = 3 + trial % 4;
    const FiniteProbSpace s(random_weights(rng, n));
    const double alpha = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
    const RiskEnvelope env = build_cvar(s, alpha);
    check_generators_are_densities(env);
    for (const Vector& q : env.generators()) {
      CHECK(q.minCoeff() >= -1e-12);
      CHECK(q.maxCoeff() <= 1 / alpha + 1e-9);
    }
    const Vector x = gaussian_vector(rng, n);
    CHECK(env.evaluate(x) == doctest::Approx(cvar_oracle(s, x, alpha)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(build_cvar(FiniteProbSpace::uniform(3), 0.0), Error);
  CHECK_THROWS_AS(build_cvar(FiniteProbSpace::uniform(3), 1.0), Error);
}

TEST_CASE("deviation axioms hold for every builder") {
  std::mt19937_64 rng(4);
  const FiniteProbSpace s = FiniteProbSpace::uniform(5);
  const std::vector<RiskEnvelope> envs = {
      build_mad(s),
      build_cvar(s, 0.3),
      build_mixed_cvar(s, {0.2, 0.6}, {0.5, 0.5}),
      scale(build_mad(s), 0.5),
      mix({build_mad(s), build_cvar(s, 0.4)}, {0.25, 0.75}),
      max_combine({build_mad(s), build_cvar(s, 0.4)}),
  };
  for (const RiskEnvelope& env : envs) {
    CAPTURE(env.spec().label());
    CHECK(env.evaluate(Vector::Constant(5, 3.0)) == 0.0);
    for (int trial = 0; trial < 10; ++trial) {
      const Vector x = gaussian_vector(rng, 5);
      const Vector y = gaussian_vector(rng, 5);
      const double dx = env.evaluate(x);
      CHECK(dx > 0.0);
      CHECK(env.evaluate(x.array() + 7.0) == doctest::Approx(dx).epsilon(1e-12));
      CHECK(env.evaluate(2.5 * x) == doctest::Approx(2.5 * dx).epsilon(1e-12));
      CHECK(env.evaluate(x + y) <= dx + env.evaluate(y) + 1e-12);
      const RiskIdentifierSet ids = env.risk_identifiers(x);
      CHECK(ids.deviation == doctest::Approx(dx));
      for (const Vector& q : ids.polytope.vertices()) {
        CHECK(s.expectation(x) - s.expectation(x.cwiseProduct(q)) == doctest::Approx(dx));
      }
    }
  }
}

TEST_CASE("combinators act on deviations") {
  std::mt19937_64 rng(5);
  const FiniteProbSpace s(random_weights(rng, 4));
  const RiskEnvelope mad = build_mad(s);
  const RiskEnvelope cvar = build_cvar(s, 0.35);
  const RiskEnvelope mixed = build_mixed_cvar(s, {0.2, 0.7}, {0.3, 0.7});
  const RiskEnvelope c1 = build_cvar(s, 0.2);
  const RiskEnvelope c2 = build_cvar(s, 0.7);
  const RiskEnvelope general = mix({mad, cvar}, {0.5, 0.25});
  const RiskEnvelope big = max_combine({mad, cvar});
  const RiskEnvelope half = scale(cvar, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector x = gaussian_vector(rng, 4);
    CHECK(mixed.evaluate(x) ==
          doctest::Approx(0.3 * c1.evaluate(x) + 0.7 * c2.evaluate(x)).epsilon(1e-12));
    CHECK(general.evaluate(x) ==
          doctest::Approx(0.5 * mad.evaluate(x) + 0.25 * cvar.evaluate(x)).epsilon(1e-12));
    CHECK(big.evaluate(x) ==
          doctest::Approx(std::max(mad.evaluate(x), cvar.evaluate(x))).epsilon(1e-12));
    CHECK(half.evaluate(x) == doctest::Approx(0.5 * cvar.evaluate(x)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(build_mixed_cvar(s, {0.2, 0.7}, {0.3, 0.3}), Error);
  CHECK_THROWS_AS(scale(mad, 0.0), Error);
}

TEST_CASE("custom envelopes are validated and filtered") {
  const FiniteProbSpace s = FiniteProbSpace::uniform(3);
  const RiskEnvelope env =
      custom(s, {vec({3, 0, 0}), vec({0, 3, 0}), vec({1.5, 1.5, 0}), vec({1, 1, 1})});
  CHECK(env.size() == 3);
  CHECK_FALSE(env.diagnostics().empty());
  CHECK_THROWS_AS(custom(s, {vec({2, 2, 2})}), Error);
  CHECK_THROWS_AS(custom(s, {vec({1, 1})}), Error);
}

TEST_CASE("standard deviation is not finitely generated") {
  try {
    build_envelope(EnvelopeSpec::stddev(), FiniteProbSpace::uniform(3));
    FAIL("expected Unsupported");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnsupported);
  }
}

TEST_CASE("risk function gradients reproduce the deviation") {
  std::mt19937_64 rng(6);
  const FiniteProbSpace s(random_weights(rng, 4));
  const RiskEnvelope env = build_cvar(s, 0.4);
  const PwlConvexFunction f = env.as_risk_function();
  CHECK(f.positively_homogeneous());
  for (int trial = 0; trial < 10; ++trial) {
    const Vector x = gaussian_vector(rng, 4);
    CHECK(f(x) == doctest::Approx(env.evaluate(x)).epsilon(1e-12));
  }
}

TEST_CASE("spec labels and recursive builds") {
  const EnvelopeSpec spec = EnvelopeSpec::mix(
      {EnvelopeSpec::mad(), EnvelopeSpec::scaled(0.5, EnvelopeSpec::cvar(0.25))}, {0.5, 0.5});
  const RiskEnvelope env = build_envelope(spec, FiniteProbSpace::uniform(4));
  CHECK(env.kind() == EnvelopeKind::kMix);
  CHECK_FALSE(spec.label().empty());
  const Vector x = vec({1, -2, 0.5, 3});
  const double want = 0.5 * build_mad(FiniteProbSpace::uniform(4)).evaluate(x) +
                      0.25 * build_cvar(FiniteProbSpace::uniform(4), 0.25).evaluate(x);
  CHECK(env.evaluate(x) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("union of the two agents' generators drops the inner scaled-MAD points") {
  // (4/3, 4/3, 1/3) lies between the center (1, 1, 1) and (3/2, 3/2, 0).
  const FiniteProbSpace s = FiniteProbSpace::uniform(3);
  const RiskEnvelope both = max_combine({build_cvar(s, 2.0 / 3), scale(build_mad(s), 0.5)});
  std::vector<Vector> want;
  for (const Vector& v : {vec({1.5, 1.5, 0}), vec({1.5, 0, 1.5}), vec({0, 1.5, 1.5}),
                          vec({5.0 / 3, 2.0 / 3, 2.0 / 3}), vec({2.0 / 3, 5.0 / 3, 2.0 / 3}),
                          vec({2.0 / 3, 2.0 / 3, 5.0 / 3})}) {
    want.push_back(v);
  }
  CHECK(same_points(both.generators(), want, 1e-12));
}
