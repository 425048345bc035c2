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

#include <cmath>

#include "mdport/blacklitterman.hpp"
#include "mdport/error.hpp"
#include "test_support.hpp"

using namespace mdport;
using namespace mdport::testing;

namespace {

MarketModel prior() {
  return MarketModel::from_centered(FiniteProbSpace::uniform(3),
                                    scenarios({{-1, 0}, {0, -1}, {1, 1}}), vec({0, 0}), 0.4);
}

}  // namespace

TEST_CASE("equilibrium mean of the degenerate market") {
  const MarketModel m = prior();
  const Vector mu = equilibrium_mu(m, build_cvar(m.space, 0.05), vec({0.2, 0.8}), 0.4);
  CHECK(max_abs(mu - vec({0, 0.5})) <= 1e-12);
}

TEST_CASE("posterior weights follow the Gaussian view likelihood") {
  const MarketModel m = prior();
  const Vector mu_eq = vec({0, 0.5});
  Views v;
  v.pick = Matrix(1, 2);
  v.pick << 1, -1;
  v.values = vec({0.2});
  v.noise_cov = Matrix::Constant(1, 1, 0.5);
  const FiniteProbSpace post = posterior_space(m, mu_eq, v);
  // Independent oracle: one view with scalar variance.
  Vector w(3);
  for (Index j = 0; j < 3; ++j) {
    const double pred = (mu_eq + m.centered_returns.col(j)).dot(vec({1, -1}));
    w(j) = std::exp(-0.5 * (0.2 - pred) * (0.2 - pred) / 0.5) / 3;
  }
  w /= w.sum();
  CHECK(max_abs(post.weights() - w) <= 1e-14);
}

TEST_CASE("no views keeps the prior") {
  const MarketModel m = prior();
  Views v;
  v.pick = Matrix(0, 2);
  v.values = Vector(0);
  v.noise_cov = Matrix(0, 0);
  CHECK(posterior_space(m, vec({0, 0.5}), v) == m.space);
}

TEST_CASE("malformed views are rejected") {
  const MarketModel m = prior();
  Views v;
  v.pick = Matrix::Ones(1, 3);
  v.values = vec({0.1});
  v.noise_cov = Matrix::Ones(1, 1);
  CHECK_THROWS_AS(posterior_space(m, vec({0, 0.5}), v), Error);
  v.pick = Matrix::Ones(1, 2);
  v.noise_cov = -Matrix::Ones(1, 1);
  CHECK_THROWS_AS(posterior_space(m, vec({0, 0.5}), v), Error);
}

TEST_CASE("extreme views underflow loudly") {
  const MarketModel m = prior();
  Views v;
  v.pick = Matrix::Ones(1, 2);
  v.values = vec({1000});
  v.noise_cov = Matrix::Constant(1, 1, 1e-6);
  try {
    posterior_space(m, vec({0, 0.5}), v);
    FAIL("expected underflow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNumericUnderflow);
  }
}

TEST_CASE("pipeline with a posterior override") {
  const BlResult r = bl_pipeline(prior(), EnvelopeSpec::cvar(0.05), vec({0.2, 0.8}), 0.4,
                                 std::nullopt, vec({0.25, 0.25, 0.5}));
  CHECK(max_abs(r.mu_post - vec({0.25, 0.75})) <= 1e-12);
  CHECK(max_abs(r.posterior.expectation_rows(r.posterior_market.centered_returns)) <= 1e-12);
  CHECK(r.forward.unique);
  CHECK(max_abs(r.forward.x - vec({0.4, 0.4})) <= 1e-9);
  CHECK(r.diagnosis.unique);
}

TEST_CASE("pipeline without views reproduces the degenerate face") {
  const BlResult r = bl_pipeline(prior(), EnvelopeSpec::cvar(0.05), vec({0.2, 0.8}), 0.4,
                                 std::nullopt, std::nullopt);
  CHECK_FALSE(r.forward.unique);
  CHECK(r.diagnosis.consistent);
  CHECK(r.posterior == prior().space);
}

TEST_CASE("custom envelopes cannot follow a change of measure") {
  const EnvelopeSpec spec = EnvelopeSpec::custom({vec({3, 0, 0}), vec({0, 3, 0}), vec({0, 0, 3})});
  CHECK_THROWS_AS(bl_pipeline(prior(), spec, vec({0.2, 0.8}), 0.4, std::nullopt,
                              vec({0.25, 0.25, 0.5})),
                  Error);
}
