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

#include "mdport/blacklitterman.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "mdport/error.hpp"

namespace mdport {

namespace {

bool uses_custom(const EnvelopeSpec& spec) {
  if (spec.kind == EnvelopeKind::kCustom) return true;
  for (const EnvelopeSpec& p : spec.parts) {
    if (uses_custom(p)) return true;
  }
  return false;
}

}  // namespace

void Views::validate(Index assets) const {
  const Index m = count();
  if (m == 0) return;
  require(pick.cols() == assets, ErrorCode::kDimensionMismatch,
          "pick matrix needs one column per asset");
  require(values.size() == m, ErrorCode::kDimensionMismatch, "one view value per pick row");
  require(noise_cov.rows() == m && noise_cov.cols() == m, ErrorCode::kDimensionMismatch,
          "noise covariance must be m x m");
  require(pick.allFinite() && values.allFinite() && noise_cov.allFinite(),
          ErrorCode::kInvalidArgument, "views must be finite");
  for (Index i = 0; i < m; ++i) {
    require(pick.row(i).cwiseAbs().maxCoeff() > 0.0, ErrorCode::kInvalidArgument,
            "pick matrix row " + std::to_string(i) + " is zero");
  }
  const double scale = std::max(1.0, noise_cov.cwiseAbs().maxCoeff());
  require((noise_cov - noise_cov.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
          ErrorCode::kInvalidArgument, "noise covariance must be symmetric");
  Eigen::LLT<Matrix> llt(noise_cov);
  require(llt.info() == Eigen::Success, ErrorCode::kInvalidArgument,
          "noise covariance must be positive definite");
}

Vector equilibrium_mu(const MarketModel& market, const RiskEnvelope& envelope,
                      const Vector& x_market, double delta_market, const SteinerConfig& config) {
  const RobustMu robust = robust_mu(market, envelope, x_market, delta_market, config);
  if (robust.set.polytope.is_singleton()) return robust.set.polytope.vertex(0);
  return robust.mu;
}

FiniteProbSpace posterior_space(const MarketModel& market, const Vector& mu_eq,
                                const Views& views) {
  views.validate(market.assets());
  if (views.count() == 0) return market.space;
  const Eigen::LLT<Matrix> llt(views.noise_cov);
  const Index big_n = market.scenarios();
  Vector log_w(big_n);
  for (Index j = 0; j < big_n; ++j) {
    const Vector e = views.values - views.pick * (mu_eq + market.centered_returns.col(j));
    log_w(j) = std::log(market.space.weight(j)) - 0.5 * e.dot(llt.solve(e));
  }
  const double top = log_w.maxCoeff();
  // Scalar exp: the vectorized one clamps large negative arguments to a
  // subnormal instead of zero, which would hide the underflow.
  Vector w(big_n);
  for (Index j = 0; j < big_n; ++j) w(j) = std::exp(log_w(j) - top);
  w /= w.sum();
  for (Index j = 0; j < big_n; ++j) {
    if (!(w(j) >= std::numeric_limits<double>::min())) {
      std::ostringstream msg;
      msg << "posterior weight of scenario " << j << " underflows (log weight " << log_w(j)
          << ", max " << top << ")";
      fail(ErrorCode::kNumericUnderflow, msg.str());
    }
  }
  return FiniteProbSpace(std::move(w));
}

BlResult bl_pipeline(const MarketModel& market, const EnvelopeSpec& envelope,
                     const Vector& x_market, double delta_market,
                     const std::optional<Views>& views,
                     const std::optional<Vector>& posterior_weights,
                     const SteinerConfig& config) {
  require(!(views && posterior_weights), ErrorCode::kInvalidArgument,
          "give either views or explicit posterior weights, not both");
  const RiskEnvelope prior_envelope = build_envelope(envelope, market.space);
  const Vector mu_eq = equilibrium_mu(market, prior_envelope, x_market, delta_market, config);

  FiniteProbSpace posterior = market.space;
  if (views) {
    posterior = posterior_space(market, mu_eq, *views);
  } else if (posterior_weights) {
    market.space.check_dimension(*posterior_weights, "posterior weights");
    if (*posterior_weights != market.space.weights()) posterior = FiniteProbSpace(*posterior_weights);
  }

  if (!(posterior == market.space) && uses_custom(envelope)) {
    fail(ErrorCode::kUnsupported,
         "custom generators are tied to the prior weights and cannot be rebuilt on the posterior");
  }
  const Vector shift = posterior.expectation_rows(market.centered_returns);
  const Matrix centered = market.centered_returns.colwise() - shift;
  const Vector mu_post = mu_eq + shift;
  MarketModel post_market =
      MarketModel::from_centered(posterior, centered, mu_post, delta_market);
  const RiskEnvelope post_envelope = build_envelope(envelope, posterior);
  const PortfolioRiskGenerators gens = portfolio_risk_generators(post_market, post_envelope);
  ForwardSolution forward = solve_forward(gens, mu_post, delta_market);
  UniquenessReport diagnosis = diagnose_uniqueness(forward, gens, mu_post);

  std::ostringstream text;
  text << (forward.unique ? "posterior forward problem has a unique solution"
                          : "posterior forward problem has a non-unique optimal face")
       << "; " << diagnosis.narrative;
  return BlResult{mu_eq,         std::move(posterior), mu_post, std::move(post_market),
                  std::move(forward), std::move(diagnosis), text.str()};
}

}  // namespace mdport
