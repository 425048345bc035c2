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

#pragma once

// Scenario-reweighting Black-Litterman: equilibrium mean from the inverse
// problem, Bayesian reweighting of the scenarios from views, and the forward
// problem under the posterior.

#include <optional>
#include <string>

#include "mdport/envelope.hpp"
#include "mdport/forward.hpp"
#include "mdport/inverse.hpp"

namespace mdport {

/// Views P r = v + eps with eps ~ N(0, noise_cov). An empty pick matrix means
/// no views.
struct Views {
  Matrix pick;       // m x n
  Vector values;     // m
  Matrix noise_cov;  // m x m, symmetric positive definite

  Index count() const { return pick.rows(); }
  void validate(Index assets) const;
};

/// Robust point of the inverse solution set (the unique point when the set
/// is a singleton).
Vector equilibrium_mu(const MarketModel& market, const RiskEnvelope& envelope,
                      const Vector& x_market, double delta_market,
                      const SteinerConfig& config = {});

/// Weights proportional to w_j f(v - P mu_eq - P R_j), computed in log space.
/// Throws kNumericUnderflow when a posterior weight underflows to zero.
FiniteProbSpace posterior_space(const MarketModel& market, const Vector& mu_eq,
                                const Views& views);

struct BlResult {
  Vector mu_eq;
  FiniteProbSpace posterior;
  Vector mu_post;           // mu_eq + E_Q[R]
  MarketModel posterior_market;
  ForwardSolution forward;  // target delta_M
  UniquenessReport diagnosis;
  std::string narrative;
};

/// `market.mu` is ignored; the prior mean comes from the inverse problem. The
/// envelope recipe is rebuilt on the posterior space. Either `views` or
/// `posterior_weights` may be given; neither means the prior is kept.
BlResult bl_pipeline(const MarketModel& market, const EnvelopeSpec& envelope,
                     const Vector& x_market, double delta_market,
                     const std::optional<Views>& views,
                     const std::optional<Vector>& posterior_weights,
                     const SteinerConfig& config = {});

}  // namespace mdport
