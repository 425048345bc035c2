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

// Inverse portfolio problem: every mu for which a given portfolio x_M is
// optimal at target delta_M, and the selectors that pick one of them.

#include <string>
#include <vector>

#include "mdport/envelope.hpp"
#include "mdport/forward.hpp"
#include "mdport/geometry.hpp"

namespace mdport {

struct InverseSolutionSet {
  VPolytope polytope;          // vertices delta * D_i over active generators
  double delta_scale = 0.0;    // delta_M / D(R^T x_M)
  double deviation = 0.0;      // D(R^T x_M)
  std::vector<Index> active;   // indices into the portfolio risk generators
  std::vector<bool> verified;  // per vertex: x_M re-solves as optimal
  bool all_verified() const;
};

/// Throws kZeroRiskPortfolio when D(R^T x_M) = 0.
InverseSolutionSet inverse_solution_set(const MarketModel& market, const RiskEnvelope& envelope,
                                        const Vector& x_market, double delta_market,
                                        bool verify = true);
InverseSolutionSet inverse_solution_set(const PortfolioRiskGenerators& generators,
                                        const Vector& x_market, double delta_market,
                                        bool verify = true);

struct SelectorResult {
  RandomVariable q;
  bool exact = true;
  Vector std_error;  // Monte-Carlo standard error, zero when exact
  std::string method;
  std::vector<std::string> diagnostics;
};

/// Closed forms for MAD, CVaR and their mixtures and scalings; the Steiner
/// point of the identifier polytope for anything else.
SelectorResult robust_selector(const RiskEnvelope& envelope, const RandomVariable& x,
                               const SteinerConfig& config = {});

/// Always the Steiner point of the identifier polytope.
SelectorResult steiner_selector(const RiskEnvelope& envelope, const RandomVariable& x,
                                const SteinerConfig& config = {});

/// E[Q | X] for the lowest-index active generator Q. Throws kNotAnIdentifier
/// when the average leaves the identifier set.
RandomVariable law_invariant_selector(const RiskEnvelope& envelope, const RandomVariable& x);

/// |E[X] + E[-X Q] - D(X)|.
double identifier_gap(const RiskEnvelope& envelope, const RandomVariable& x,
                      const RandomVariable& q);

/// Level sets of X: scenarios grouped by value (ties within 1e-12 relative),
/// ordered by increasing value.
std::vector<std::vector<Index>> level_sets(const RandomVariable& x);

struct RobustMu {
  Vector mu;
  SelectorResult selector;
  InverseSolutionSet set;
  bool in_set = false;
};

RobustMu robust_mu(const MarketModel& market, const RiskEnvelope& envelope,
                   const Vector& x_market, double delta_market,
                   const SteinerConfig& config = {});

struct DichotomyReport {
  int branch = 0;  // 1: forward unique, 2: one active generator, 0: neither
  bool forward_unique = false;
  Index assets = 0;
  Index inverse_vertices = 0;
  Index active_generators = 0;
  Index face_vertices = 0;
  Index face_dimension = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Evaluates both branches of the dichotomy at x_M. Forward uniqueness is
/// tested at the centroid of the inverse set.
DichotomyReport analyze_dichotomy(const PortfolioRiskGenerators& generators,
                                  const Vector& x_market, double delta_market);

/// analyze_dichotomy, throwing kDichotomyViolation on any violation.
DichotomyReport verify_dichotomy(const MarketModel& market, const RiskEnvelope& envelope,
                                 const Vector& x_market, double delta_market);

/// True iff X dominates Y in the concave order. Requires E[X] = E[Y]
/// (1e-10); uniform spaces compare sorted partial sums, general weights
/// compare E[(t - X)^+] <= E[(t - Y)^+] at every knot.
bool concave_dominates(const RandomVariable& x, const RandomVariable& y,
                       const FiniteProbSpace& space);

}  // namespace mdport
