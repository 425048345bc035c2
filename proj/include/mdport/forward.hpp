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

// The forward problem: minimize D(R^T x) subject to mu^T x >= delta, solved as
//
//   minimize A  subject to  D_i^T x <= A (every generator),  mu^T x >= delta.

#include <string>
#include <vector>

#include "mdport/envelope.hpp"
#include "mdport/geometry.hpp"
#include "mdport/lp.hpp"
#include "mdport/probspace.hpp"

namespace mdport {

struct PortfolioRiskGenerators {
  std::vector<Vector> generators;           // D_i in R^n
  std::vector<std::vector<Index>> sources;  // envelope generators mapping to D_i

  Index size() const { return static_cast<Index>(generators.size()); }
  Index assets() const { return generators.front().size(); }
  /// max_i D_i^T x, which equals D(R^T x).
  double risk(const Vector& x) const;
  std::vector<Index> active(const Vector& x, double rel_tol = 1e-9) const;
};

/// D_i = E[-R Q_i] for every envelope generator, deduplicated (1e-10) and
/// reduced to extreme points. Throws kSpanDeficient when they do not span R^n.
PortfolioRiskGenerators portfolio_risk_generators(const MarketModel& market,
                                                  const RiskEnvelope& envelope);

struct ForwardSolution {
  double optimal_value = 0.0;  // A*
  VPolytope optimal_set;
  Vector x;                    // simplex vertex
  std::vector<Index> active;   // generators attaining A* at x
  bool unique = false;

  Vector generator_duals;      // p_i
  double return_dual = 0.0;    // q
  lp::Certificate certificate;
  double binding_residual = 0.0;  // max over face vertices of |mu^T x - delta|
  double strong_duality_residual = 0.0;  // |delta q - A*|
  long iterations = 0;
};

/// Throws kAssumptionB unless delta > 0 and mu != 0.
ForwardSolution solve_forward(const PortfolioRiskGenerators& generators, const Vector& mu,
                              double delta);
ForwardSolution solve_forward(const MarketModel& market, const RiskEnvelope& envelope,
                              double delta);

struct UniquenessReport {
  bool unique = false;
  /// Generators active on the whole optimal face (evaluated at its centroid).
  std::vector<Index> active;
  Index active_rank = 0;
  /// Unique case: n linearly independent active generators.
  std::vector<Index> independent;
  /// Non-unique case: relative least-squares residual of mu in span(active).
  double mu_residual = 0.0;
  bool consistent = false;
  std::string narrative;
};

UniquenessReport diagnose_uniqueness(const ForwardSolution& solution,
                                     const PortfolioRiskGenerators& generators,
                                     const Vector& mu);

}  // namespace mdport
