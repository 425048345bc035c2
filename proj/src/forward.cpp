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

#include "mdport/forward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mdport/error.hpp"

namespace mdport {

namespace {

lp::LinearProgram forward_program(const PortfolioRiskGenerators& gens, const Vector& mu,
                                  double delta) {
  const Index n = gens.assets();
  lp::LinearProgram prog(n + 1);
  prog.objective(n) = 1.0;
  for (const Vector& d : gens.generators) {
    Vector row(n + 1);
    row.head(n) = d;
    row(n) = -1.0;
    prog.add_ub(row, 0.0);
  }
  Vector ret = Vector::Zero(n + 1);
  ret.head(n) = -mu;
  prog.add_ub(ret, -delta);
  return prog;
}

// Greedy selection of linearly independent columns by Gram-Schmidt.
std::vector<Index> independent_subset(const std::vector<Vector>& vectors,
                                      const std::vector<Index>& candidates) {
  std::vector<Vector> basis;
  std::vector<Index> picked;
  for (Index i : candidates) {
    Vector v = vectors[static_cast<std::size_t>(i)];
    const double norm = v.norm();
    for (const Vector& b : basis) v -= b.dot(v) * b;
    if (v.norm() > 1e-9 * std::max(1.0, norm)) {
      basis.push_back(v.normalized());
      picked.push_back(i);
    }
  }
  return picked;
}

}  // namespace

double PortfolioRiskGenerators::risk(const Vector& x) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const Vector& d : generators) best = std::max(best, d.dot(x));
  return best;
}

std::vector<Index> PortfolioRiskGenerators::active(const Vector& x, double rel_tol) const {
  const double best = risk(x);
  const double tol = rel_tol * std::max(std::abs(best), 1e-12);
  std::vector<Index> out;
  for (Index i = 0; i < size(); ++i) {
    if (generators[static_cast<std::size_t>(i)].dot(x) >= best - tol) out.push_back(i);
  }
  return out;
}

PortfolioRiskGenerators portfolio_risk_generators(const MarketModel& market,
                                                  const RiskEnvelope& envelope) {
  require(market.space == envelope.space(), ErrorCode::kDimensionMismatch,
          "market and envelope live on different probability spaces");
  const Vector& w = market.space.weights();
  std::vector<Vector> raw;
  raw.reserve(static_cast<std::size_t>(envelope.size()));
  double scale = 1.0;
  for (const Vector& q : envelope.generators()) {
    raw.push_back(-(market.centered_returns * w.cwiseProduct(q)));
    scale = std::max(scale, raw.back().cwiseAbs().maxCoeff());
  }
  // Collapse duplicates, remembering every source generator.
  std::vector<Vector> unique;
  std::vector<std::vector<Index>> sources;
  const double tol = 1e-10 * scale;
  for (std::size_t j = 0; j < raw.size(); ++j) {
    std::size_t k = 0;
    while (k < unique.size() && (unique[k] - raw[j]).cwiseAbs().maxCoeff() > tol) ++k;
    if (k == unique.size()) {
      unique.push_back(raw[j]);
      sources.emplace_back();
    }
    sources[k].push_back(static_cast<Index>(j));
  }
  PortfolioRiskGenerators out;
  for (std::size_t k : extreme_indices(unique)) {
    out.generators.push_back(unique[k]);
    out.sources.push_back(sources[k]);
  }
  Matrix stacked(out.size(), market.assets());
  for (Index i = 0; i < out.size(); ++i) {
    stacked.row(i) = out.generators[static_cast<std::size_t>(i)].transpose();
  }
  if (numerical_rank(stacked) < market.assets()) {
    fail(ErrorCode::kSpanDeficient,
         "portfolio risk generators do not span R^n; some non-zero portfolio is riskless");
  }
  return out;
}

ForwardSolution solve_forward(const PortfolioRiskGenerators& gens, const Vector& mu,
                              double delta) {
  const Index n = gens.assets();
  require(mu.size() == n, ErrorCode::kDimensionMismatch, "mu length differs from asset count");
  require(std::isfinite(delta) && delta > 0.0, ErrorCode::kAssumptionB,
          "the return target must be positive");
  require(mu.allFinite() && mu.cwiseAbs().maxCoeff() > 0.0, ErrorCode::kAssumptionB,
          "expected excess returns must not all vanish");

  const lp::LinearProgram prog = forward_program(gens, mu, delta);
  const lp::Solution sol = lp::solve(prog);
  if (sol.status == lp::Status::kInfeasible) {
    fail(ErrorCode::kInfeasible, "forward problem is infeasible");
  }
  if (sol.status == lp::Status::kUnbounded) {
    fail(ErrorCode::kUnbounded, "forward problem is unbounded");
  }

  ForwardSolution out{sol.value, VPolytope::from_vertices({sol.x.head(n)}), sol.x.head(n), {},
                      false, sol.ub_duals.head(gens.size()), sol.ub_duals(gens.size()),
                      lp::certify(prog, sol), 0.0, 0.0, sol.iterations};
  std::vector<Index> coords(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) coords[static_cast<std::size_t>(i)] = i;
  out.optimal_set = lp::optimal_face(prog, sol, coords);
  out.unique = out.optimal_set.is_singleton();
  out.active = gens.active(out.x);
  for (const Vector& v : out.optimal_set.vertices()) {
    out.binding_residual = std::max(out.binding_residual, std::abs(mu.dot(v) - delta));
  }
  out.strong_duality_residual = std::abs(delta * out.return_dual - out.optimal_value);
  return out;
}

ForwardSolution solve_forward(const MarketModel& market, const RiskEnvelope& envelope,
                              double delta) {
  return solve_forward(portfolio_risk_generators(market, envelope), market.mu, delta);
}

UniquenessReport diagnose_uniqueness(const ForwardSolution& solution,
                                     const PortfolioRiskGenerators& gens, const Vector& mu) {
  const Index n = gens.assets();
  UniquenessReport report;
  report.unique = solution.unique;
  report.active = gens.active(solution.optimal_set.centroid());
  report.independent = independent_subset(gens.generators, report.active);
  report.active_rank = static_cast<Index>(report.independent.size());

  Matrix span(n, static_cast<Index>(report.active.size()));
  for (Index c = 0; c < span.cols(); ++c) {
    span.col(c) = gens.generators[static_cast<std::size_t>(report.active[static_cast<std::size_t>(c)])];
  }
  const Vector coeffs = span.completeOrthogonalDecomposition().solve(mu);
  report.mu_residual = (span * coeffs - mu).norm() / std::max(mu.norm(), 1e-300);

  std::ostringstream text;
  if (report.unique) {
    report.consistent = report.active_rank >= n;
    text << "unique optimum; " << report.active_rank << " linearly independent active generators"
         << " (n = " << n << ")";
  } else {
    report.consistent = report.active_rank <= n - 1 && report.mu_residual <= 1e-8;
    text << "optimal face with " << solution.optimal_set.size() << " vertices; mu lies in the span"
         << " of " << report.active_rank << " active generator(s), relative residual "
         << report.mu_residual;
  }
  report.narrative = text.str();
  return report;
}

}  // namespace mdport
