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

#include "mdport/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mdport/error.hpp"

namespace mdport {

namespace {

double tie_tolerance(const RandomVariable& x) { return 1e-12 * (1.0 + x.cwiseAbs().maxCoeff()); }

// MAD: Q = 1 + E[Z] - Z with Z = sign(X - E[X]), zero on ties.
RandomVariable mad_selector(const FiniteProbSpace& space, const RandomVariable& x) {
  const double mean = space.expectation(x);
  const double tol = tie_tolerance(x);
  RandomVariable z(x.size());
  for (Index j = 0; j < x.size(); ++j) {
    const double d = x(j) - mean;
    z(j) = d > tol ? 1.0 : (d < -tol ? -1.0 : 0.0);
  }
  return (1.0 + space.expectation(z)) * RandomVariable::Ones(x.size()) - z;
}

// CVaR: cap 1/alpha on the lowest outcomes, zero above the quantile, and one
// equalized value on the tied block at the quantile.
RandomVariable cvar_selector(const FiniteProbSpace& space, const RandomVariable& x, double alpha,
                             std::vector<std::string>* notes) {
  const double cap = 1.0 / alpha;
  RandomVariable q = RandomVariable::Zero(x.size());
  double mass = 0.0;
  for (const auto& group : level_sets(x)) {
    double w = 0.0;
    for (Index j : group) w += space.weight(j);
    if (mass >= alpha * (1.0 - 1e-12)) break;
    if (mass + w <= alpha * (1.0 + 1e-12)) {
      for (Index j : group) q(j) = cap;
      mass += w;
      continue;
    }
    const double level = (1.0 - mass / alpha) / w;
    for (Index j : group) q(j) = level;
    if (notes != nullptr && group.size() > 1) {
      const double w0 = space.weight(group.front());
      const bool equal_weights = std::all_of(group.begin(), group.end(), [&](Index j) {
        return std::abs(space.weight(j) - w0) <= 1e-12;
      });
      if (!equal_weights) {
        notes->push_back("cvar: tied block has unequal weights; equalized q may differ from the "
                         "Steiner point of the identifier set");
      }
    }
    break;
  }
  return q;
}

bool closed_form(const EnvelopeSpec& spec, const FiniteProbSpace& space, const RandomVariable& x,
                 RandomVariable& out, std::vector<std::string>* notes) {
  switch (spec.kind) {
    case EnvelopeKind::kMad:
      out = mad_selector(space, x);
      return true;
    case EnvelopeKind::kCvar:
      out = cvar_selector(space, x, spec.alpha, notes);
      return true;
    case EnvelopeKind::kMixedCvar: {
      out = RandomVariable::Zero(x.size());
      for (std::size_t i = 0; i < spec.alphas.size(); ++i) {
        out += spec.lambdas[i] * cvar_selector(space, x, spec.alphas[i], notes);
      }
      return true;
    }
    case EnvelopeKind::kScaled: {
      RandomVariable inner;
      if (!closed_form(spec.parts.front(), space, x, inner, notes)) return false;
      out = (1.0 - spec.lambda) * RandomVariable::Ones(x.size()) + spec.lambda * inner;
      return true;
    }
    case EnvelopeKind::kMix: {
      const double total = std::accumulate(spec.lambdas.begin(), spec.lambdas.end(), 0.0);
      out = (1.0 - total) * RandomVariable::Ones(x.size());
      for (std::size_t i = 0; i < spec.parts.size(); ++i) {
        RandomVariable part;
        if (!closed_form(spec.parts[i], space, x, part, notes)) return false;
        out += spec.lambdas[i] * part;
      }
      return true;
    }
    default:
      return false;
  }
}

}  // namespace

std::vector<std::vector<Index>> level_sets(const RandomVariable& x) {
  std::vector<Index> order(static_cast<std::size_t>(x.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return x(a) < x(b); });
  const double tol = tie_tolerance(x);
  std::vector<std::vector<Index>> groups;
  for (Index j : order) {
    if (groups.empty() || x(j) - x(groups.back().back()) > tol) groups.emplace_back();
    groups.back().push_back(j);
  }
  return groups;
}

bool InverseSolutionSet::all_verified() const {
  return std::all_of(verified.begin(), verified.end(), [](bool v) { return v; });
}

InverseSolutionSet inverse_solution_set(const PortfolioRiskGenerators& gens,
                                        const Vector& x_market, double delta_market,
                                        bool verify) {
  require(x_market.size() == gens.assets(), ErrorCode::kDimensionMismatch,
          "market portfolio length differs from asset count");
  require(x_market.cwiseAbs().maxCoeff() > 0.0, ErrorCode::kInvalidArgument,
          "market portfolio must be non-zero");
  require(std::isfinite(delta_market) && delta_market > 0.0, ErrorCode::kAssumptionB,
          "market return target must be positive");
  const double deviation = gens.risk(x_market);
  double scale = 0.0;
  for (const Vector& d : gens.generators) scale = std::max(scale, d.cwiseAbs().maxCoeff());
  if (deviation <= 1e-12 * scale * x_market.cwiseAbs().maxCoeff()) {
    fail(ErrorCode::kZeroRiskPortfolio, "market portfolio has zero deviation");
  }
  InverseSolutionSet out{VPolytope::from_vertices({Vector::Zero(gens.assets())}),
                         delta_market / deviation, deviation, gens.active(x_market), {}};
  std::vector<Vector> points;
  for (Index i : out.active) {
    points.push_back(out.delta_scale * gens.generators[static_cast<std::size_t>(i)]);
  }
  out.polytope = VPolytope::from_points(std::move(points));
  if (verify) {
    for (const Vector& mu : out.polytope.vertices()) {
      const ForwardSolution fwd = solve_forward(gens, mu, delta_market);
      out.verified.push_back(fwd.optimal_value >= deviation - 1e-8 * (1.0 + deviation));
    }
  }
  return out;
}

InverseSolutionSet inverse_solution_set(const MarketModel& market, const RiskEnvelope& envelope,
                                        const Vector& x_market, double delta_market,
                                        bool verify) {
  return inverse_solution_set(portfolio_risk_generators(market, envelope), x_market, delta_market,
                              verify);
}

double identifier_gap(const RiskEnvelope& envelope, const RandomVariable& x,
                      const RandomVariable& q) {
  const FiniteProbSpace& space = envelope.space();
  const double attained = space.expectation(x) - space.expectation(x.cwiseProduct(q));
  return std::abs(attained - envelope.evaluate(x));
}

SelectorResult steiner_selector(const RiskEnvelope& envelope, const RandomVariable& x,
                                const SteinerConfig& config) {
  const RiskIdentifierSet ids = envelope.risk_identifiers(x);
  const SteinerResult s = steiner_point(ids.polytope, config);
  return SelectorResult{s.point, s.exact, s.std_error,
                        s.exact ? "steiner-exact" : "steiner-monte-carlo", {}};
}

SelectorResult robust_selector(const RiskEnvelope& envelope, const RandomVariable& x,
                               const SteinerConfig& config) {
  envelope.space().check_dimension(x, "random variable");
  SelectorResult out;
  if (closed_form(envelope.spec(), envelope.space(), x, out.q, &out.diagnostics)) {
    out.exact = true;
    out.std_error = Vector::Zero(x.size());
    out.method = "closed-form " + envelope.spec().label();
    return out;
  }
  return steiner_selector(envelope, x, config);
}

RandomVariable law_invariant_selector(const RiskEnvelope& envelope, const RandomVariable& x) {
  const FiniteProbSpace& space = envelope.space();
  const RiskIdentifierSet ids = envelope.risk_identifiers(x);
  const RandomVariable& seed = envelope.generator(ids.indices.front());
  RandomVariable q(x.size());
  for (const auto& group : level_sets(x)) {
    double mass = 0.0;
    double total = 0.0;
    for (Index j : group) {
      mass += space.weight(j);
      total += space.weight(j) * seed(j);
    }
    for (Index j : group) q(j) = total / mass;
  }
  const double gap = identifier_gap(envelope, x, q);
  if (gap > 1e-8 * (1.0 + ids.deviation) || !envelope.polytope().contains(q, 1e-8)) {
    std::ostringstream msg;
    msg << "E[Q|X] is not a risk identifier (attainment gap " << gap
        << "); the deviation measure is not consistent with the concave order";
    fail(ErrorCode::kNotAnIdentifier, msg.str());
  }
  return q;
}

RobustMu robust_mu(const MarketModel& market, const RiskEnvelope& envelope,
                   const Vector& x_market, double delta_market, const SteinerConfig& config) {
  const PortfolioRiskGenerators gens = portfolio_risk_generators(market, envelope);
  RobustMu out{Vector(), SelectorResult{},
               inverse_solution_set(gens, x_market, delta_market, true), false};
  const RandomVariable x = market.portfolio_return(x_market);
  out.selector = robust_selector(envelope, x, config);
  const Vector& w = market.space.weights();
  out.mu = -out.set.delta_scale * (market.centered_returns * w.cwiseProduct(out.selector.q));
  out.in_set = out.set.polytope.contains(out.mu, 1e-8 * (1.0 + out.mu.cwiseAbs().maxCoeff()));
  return out;
}

DichotomyReport analyze_dichotomy(const PortfolioRiskGenerators& gens, const Vector& x_market,
                                  double delta_market) {
  const Index n = gens.assets();
  DichotomyReport report;
  report.assets = n;
  const InverseSolutionSet set = inverse_solution_set(gens, x_market, delta_market, true);
  report.inverse_vertices = set.polytope.size();
  report.active_generators = static_cast<Index>(set.active.size());
  if (!set.all_verified()) {
    report.violations.push_back("x_M does not re-solve as optimal for every vertex of the set");
  }

  const Vector mu = set.polytope.centroid();
  const ForwardSolution fwd = solve_forward(gens, mu, delta_market);
  report.forward_unique = fwd.unique;
  report.face_vertices = fwd.optimal_set.size();
  report.face_dimension = fwd.optimal_set.affine_dimension();
  if (!fwd.optimal_set.contains(x_market, 1e-7 * (1.0 + x_market.cwiseAbs().maxCoeff()))) {
    report.violations.push_back("x_M is not in the optimal face at the centroid of the set");
  }

  std::ostringstream msg;
  if (fwd.unique) {
    report.branch = 1;
    if (report.inverse_vertices < n + 1) {
      msg << "forward solution unique but the inverse set has " << report.inverse_vertices
          << " extreme points (< n + 1 = " << n + 1 << ")";
      report.violations.push_back(msg.str());
    }
    for (const Vector& v : set.polytope.vertices()) {
      const bool from_active = std::any_of(set.active.begin(), set.active.end(), [&](Index i) {
        return (set.delta_scale * gens.generators[static_cast<std::size_t>(i)] - v)
                   .cwiseAbs()
                   .maxCoeff() <= 1e-9 * (1.0 + v.cwiseAbs().maxCoeff());
      });
      if (!from_active) report.violations.push_back("inverse vertex is not delta * D_active");
    }
  } else if (report.active_generators == 1) {
    report.branch = 2;
    if (!set.polytope.is_singleton()) {
      report.violations.push_back("one active generator but the inverse set is not a singleton");
    }
    if (report.face_dimension != n - 1 || report.face_vertices < n) {
      msg << "one active generator but the forward face has dimension " << report.face_dimension
          << " and " << report.face_vertices << " vertices (expected n - 1 = " << n - 1
          << " and >= " << n << ")";
      report.violations.push_back(msg.str());
    }
  }
  return report;
}

DichotomyReport verify_dichotomy(const MarketModel& market, const RiskEnvelope& envelope,
                                 const Vector& x_market, double delta_market) {
  DichotomyReport report =
      analyze_dichotomy(portfolio_risk_generators(market, envelope), x_market, delta_market);
  if (!report.ok()) {
    std::string text = "dichotomy violated:";
    for (const std::string& v : report.violations) text += " " + v + ";";
    fail(ErrorCode::kDichotomyViolation, text);
  }
  return report;
}

bool concave_dominates(const RandomVariable& x, const RandomVariable& y,
                       const FiniteProbSpace& space) {
  space.check_dimension(x, "X");
  space.check_dimension(y, "Y");
  const double mx = space.expectation(x);
  const double my = space.expectation(y);
  require(std::abs(mx - my) <= 1e-10, ErrorCode::kInvalidArgument,
          "concave order needs equal means");
  const double tol = 1e-12 * (1.0 + std::max(x.cwiseAbs().maxCoeff(), y.cwiseAbs().maxCoeff())) *
                     static_cast<double>(x.size());
  if (space.is_uniform()) {
    Vector xs = x;
    Vector ys = y;
    std::sort(xs.data(), xs.data() + xs.size());
    std::sort(ys.data(), ys.data() + ys.size());
    double sx = 0.0;
    double sy = 0.0;
    for (Index k = 0; k < xs.size(); ++k) {
      sx += xs(k);
      sy += ys(k);
      if (sx < sy - tol) return false;
    }
    return true;
  }
  // Both E[(t - X)^+] are piecewise linear with knots at the outcomes.
  auto shortfall = [&](const RandomVariable& v, double t) {
    return space.expectation((t - v.array()).max(0.0).matrix());
  };
  for (Index j = 0; j < x.size(); ++j) {
    for (double t : {x(j), y(j)}) {
      if (shortfall(x, t) > shortfall(y, t) + tol) return false;
    }
  }
  return true;
}

}  // namespace mdport
