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

#include "mdport/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mdport/error.hpp"
#include "mdport/lp.hpp"

namespace mdport {

namespace {

double utility(const RiskEnvelope& envelope, const RandomVariable& y) {
  return envelope.space().expectation(y) - envelope.evaluate(y);
}

void check_lp(const lp::Solution& sol, const char* what) {
  if (sol.status == lp::Status::kInfeasible) {
    fail(ErrorCode::kInfeasible, std::string(what) + " is infeasible");
  }
  if (sol.status == lp::Status::kUnbounded) {
    fail(ErrorCode::kUnbounded, std::string(what) + " is unbounded");
  }
}

}  // namespace

CapitalAllocationResult capital_allocation(const PwlConvexFunction& risk,
                                           const std::vector<RandomVariable>& subportfolios,
                                           const SteinerConfig& config) {
  require(risk.positively_homogeneous(), ErrorCode::kInvalidArgument,
          "capital allocation needs a positively homogeneous risk (zero intercepts)");
  require(!subportfolios.empty(), ErrorCode::kInvalidArgument, "no sub-portfolios given");
  Vector total = Vector::Zero(risk.dim());
  for (const RandomVariable& x : subportfolios) {
    require(x.size() == risk.dim(), ErrorCode::kDimensionMismatch, "sub-portfolio length");
    total += x;
  }
  CapitalAllocationResult out{{}, risk(total), extended_gradient(risk, total, config)};
  for (const RandomVariable& x : subportfolios) {
    out.contributions.push_back(x.dot(out.gradient.point));
  }
  return out;
}

SteinerResult equilibrium_price_selection(const PwlConvexFunction& total_risk, const Vector& y,
                                          const SteinerConfig& config) {
  return extended_gradient(total_risk, y, config);
}

RiskEnvelope cooperative_envelope(const std::vector<RiskEnvelope>& envelopes) {
  require(!envelopes.empty(), ErrorCode::kInvalidArgument, "no envelopes to intersect");
  const FiniteProbSpace& space = envelopes.front().space();
  for (const RiskEnvelope& e : envelopes) {
    require(e.space() == space, ErrorCode::kDimensionMismatch,
            "envelopes live on different probability spaces");
  }
  if (envelopes.size() == 1) return envelopes.front();
  VPolytope acc = envelopes.front().polytope();
  try {
    for (std::size_t i = 1; i < envelopes.size(); ++i) {
      acc = intersect(acc, envelopes[i].polytope());
    }
  } catch (const Error& e) {
    // Every envelope contains the constant 1, so this is an internal failure.
    if (e.code() == ErrorCode::kEmptyIntersection) {
      fail(ErrorCode::kEmptyIntersection,
           "coalition envelope is empty, which valid envelopes exclude: " + std::string(e.what()));
    }
    throw;
  }
  return RiskEnvelope(space, acc.vertices(), EnvelopeSpec::custom(acc.vertices()));
}

IndividualOptimum solve_individual(const Matrix& returns, const RiskEnvelope& envelope) {
  const Index n = returns.rows();
  const Vector& w = envelope.space().weights();
  require(returns.cols() == envelope.space().size(), ErrorCode::kDimensionMismatch,
          "returns and envelope disagree on the number of scenarios");
  // Variables (a, x); maximize a with a <= E[Q R^T x].
  lp::LinearProgram prog(1 + n);
  prog.objective(0) = -1.0;
  for (const Vector& q : envelope.generators()) {
    Vector row(1 + n);
    row(0) = 1.0;
    row.tail(n) = -(returns * w.cwiseProduct(q));
    prog.add_ub(row, 0.0);
  }
  Vector budget = Vector::Zero(1 + n);
  budget.tail(n).setOnes();
  prog.add_eq(budget, 1.0);
  const lp::Solution sol = lp::solve(prog);
  check_lp(sol, "individual investment problem");
  IndividualOptimum out;
  out.x = sol.x.tail(n);
  out.payoff = returns.transpose() * out.x;
  out.utility = -sol.value;
  return out;
}

CooperativeSolution solve_cooperative(const Matrix& returns,
                                      const std::vector<RiskEnvelope>& envelopes,
                                      double capital) {
  require(!envelopes.empty(), ErrorCode::kInvalidArgument, "at least one agent is required");
  const auto m = static_cast<Index>(envelopes.size());
  const Index n = returns.rows();
  const Index big_n = returns.cols();
  if (capital <= 0.0) capital = static_cast<double>(m);
  const FiniteProbSpace& space = envelopes.front().space();
  RiskEnvelope coalition = cooperative_envelope(envelopes);

  // Variables: a (m), Y (m blocks of N), x (n).
  const Index num = m + m * big_n + n;
  const Vector& w = space.weights();
  lp::LinearProgram prog(num);
  prog.objective.head(m).setConstant(-1.0);
  for (Index i = 0; i < m; ++i) {
    for (const Vector& q : envelopes[static_cast<std::size_t>(i)].generators()) {
      Vector row = Vector::Zero(num);
      row(i) = 1.0;
      row.segment(m + i * big_n, big_n) = -w.cwiseProduct(q);
      prog.add_ub(row, 0.0);
    }
  }
  for (Index j = 0; j < big_n; ++j) {
    Vector row = Vector::Zero(num);
    for (Index i = 0; i < m; ++i) row(m + i * big_n + j) = 1.0;
    row.tail(n) = -capital * returns.col(j);
    prog.add_eq(row, 0.0);
  }
  Vector budget = Vector::Zero(num);
  budget.tail(n).setOnes();
  prog.add_eq(budget, 1.0);
  const lp::Solution sol = lp::solve(prog);
  check_lp(sol, "cooperative investment problem");

  CooperativeSolution out{std::move(coalition),
                          envelopes,
                          sol.x.tail(n),
                          RandomVariable(),
                          {},
                          {},
                          -sol.value,
                          {},
                          false,
                          RiskIdentifierSet{{}, VPolytope::from_vertices({Vector::Ones(big_n)}),
                                            RandomVariable(), 0.0},
                          SteinerResult{},
                          {},
                          {},
                          {}};
  out.payoff = capital * (returns.transpose() * out.x);
  // The split is only determined up to cash transfers. Normalize it so that
  // agents 2..m hold zero utility and agent 1 carries the coalition surplus.
  for (Index i = 0; i < m; ++i) out.shares.push_back(sol.x.segment(m + i * big_n, big_n));
  for (Index i = 1; i < m; ++i) {
    const double c = utility(envelopes[static_cast<std::size_t>(i)], out.shares[static_cast<std::size_t>(i)]);
    out.shares[static_cast<std::size_t>(i)].array() -= c;
    out.shares.front().array() += c;
  }
  double individual_total = 0.0;
  for (Index i = 0; i < m; ++i) {
    out.utilities.push_back(utility(envelopes[static_cast<std::size_t>(i)], out.shares[static_cast<std::size_t>(i)]));
    out.individual.push_back(solve_individual(returns, envelopes[static_cast<std::size_t>(i)]));
    individual_total += out.individual.back().utility;
  }
  out.synergy = out.coalition_utility >= individual_total - 1e-9;
  return out;
}

CooperativeSolution fair_side_payments(CooperativeSolution solution, const SteinerConfig& config) {
  const FiniteProbSpace& space = solution.coalition.space();
  const auto m = static_cast<double>(solution.shares.size());
  solution.identifiers = solution.coalition.risk_identifiers(solution.payoff);
  solution.critical_scenario = steiner_point(solution.identifiers.polytope, config);
  const RandomVariable& q = solution.critical_scenario.point;
  const double pooled = space.expectation(q.cwiseProduct(solution.payoff)) / m;
  solution.side_payments.clear();
  solution.final_shares.clear();
  solution.final_utilities.clear();
  for (const RandomVariable& y : solution.shares) {
    const double c = -space.expectation(q.cwiseProduct(y)) + pooled;
    solution.side_payments.push_back(c);
    solution.final_shares.push_back((y.array() + c).matrix());
    solution.final_utilities.push_back(
        utility(solution.agents[solution.final_shares.size() - 1], solution.final_shares.back()));
  }
  return solution;
}

}  // namespace mdport
