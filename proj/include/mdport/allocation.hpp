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

// Capital allocation by the extended gradient, Steiner-point price selection,
// and cooperative investment with fair side payments.

#include <vector>

#include "mdport/envelope.hpp"
#include "mdport/geometry.hpp"

namespace mdport {

struct CapitalAllocationResult {
  std::vector<double> contributions;  // k_i = X_i^T G
  double total_risk = 0.0;            // rho(Y), Y = sum X_i
  SteinerResult gradient;             // extended gradient G_Y(rho)
};

/// Requires a positively homogeneous risk (all intercepts zero).
CapitalAllocationResult capital_allocation(const PwlConvexFunction& risk,
                                           const std::vector<RandomVariable>& subportfolios,
                                           const SteinerConfig& config = {});

/// Steiner point of the subdifferential of the aggregate risk at Y.
SteinerResult equilibrium_price_selection(const PwlConvexFunction& total_risk, const Vector& y,
                                          const SteinerConfig& config = {});

/// Envelope of the infimal convolution: intersection of the agents' hulls.
RiskEnvelope cooperative_envelope(const std::vector<RiskEnvelope>& envelopes);

struct IndividualOptimum {
  Vector x;           // portfolio weights, summing to 1
  RandomVariable payoff;
  double utility = 0.0;
};

/// max_x E[X] - D(X) with X = R^T x and sum x = 1.
IndividualOptimum solve_individual(const Matrix& returns, const RiskEnvelope& envelope);

struct CooperativeSolution {
  RiskEnvelope coalition;
  std::vector<RiskEnvelope> agents;
  Vector x;                           // joint portfolio weights
  RandomVariable payoff;              // X* = sum Y_i
  std::vector<RandomVariable> shares;  // Y_i from the joint LP
  std::vector<double> utilities;      // U_i(Y_i)
  double coalition_utility = 0.0;     // u*
  std::vector<IndividualOptimum> individual;
  bool synergy = false;               // u* >= sum of individual optima

  // Filled by fair_side_payments.
  RiskIdentifierSet identifiers;      // argmin face of E[Q X*] over the coalition envelope
  SteinerResult critical_scenario;    // Q*
  std::vector<double> side_payments;  // C_i, summing to zero
  std::vector<RandomVariable> final_shares;
  std::vector<double> final_utilities;
};

/// Joint LP: maximize sum a_i subject to a_i <= E[Q Y_i] for Q in agent i's
/// envelope, sum Y_i = capital * R^T x and sum x = 1. `returns` is n x N and
/// uncentered; capital <= 0 means one unit per agent.
CooperativeSolution solve_cooperative(const Matrix& returns,
                                      const std::vector<RiskEnvelope>& envelopes,
                                      double capital = 0.0);

/// C_i = -E[Q* Y_i] + E[Q* X*] / m with Q* the Steiner point of the
/// identifier face of X* in the coalition envelope.
CooperativeSolution fair_side_payments(CooperativeSolution solution,
                                       const SteinerConfig& config = {});

}  // namespace mdport
