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

// Finitely generated deviation measures
//
//   D(X) = E[X] + max_{Q in G} E[-X Q],
//
// stored by the extreme points G of the risk envelope. Every generator has
// E[Q] = 1.

#include <string>
#include <vector>

#include "mdport/geometry.hpp"
#include "mdport/probspace.hpp"

namespace mdport {

enum class EnvelopeKind { kMad, kCvar, kMixedCvar, kScaled, kMix, kMax, kCustom, kStdDev };

/// Recipe for an envelope. Rebuilding the recipe on a different space is how
/// reweighted scenario sets get their envelope.
struct EnvelopeSpec {
  EnvelopeKind kind = EnvelopeKind::kMad;
  double alpha = 0.0;                  // kCvar
  std::vector<double> alphas;          // kMixedCvar
  std::vector<double> lambdas;         // kMixedCvar, kMix
  double lambda = 1.0;                 // kScaled
  std::vector<EnvelopeSpec> parts;     // kScaled (one), kMix, kMax
  std::vector<Vector> generators;      // kCustom

  static EnvelopeSpec mad();
  static EnvelopeSpec cvar(double alpha);
  static EnvelopeSpec mixed_cvar(std::vector<double> alphas, std::vector<double> lambdas);
  static EnvelopeSpec scaled(double lambda, EnvelopeSpec inner);
  static EnvelopeSpec mix(std::vector<EnvelopeSpec> parts, std::vector<double> lambdas);
  static EnvelopeSpec max(std::vector<EnvelopeSpec> parts);
  static EnvelopeSpec custom(std::vector<Vector> generators);
  static EnvelopeSpec stddev();

  /// Short human-readable label, e.g. "cvar(0.05)".
  std::string label() const;
};

struct RiskIdentifierSet {
  std::vector<Index> indices;  // into the envelope's generator list
  VPolytope polytope;          // convex hull of the active generators
  RandomVariable x;
  double deviation = 0.0;
};

class RiskEnvelope {
 public:
  /// Generators must be extreme, distinct and satisfy E[Q] = 1.
  RiskEnvelope(FiniteProbSpace space, std::vector<Vector> generators, EnvelopeSpec spec,
               std::vector<std::string> diagnostics = {});

  const FiniteProbSpace& space() const { return space_; }
  const std::vector<Vector>& generators() const { return generators_; }
  const Vector& generator(Index i) const { return generators_[static_cast<std::size_t>(i)]; }
  Index size() const { return static_cast<Index>(generators_.size()); }
  const EnvelopeSpec& spec() const { return spec_; }
  EnvelopeKind kind() const { return spec_.kind; }
  /// Notes produced while building, such as dropped custom generators.
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

  VPolytope polytope() const { return VPolytope::from_vertices(generators_); }

  /// E[-X Q_i] for every generator.
  Vector scores(const RandomVariable& x) const;
  double evaluate(const RandomVariable& x) const;
  RiskIdentifierSet risk_identifiers(const RandomVariable& x, double rel_tol = 1e-9) const;

  /// D as a max-linear function on scenario space: gradients w o (1 - Q).
  PwlConvexFunction as_risk_function() const;

 private:
  FiniteProbSpace space_;
  std::vector<Vector> generators_;
  Matrix weighted_;  // K x N, row i = (w o Q_i)^T
  EnvelopeSpec spec_;
  std::vector<std::string> diagnostics_;
};

inline constexpr Index kMadScenarioGuard = 20;
inline constexpr std::size_t kCvarCandidateGuard = 1000000;

RiskEnvelope build_mad(const FiniteProbSpace& space);
RiskEnvelope build_cvar(const FiniteProbSpace& space, double alpha);
RiskEnvelope build_mixed_cvar(const FiniteProbSpace& space, const std::vector<double>& alphas,
                              const std::vector<double>& lambdas);

/// Envelope of sum_i lambda_i D_i.
RiskEnvelope mix(const std::vector<RiskEnvelope>& envelopes, const std::vector<double>& lambdas);
/// Envelope of max_i D_i.
RiskEnvelope max_combine(const std::vector<RiskEnvelope>& envelopes);
/// Envelope of lambda D: {(1 - lambda) + lambda Q}.
RiskEnvelope scale(const RiskEnvelope& envelope, double lambda);
/// User-supplied generators; duplicates and non-extreme points are dropped
/// and reported in diagnostics().
RiskEnvelope custom(const FiniteProbSpace& space, std::vector<Vector> generators);

/// Throws kUnsupported for the standard deviation, which has no finite set
/// of generators.
RiskEnvelope build_envelope(const EnvelopeSpec& spec, const FiniteProbSpace& space);

}  // namespace mdport
