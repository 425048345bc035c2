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

#include "mdport/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <sstream>

#include "mdport/error.hpp"

namespace mdport {

namespace {

void check_lambdas(const std::vector<double>& lambdas, std::size_t expected, bool unit_sum) {
  require(!lambdas.empty(), ErrorCode::kInvalidArgument, "at least one weight is required");
  require(lambdas.size() == expected, ErrorCode::kDimensionMismatch,
          "one weight per component is required");
  double total = 0.0;
  for (double l : lambdas) {
    require(std::isfinite(l) && l > 0.0, ErrorCode::kInvalidArgument,
            "combination weights must be positive");
    total += l;
  }
  if (unit_sum) {
    require(std::abs(total - 1.0) <= 1e-12, ErrorCode::kInvalidArgument,
            "combination weights must sum to 1");
  }
}

void check_alpha(double alpha) {
  require(std::isfinite(alpha) && alpha > 0.0 && alpha < 1.0, ErrorCode::kInvalidArgument,
          "CVaR level alpha must lie in (0, 1)");
}

void check_shared_space(const std::vector<RiskEnvelope>& envelopes) {
  require(!envelopes.empty(), ErrorCode::kInvalidArgument, "no envelopes to combine");
  for (const RiskEnvelope& e : envelopes) {
    require(e.space() == envelopes.front().space(), ErrorCode::kDimensionMismatch,
            "envelopes live on different probability spaces");
  }
}

std::string format_double(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace

// ------------------------------------------------------------------ spec

EnvelopeSpec EnvelopeSpec::mad() { return EnvelopeSpec{}; }

EnvelopeSpec EnvelopeSpec::cvar(double alpha) {
  EnvelopeSpec s;
  s.kind = EnvelopeKind::kCvar;
  s.alpha = alpha;
  return s;
}

EnvelopeSpec EnvelopeSpec::mixed_cvar(std::vector<double> alphas, std::vector<double> lambdas) {
  EnvelopeSpec s;
  s.kind = EnvelopeKind::kMixedCvar;
  s.alphas = std::move(alphas);
  s.lambdas = std::move(lambdas);
  return s;
}

EnvelopeSpec EnvelopeSpec::scaled(double lambda, EnvelopeSpec inner) {
  EnvelopeSpec s;
  s.kind = EnvelopeKind::kScaled;
  s.lambda = lambda;
  s.parts.push_back(std::move(inner));
  return s;
}

EnvelopeSpec EnvelopeSpec::mix(std::vector<EnvelopeSpec> parts, std::vector<double> lambdas) {
  EnvelopeSpec s;
  s.kind = EnvelopeKind::kMix;
  s.parts = std::move(parts);
  s.lambdas = std::move(lambdas);
  return s;
}

EnvelopeSpec EnvelopeSpec::max(std::vector<EnvelopeSpec> parts) {
  EnvelopeSpec s;
  s.kind = EnvelopeKind::kMax;
  s.parts = std::move(parts);
  return s;
}

EnvelopeSpec EnvelopeSpec::custom(std::vector<Vector> generators) {
  EnvelopeSpec s;
  s.kind = EnvelopeKind::kCustom;
  s.generators = std::move(generators);
  return s;
}

EnvelopeSpec EnvelopeSpec::stddev() {
  EnvelopeSpec s;
  s.kind = EnvelopeKind::kStdDev;
  return s;
}

std::string EnvelopeSpec::label() const {
  auto join = [this](const char* name) {
    std::string out = std::string(name) + "(";
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i) out += ", ";
      if (i < lambdas.size()) out += format_double(lambdas[i]) + "*";
      out += parts[i].label();
    }
    return out + ")";
  };
  switch (kind) {
    case EnvelopeKind::kMad:
      return "mad";
    case EnvelopeKind::kCvar:
      return "cvar(" + format_double(alpha) + ")";
    case EnvelopeKind::kMixedCvar: {
      std::string out = "mixed_cvar(";
      for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (i) out += ", ";
        out += format_double(i < lambdas.size() ? lambdas[i] : 0.0) + "*cvar(" +
               format_double(alphas[i]) + ")";
      }
      return out + ")";
    }
    case EnvelopeKind::kScaled:
      return format_double(lambda) + "*" + (parts.empty() ? "?" : parts.front().label());
    case EnvelopeKind::kMix:
      return join("mix");
    case EnvelopeKind::kMax:
      return join("max");
    case EnvelopeKind::kCustom:
      return "custom(" + std::to_string(generators.size()) + ")";
    case EnvelopeKind::kStdDev:
      return "stddev";
  }
  return "unknown";
}

// -------------------------------------------------------------- envelope

RiskEnvelope::RiskEnvelope(FiniteProbSpace space, std::vector<Vector> generators,
                           EnvelopeSpec spec, std::vector<std::string> diagnostics)
    : space_(std::move(space)),
      generators_(std::move(generators)),
      spec_(std::move(spec)),
      diagnostics_(std::move(diagnostics)) {
  require(!generators_.empty(), ErrorCode::kInvalidArgument, "risk envelope has no generators");
  const Index n = space_.size();
  weighted_.resize(size(), n);
  for (Index i = 0; i < size(); ++i) {
    const Vector& q = generator(i);
    require(q.size() == n, ErrorCode::kDimensionMismatch,
            "generator length differs from the number of scenarios");
    require(q.allFinite(), ErrorCode::kInvalidArgument, "generators must be finite");
    const double mean = space_.expectation(q);
    require(std::abs(mean - 1.0) <= 1e-10, ErrorCode::kInvalidArgument,
            "every risk generator needs E[Q] = 1 (got " + format_double(mean) + ")");
    weighted_.row(i) = space_.weights().cwiseProduct(q).transpose();
  }
}

Vector RiskEnvelope::scores(const RandomVariable& x) const {
  space_.check_dimension(x, "random variable");
  return -(weighted_ * x);
}

double RiskEnvelope::evaluate(const RandomVariable& x) const {
  space_.check_dimension(x, "random variable");
  if (x.maxCoeff() == x.minCoeff()) return 0.0;
  return space_.expectation(x) + scores(x).maxCoeff();
}

RiskIdentifierSet RiskEnvelope::risk_identifiers(const RandomVariable& x, double rel_tol) const {
  const Vector s = scores(x);
  const double best = s.maxCoeff();
  const double tol = rel_tol * (1.0 + std::abs(best));
  std::vector<Index> indices;
  std::vector<Vector> active;
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) >= best - tol) {
      indices.push_back(i);
      active.push_back(generator(i));
    }
  }
  return RiskIdentifierSet{std::move(indices), VPolytope::from_vertices(std::move(active)), x,
                           evaluate(x)};
}

PwlConvexFunction RiskEnvelope::as_risk_function() const {
  std::vector<Vector> gradients;
  gradients.reserve(generators_.size());
  for (const Vector& q : generators_) {
    gradients.push_back(space_.weights().cwiseProduct(Vector::Ones(q.size()) - q));
  }
  return PwlConvexFunction(std::move(gradients));
}

// -------------------------------------------------------------- builders

RiskEnvelope build_mad(const FiniteProbSpace& space) {
  const Index n = space.size();
  if (n > kMadScenarioGuard) {
    fail(ErrorCode::kTooManyScenarios,
         "MAD envelope has 2^N - 2 generators; N = " + std::to_string(n) + " exceeds the guard of " +
             std::to_string(kMadScenarioGuard));
  }
  require(n >= 2, ErrorCode::kInvalidArgument, "MAD needs at least two scenarios");
  // Q = 1 + E[Z] - Z for sign vectors Z with a non-empty proper positive set.
  // The map Z -> Q only collapses the direction of constants, so every such Z
  // gives a distinct extreme point.
  const std::uint64_t count = std::uint64_t{1} << n;
  std::vector<Vector> generators;
  generators.reserve(static_cast<std::size_t>(count - 2));
  Vector z(n);
  for (std::uint64_t mask = 1; mask + 1 < count; ++mask) {
    for (Index j = 0; j < n; ++j) z(j) = ((mask >> j) & 1U) ? 1.0 : -1.0;
    generators.push_back((1.0 + space.expectation(z)) * Vector::Ones(n) - z);
  }
  return RiskEnvelope(space, std::move(generators), EnvelopeSpec::mad());
}

RiskEnvelope build_cvar(const FiniteProbSpace& space, double alpha) {
  check_alpha(alpha);
  const Index n = space.size();
  const Vector& w = space.weights();
  const double cap = 1.0 / alpha;
  const double tie = 1e-12;
  // Vertices of {E[Q] = 1, 0 <= Q <= 1/alpha}: a set U at the cap, at most
  // one fractional coordinate f, zeros elsewhere. Walk subsets U with
  // w(U) <= alpha.
  std::vector<Vector> generators;
  std::size_t candidates = 0;
  std::vector<Index> chosen;
  auto emit = [&](double mass) {
    Vector q = Vector::Zero(n);
    for (Index j : chosen) q(j) = cap;
    if (std::abs(mass - alpha) <= tie) {
      generators.push_back(q);
      return;
    }
    for (Index f = 0; f < n; ++f) {
      if (q(f) != 0.0 || mass + w(f) <= alpha + tie) continue;
      if (++candidates > kCvarCandidateGuard) {
        fail(ErrorCode::kGuardExceeded, "CVaR vertex enumeration exceeds 1e6 candidates");
      }
      Vector v = q;
      v(f) = (1.0 - mass / alpha) / w(f);
      generators.push_back(std::move(v));
    }
  };
  std::function<void(Index, double)> walk = [&](Index start, double mass) {
    if (++candidates > kCvarCandidateGuard) {
      fail(ErrorCode::kGuardExceeded, "CVaR vertex enumeration exceeds 1e6 candidates");
    }
    emit(mass);
    if (std::abs(mass - alpha) <= tie) return;
    for (Index j = start; j < n; ++j) {
      if (mass + w(j) > alpha + tie) continue;
      chosen.push_back(j);
      walk(j + 1, mass + w(j));
      chosen.pop_back();
    }
  };
  walk(0, 0.0);
  double scale = cap;
  return RiskEnvelope(space, dedup_points(generators, 1e-10 * scale), EnvelopeSpec::cvar(alpha));
}

RiskEnvelope build_mixed_cvar(const FiniteProbSpace& space, const std::vector<double>& alphas,
                              const std::vector<double>& lambdas) {
  check_lambdas(lambdas, alphas.size(), true);
  std::vector<RiskEnvelope> parts;
  for (double a : alphas) parts.push_back(build_cvar(space, a));
  RiskEnvelope combined = mix(parts, lambdas);
  return RiskEnvelope(space, combined.generators(), EnvelopeSpec::mixed_cvar(alphas, lambdas));
}

RiskEnvelope mix(const std::vector<RiskEnvelope>& envelopes, const std::vector<double>& lambdas) {
  check_shared_space(envelopes);
  check_lambdas(lambdas, envelopes.size(), false);
  const FiniteProbSpace& space = envelopes.front().space();
  const double total = std::accumulate(lambdas.begin(), lambdas.end(), 0.0);
  // Envelope of sum lambda_i D_i is (1 - sum lambda) + sum lambda_i Q_i.
  VPolytope acc = VPolytope::from_vertices(
      {(1.0 - total) * Vector::Ones(space.size())});
  for (std::size_t i = 0; i < envelopes.size(); ++i) {
    std::vector<Vector> scaled;
    for (const Vector& q : envelopes[i].generators()) scaled.push_back(lambdas[i] * q);
    acc = minkowski_sum(acc, VPolytope::from_vertices(std::move(scaled)));
  }
  std::vector<EnvelopeSpec> specs;
  for (const RiskEnvelope& e : envelopes) specs.push_back(e.spec());
  return RiskEnvelope(space, acc.vertices(), EnvelopeSpec::mix(std::move(specs), lambdas));
}

RiskEnvelope max_combine(const std::vector<RiskEnvelope>& envelopes) {
  check_shared_space(envelopes);
  std::vector<Vector> all;
  std::vector<EnvelopeSpec> specs;
  for (const RiskEnvelope& e : envelopes) {
    all.insert(all.end(), e.generators().begin(), e.generators().end());
    specs.push_back(e.spec());
  }
  VPolytope hull = VPolytope::from_points(std::move(all));
  return RiskEnvelope(envelopes.front().space(), hull.vertices(),
                      EnvelopeSpec::max(std::move(specs)));
}

RiskEnvelope scale(const RiskEnvelope& envelope, double lambda) {
  require(std::isfinite(lambda) && lambda > 0.0, ErrorCode::kInvalidArgument,
          "scale factor must be positive");
  std::vector<Vector> generators;
  for (const Vector& q : envelope.generators()) {
    generators.push_back(((1.0 - lambda) * Vector::Ones(q.size()) + lambda * q).eval());
  }
  return RiskEnvelope(envelope.space(), std::move(generators),
                      EnvelopeSpec::scaled(lambda, envelope.spec()));
}

RiskEnvelope custom(const FiniteProbSpace& space, std::vector<Vector> generators) {
  require(!generators.empty(), ErrorCode::kInvalidArgument, "custom envelope has no generators");
  for (const Vector& q : generators) {
    require(q.size() == space.size(), ErrorCode::kDimensionMismatch,
            "custom generator length differs from the number of scenarios");
    require(std::abs(space.expectation(q) - 1.0) <= 1e-10, ErrorCode::kInvalidArgument,
            "custom generator violates E[Q] = 1");
  }
  const std::size_t given = generators.size();
  VPolytope hull = VPolytope::from_points(generators);
  std::vector<std::string> notes;
  if (static_cast<std::size_t>(hull.size()) != given) {
    notes.push_back("custom envelope: kept " + std::to_string(hull.size()) + " of " +
                    std::to_string(given) + " generators (duplicates or non-extreme points dropped)");
  }
  return RiskEnvelope(space, hull.vertices(), EnvelopeSpec::custom(std::move(generators)),
                      std::move(notes));
}

RiskEnvelope build_envelope(const EnvelopeSpec& spec, const FiniteProbSpace& space) {
  switch (spec.kind) {
    case EnvelopeKind::kMad:
      return build_mad(space);
    case EnvelopeKind::kCvar:
      return build_cvar(space, spec.alpha);
    case EnvelopeKind::kMixedCvar:
      return build_mixed_cvar(space, spec.alphas, spec.lambdas);
    case EnvelopeKind::kScaled:
      require(spec.parts.size() == 1, ErrorCode::kInvalidArgument,
              "scaled envelope needs exactly one inner envelope");
      return scale(build_envelope(spec.parts.front(), space), spec.lambda);
    case EnvelopeKind::kMix:
    case EnvelopeKind::kMax: {
      std::vector<RiskEnvelope> parts;
      for (const EnvelopeSpec& p : spec.parts) parts.push_back(build_envelope(p, space));
      return spec.kind == EnvelopeKind::kMix ? mix(parts, spec.lambdas) : max_combine(parts);
    }
    case EnvelopeKind::kCustom:
      return custom(space, spec.generators);
    case EnvelopeKind::kStdDev:
      fail(ErrorCode::kUnsupported,
           "the standard deviation is not finitely generated: its risk envelope is an "
           "ellipsoid with infinitely many extreme points");
  }
  fail(ErrorCode::kInvalidArgument, "unknown envelope kind");
}

}  // namespace mdport
