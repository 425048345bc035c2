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

// Run configuration for the command-line tool (JSON, "schema": 1).

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mdport/blacklitterman.hpp"
#include "mdport/envelope.hpp"
#include "mdport/geometry.hpp"
#include "mdport/probspace.hpp"

namespace mdport {

struct RunConfig {
  int schema = 1;
  std::optional<FiniteProbSpace> space;
  std::optional<Matrix> returns;  // n x N
  bool centered = true;
  double riskless_rate = 0.0;

  std::optional<EnvelopeSpec> measure;
  std::optional<Vector> mu;
  std::optional<double> delta;
  std::optional<Vector> x_market;
  std::optional<double> delta_market;

  std::optional<Views> views;
  std::optional<Vector> posterior_weights;

  std::vector<EnvelopeSpec> agents;
  double capital = 0.0;

  std::string selector = "robust";  // robust | law_invariant | steiner
  std::optional<Vector> payoff;
  std::vector<Vector> subportfolios;
  std::vector<Vector> vertices;

  SteinerConfig steiner;

  const FiniteProbSpace& require_space() const;
  const Matrix& require_returns() const;
  const EnvelopeSpec& require_measure() const;
  /// Market from the configured returns; raw returns are centered and give
  /// mu = E[r] - r0 unless "mu" is set explicitly.
  MarketModel market() const;
};

/// `base_dir` resolves relative CSV paths. Throws kParseError on schema
/// violations.
RunConfig parse_config(const std::string& json_text,
                       const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

EnvelopeSpec parse_envelope_spec(const std::string& json_text);
/// JSON array of points, e.g. "[[1,2],[3,4]]".
std::vector<Vector> parse_points(const std::string& json_text);

}  // namespace mdport
