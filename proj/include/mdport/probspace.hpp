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

// Finite probability spaces and scenario-indexed random variables.
//
// A random variable on an N-point space is an N-vector of payoffs, one per
// scenario, in the space's scenario order. Scenario order is never changed.

#include <Eigen/Dense>

#include <filesystem>
#include <string>

namespace mdport {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RandomVariable = Eigen::VectorXd;

class FiniteProbSpace {
 public:
  /// Validates positivity and unit mass (absolute tolerance 1e-12); weights
  /// inside the tolerance are renormalized, anything else is rejected.
  explicit FiniteProbSpace(Vector weights);

  static FiniteProbSpace uniform(Eigen::Index n);

  Eigen::Index size() const { return weights_.size(); }
  const Vector& weights() const { return weights_; }
  double weight(Eigen::Index j) const { return weights_(j); }
  bool is_uniform() const { return uniform_; }

  double expectation(const RandomVariable& x) const;
  /// Row-wise expectation of an n x N matrix of scenario columns.
  Vector expectation_rows(const Matrix& m) const;

  void check_dimension(const RandomVariable& x, const char* what) const;

  friend bool operator==(const FiniteProbSpace& a, const FiniteProbSpace& b) {
    return a.weights_.size() == b.weights_.size() && a.weights_ == b.weights_;
  }

 private:
  Vector weights_;
  bool uniform_ = false;
};

inline double expectation(const FiniteProbSpace& space, const RandomVariable& x) {
  return space.expectation(x);
}

/// Centered returns R^ (n x N, one row per asset), expected excess returns mu,
/// riskless rate and the return target.
struct MarketModel {
  FiniteProbSpace space;
  Matrix centered_returns;
  Vector mu;
  double riskless_rate = 0.0;
  double target = 0.0;

  Eigen::Index assets() const { return centered_returns.rows(); }
  Eigen::Index scenarios() const { return centered_returns.cols(); }

  /// Portfolio payoff R^T x as a random variable.
  RandomVariable portfolio_return(const Vector& x) const;

  /// Builds a market from already-centered returns. Checks centering within
  /// 1e-10 and the rank condition (no non-zero portfolio is riskless).
  static MarketModel from_centered(FiniteProbSpace space, Matrix centered,
                                   Vector mu, double target = 0.0);
};

/// Centers raw returns (n x N) under `space`; mu_i = E[r_i] - r0.
MarketModel center_market(const Matrix& raw_returns, const FiniteProbSpace& space,
                          double riskless_rate, double target);

/// Rank by Gaussian elimination with partial pivoting; pivots below
/// `rel_tol` times the largest row norm count as zero.
Eigen::Index numerical_rank(const Matrix& m, double rel_tol = 1e-10);

struct ScenarioTable {
  Matrix returns;  // n assets x N scenarios
  FiniteProbSpace space;
};

/// Reads a rectangular numeric CSV with one column per asset and one row per
/// scenario. A non-numeric first row is treated as a header.
ScenarioTable ingest_csv(const std::filesystem::path& path);
ScenarioTable parse_csv(const std::string& text);

}  // namespace mdport
