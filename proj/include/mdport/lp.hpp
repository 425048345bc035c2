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

// Dense two-phase simplex with Bland's anti-cycling rule.
//
// Problems are stated as
//
//   minimize    c^T x
//   subject to  A_ub x <= b_ub
//               A_eq x  = b_eq
//               x_j >= 0 for j flagged non-negative, free otherwise.
//
// Multipliers follow the sign convention
//
//   c = -A_ub^T p + A_eq^T y + r,   p >= 0,   r >= 0 on non-negative vars,
//
// so that the dual objective is -b_ub^T p + b_eq^T y.

#include <Eigen/Dense>

#include <cstddef>
#include <string_view>
#include <vector>

namespace mdport {
class VPolytope;
}

namespace mdport::lp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

enum class Status { kOptimal, kInfeasible, kUnbounded };

std::string_view to_string(Status status);

struct LinearProgram {
  Vector objective;
  Matrix ub_matrix;
  Vector ub_rhs;
  Matrix eq_matrix;
  Vector eq_rhs;
  std::vector<bool> nonnegative;  // empty means every variable is free

  explicit LinearProgram(Index num_vars = 0);

  Index num_vars() const { return objective.size(); }
  Index num_ub() const { return ub_matrix.rows(); }
  Index num_eq() const { return eq_matrix.rows(); }
  bool is_nonnegative(Index j) const {
    return !nonnegative.empty() && nonnegative[static_cast<std::size_t>(j)];
  }

  void add_ub(const Vector& row, double rhs);
  void add_eq(const Vector& row, double rhs);

  /// Throws kDimensionMismatch when the pieces disagree.
  void validate() const;
};

struct Options {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-11;
  long max_iterations = 1'000'000;
};

struct Solution {
  Status status = Status::kInfeasible;
  Vector x;
  double value = 0.0;
  Vector ub_duals;       // p >= 0, one per inequality row
  Vector eq_duals;       // y, one per equality row
  Vector bound_duals;    // r >= 0 on non-negative variables, zero on free ones
  std::vector<Index> active_rows;  // inequality rows with zero slack
  Vector ray;            // improving direction when unbounded
  long iterations = 0;

  bool optimal() const { return status == Status::kOptimal; }
  double dual_value(const LinearProgram& lp) const;
};

Solution solve(const LinearProgram& lp, const Options& options = {});

/// Optimality certificate checked against the original problem data.
struct Certificate {
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double complementary_slackness = 0.0;
  double duality_gap = 0.0;
  bool ok = false;
};

/// Feasibility 1e-9, complementary slackness 1e-9 and relative duality gap
/// 1e-8, as required of every optimal solve.
Certificate certify(const LinearProgram& lp, const Solution& sol);

/// Every optimal point of `lp`, projected onto `coords`, as a V-polytope.
///
/// Rows with a strictly positive multiplier are fixed active; the remaining
/// rows that are tight at `sol.x` are tested with an auxiliary LP maximizing
/// their slack over the optimal face, since a single dual solution can miss
/// implicit equalities under dual degeneracy. Throws kUnboundedFace when the
/// optimal set is unbounded and kGuardExceeded when the face would need more
/// than `max_dim` free directions.
VPolytope optimal_face(const LinearProgram& lp, const Solution& sol,
                       const std::vector<Index>& coords, Index max_dim = 8);

}  // namespace mdport::lp
