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

#include "mdport/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mdport/error.hpp"
#include "mdport/geometry.hpp"

namespace mdport::lp {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Standard form  min c^T z,  S z = h,  z >= 0  with h >= 0.
struct StandardForm {
  RowMatrix s;
  Vector h;
  Vector cost;
  std::vector<double> row_sign;   // +1 or -1 applied to each original row
  std::vector<Index> plus_col;    // per variable
  std::vector<Index> minus_col;   // per variable, -1 when non-negative
  std::vector<Index> slack_col;   // per inequality row
  Index structural = 0;           // number of non-artificial columns
};

StandardForm standardize(const LinearProgram& lp) {
  StandardForm sf;
  const Index n = lp.num_vars();
  const Index m_ub = lp.num_ub();
  const Index m_eq = lp.num_eq();
  const Index m = m_ub + m_eq;

  Index col = 0;
  sf.plus_col.resize(static_cast<std::size_t>(n));
  sf.minus_col.resize(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    sf.plus_col[static_cast<std::size_t>(j)] = col++;
    sf.minus_col[static_cast<std::size_t>(j)] = lp.is_nonnegative(j) ? -1 : col++;
  }
  sf.slack_col.resize(static_cast<std::size_t>(m_ub));
  for (Index i = 0; i < m_ub; ++i) sf.slack_col[static_cast<std::size_t>(i)] = col++;
  sf.structural = col;

  sf.s = RowMatrix::Zero(m, col);
  sf.h.resize(m);
  sf.cost = Vector::Zero(col);
  sf.row_sign.assign(static_cast<std::size_t>(m), 1.0);

  for (Index j = 0; j < n; ++j) {
    const Index pc = sf.plus_col[static_cast<std::size_t>(j)];
    const Index mc = sf.minus_col[static_cast<std::size_t>(j)];
    sf.cost(pc) = lp.objective(j);
    if (mc >= 0) sf.cost(mc) = -lp.objective(j);
    for (Index i = 0; i < m_ub; ++i) {
      sf.s(i, pc) = lp.ub_matrix(i, j);
      if (mc >= 0) sf.s(i, mc) = -lp.ub_matrix(i, j);
    }
    for (Index i = 0; i < m_eq; ++i) {
      sf.s(m_ub + i, pc) = lp.eq_matrix(i, j);
      if (mc >= 0) sf.s(m_ub + i, mc) = -lp.eq_matrix(i, j);
    }
  }
  for (Index i = 0; i < m_ub; ++i) {
    sf.s(i, sf.slack_col[static_cast<std::size_t>(i)]) = 1.0;
    sf.h(i) = lp.ub_rhs(i);
  }
  for (Index i = 0; i < m_eq; ++i) sf.h(m_ub + i) = lp.eq_rhs(i);
  for (Index i = 0; i < m; ++i) {
    if (sf.h(i) < 0.0) {
      sf.s.row(i) *= -1.0;
      sf.h(i) = -sf.h(i);
      sf.row_sign[static_cast<std::size_t>(i)] = -1.0;
    }
  }
  return sf;
}

class Tableau {
 public:
  Tableau(RowMatrix body, Vector rhs, std::vector<Index> basis, const Options& options)
      : t_(std::move(body)), rhs_(std::move(rhs)), basis_(std::move(basis)),
        options_(options) {}

  // Runs Bland's rule on `cost` over the columns flagged eligible. Returns
  // false when unbounded; `entering` then names the unbounded column.
  bool optimize(const Vector& cost, const std::vector<bool>& eligible, long& iterations,
                Index& entering) {
    Vector reduced = cost;
    for (Index i = 0; i < rows(); ++i) reduced -= cost(basis_[static_cast<std::size_t>(i)]) *
                                                 t_.row(i).transpose();
    for (;;) {
      entering = -1;
      for (Index j = 0; j < t_.cols(); ++j) {
        if (eligible[static_cast<std::size_t>(j)] && reduced(j) < -options_.optimality_tol) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return true;
      const Index leaving = ratio_test(entering);
      if (leaving < 0) return false;
      pivot(leaving, entering);
      reduced -= reduced(entering) * t_.row(leaving).transpose();
      reduced(entering) = 0.0;
      if (++iterations > options_.max_iterations) {
        fail(ErrorCode::kIterationLimit,
             "simplex exceeded " + std::to_string(options_.max_iterations) + " pivots");
      }
    }
  }

  Index ratio_test(Index col) const {
    Index best = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < rows(); ++i) {
      const double a = t_(i, col);
      if (a <= options_.pivot_tol) continue;
      const double ratio = std::max(rhs_(i), 0.0) / a;
      const double tie = 1e-12 * std::max(1.0, std::abs(best_ratio));
      if (best < 0 || ratio < best_ratio - tie ||
          (ratio <= best_ratio + tie &&
           basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(best)])) {
        best = i;
        best_ratio = std::min(ratio, best_ratio);
      }
    }
    return best;
  }

  void pivot(Index row, Index col) {
    const double p = t_(row, col);
    t_.row(row) /= p;
    rhs_(row) /= p;
    Vector factors = t_.col(col);
    factors(row) = 0.0;
    t_.noalias() -= factors * t_.row(row);
    rhs_ -= factors * rhs_(row);
    for (Index i = 0; i < rhs_.size(); ++i) {
      if (rhs_(i) < 0.0 && rhs_(i) > -1e-13) rhs_(i) = 0.0;
    }
    basis_[static_cast<std::size_t>(row)] = col;
  }

  void remove_row(Index row) {
    const Index last = rows() - 1;
    if (row != last) {
      t_.row(row) = t_.row(last);
      rhs_(row) = rhs_(last);
      basis_[static_cast<std::size_t>(row)] = basis_[static_cast<std::size_t>(last)];
      kept_[static_cast<std::size_t>(row)] = kept_[static_cast<std::size_t>(last)];
    }
    t_.conservativeResize(last, Eigen::NoChange);
    rhs_.conservativeResize(last);
    basis_.pop_back();
    kept_.pop_back();
  }

  Index rows() const { return t_.rows(); }
  const RowMatrix& body() const { return t_; }
  const Vector& rhs() const { return rhs_; }
  const std::vector<Index>& basis() const { return basis_; }
  std::vector<Index>& kept_rows() { return kept_; }

 private:
  RowMatrix t_;
  Vector rhs_;
  std::vector<Index> basis_;
  std::vector<Index> kept_;
  const Options& options_;
};

}  // namespace

std::string_view to_string(Status status) {
  switch (status) {
    case Status::kOptimal: return "Optimal";
    case Status::kInfeasible: return "Infeasible";
    case Status::kUnbounded: return "Unbounded";
  }
  return "Unknown";
}

LinearProgram::LinearProgram(Index num_vars)
    : objective(Vector::Zero(num_vars)),
      ub_matrix(0, num_vars),
      ub_rhs(0),
      eq_matrix(0, num_vars),
      eq_rhs(0) {}

void LinearProgram::add_ub(const Vector& row, double rhs) {
  require(row.size() == num_vars(), ErrorCode::kDimensionMismatch, "LP row width mismatch");
  ub_matrix.conservativeResize(ub_matrix.rows() + 1, num_vars());
  ub_matrix.row(ub_matrix.rows() - 1) = row.transpose();
  ub_rhs.conservativeResize(ub_rhs.size() + 1);
  ub_rhs(ub_rhs.size() - 1) = rhs;
}

void LinearProgram::add_eq(const Vector& row, double rhs) {
  require(row.size() == num_vars(), ErrorCode::kDimensionMismatch, "LP row width mismatch");
  eq_matrix.conservativeResize(eq_matrix.rows() + 1, num_vars());
  eq_matrix.row(eq_matrix.rows() - 1) = row.transpose();
  eq_rhs.conservativeResize(eq_rhs.size() + 1);
  eq_rhs(eq_rhs.size() - 1) = rhs;
}

void LinearProgram::validate() const {
  const Index n = num_vars();
  require(ub_matrix.cols() == n && eq_matrix.cols() == n, ErrorCode::kDimensionMismatch,
          "LP constraint matrices must have one column per variable");
  require(ub_rhs.size() == ub_matrix.rows() && eq_rhs.size() == eq_matrix.rows(),
          ErrorCode::kDimensionMismatch, "LP right-hand sides must match row counts");
  require(nonnegative.empty() || static_cast<Index>(nonnegative.size()) == n,
          ErrorCode::kDimensionMismatch, "LP sign flags must cover every variable");
  require(objective.allFinite() && ub_matrix.allFinite() && eq_matrix.allFinite() &&
              ub_rhs.allFinite() && eq_rhs.allFinite(),
          ErrorCode::kInvalidArgument, "LP data must be finite");
}

double Solution::dual_value(const LinearProgram& lp) const {
  return -lp.ub_rhs.dot(ub_duals) + lp.eq_rhs.dot(eq_duals);
}

Solution solve(const LinearProgram& lp, const Options& options) {
  lp.validate();
  StandardForm sf = standardize(lp);
  const Index m = sf.s.rows();
  const Index m_ub = lp.num_ub();
  const Index n = lp.num_vars();

  // Initial basis: slacks of unflipped inequality rows, artificials elsewhere.
  std::vector<Index> basis(static_cast<std::size_t>(m), -1);
  std::vector<Index> artificial_rows;
  for (Index i = 0; i < m_ub; ++i) {
    if (sf.row_sign[static_cast<std::size_t>(i)] > 0.0) {
      basis[static_cast<std::size_t>(i)] = sf.slack_col[static_cast<std::size_t>(i)];
    } else {
      artificial_rows.push_back(i);
    }
  }
  for (Index i = m_ub; i < m; ++i) artificial_rows.push_back(i);

  const Index n_art = static_cast<Index>(artificial_rows.size());
  const Index total = sf.structural + n_art;
  RowMatrix body = RowMatrix::Zero(m, total);
  body.leftCols(sf.structural) = sf.s;
  for (Index k = 0; k < n_art; ++k) {
    const Index row = artificial_rows[static_cast<std::size_t>(k)];
    body(row, sf.structural + k) = 1.0;
    basis[static_cast<std::size_t>(row)] = sf.structural + k;
  }

  Tableau tab(std::move(body), sf.h, basis, options);
  tab.kept_rows().resize(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) tab.kept_rows()[static_cast<std::size_t>(i)] = i;

  Solution sol;
  long iterations = 0;
  const double rhs_scale = std::max(1.0, sf.h.size() ? sf.h.cwiseAbs().maxCoeff() : 0.0);

  if (n_art > 0) {
    Vector phase1_cost = Vector::Zero(total);
    phase1_cost.tail(n_art).setOnes();
    std::vector<bool> eligible(static_cast<std::size_t>(total), true);
    Index entering = -1;
    tab.optimize(phase1_cost, eligible, iterations, entering);
    double infeasibility = 0.0;
    for (Index i = 0; i < tab.rows(); ++i) {
      if (tab.basis()[static_cast<std::size_t>(i)] >= sf.structural) infeasibility += tab.rhs()(i);
    }
    if (infeasibility > options.feasibility_tol * rhs_scale) {
      sol.status = Status::kInfeasible;
      sol.iterations = iterations;
      return sol;
    }
    // Drive remaining zero-level artificials out of the basis.
    for (Index i = 0; i < tab.rows();) {
      if (tab.basis()[static_cast<std::size_t>(i)] < sf.structural) {
        ++i;
        continue;
      }
      Index col = -1;
      double best = 1e-9;
      for (Index j = 0; j < sf.structural; ++j) {
        if (std::abs(tab.body()(i, j)) > best) {
          best = std::abs(tab.body()(i, j));
          col = j;
        }
      }
      if (col >= 0) {
        tab.pivot(i, col);
        ++i;
      } else {
        tab.remove_row(i);  // redundant equality
      }
    }
  }

  Vector phase2_cost = Vector::Zero(total);
  phase2_cost.head(sf.structural) = sf.cost;
  std::vector<bool> eligible(static_cast<std::size_t>(total), false);
  for (Index j = 0; j < sf.structural; ++j) eligible[static_cast<std::size_t>(j)] = true;
  Index entering = -1;
  const bool bounded = tab.optimize(phase2_cost, eligible, iterations, entering);
  sol.iterations = iterations;

  // Primal point in standard coordinates.
  Vector z = Vector::Zero(total);
  for (Index i = 0; i < tab.rows(); ++i) z(tab.basis()[static_cast<std::size_t>(i)]) = tab.rhs()(i);
  auto to_original = [&](const Vector& zz) {
    Vector x(n);
    for (Index j = 0; j < n; ++j) {
      const Index pc = sf.plus_col[static_cast<std::size_t>(j)];
      const Index mc = sf.minus_col[static_cast<std::size_t>(j)];
      x(j) = zz(pc) - (mc >= 0 ? zz(mc) : 0.0);
    }
    return x;
  };
  sol.x = to_original(z);

  if (!bounded) {
    Vector dz = Vector::Zero(total);
    dz(entering) = 1.0;
    for (Index i = 0; i < tab.rows(); ++i) {
      dz(tab.basis()[static_cast<std::size_t>(i)]) = -tab.body()(i, entering);
    }
    sol.status = Status::kUnbounded;
    sol.ray = to_original(dz);
    sol.value = -std::numeric_limits<double>::infinity();
    return sol;
  }

  sol.status = Status::kOptimal;
  sol.value = lp.objective.dot(sol.x);

  // Duals from B^T y = c_B on the kept rows of the standardized system.
  const Index mk = tab.rows();
  Vector y_std = Vector::Zero(m);
  if (mk > 0) {
    Matrix basis_matrix(mk, mk);
    Vector c_b(mk);
    for (Index k = 0; k < mk; ++k) {
      const Index col = tab.basis()[static_cast<std::size_t>(k)];
      c_b(k) = sf.cost(col);
      for (Index r = 0; r < mk; ++r) {
        basis_matrix(r, k) = sf.s(tab.kept_rows()[static_cast<std::size_t>(r)], col);
      }
    }
    const Vector y_kept = basis_matrix.transpose().fullPivLu().solve(c_b);
    for (Index r = 0; r < mk; ++r) y_std(tab.kept_rows()[static_cast<std::size_t>(r)]) = y_kept(r);
  }
  sol.ub_duals.resize(m_ub);
  sol.eq_duals.resize(lp.num_eq());
  for (Index i = 0; i < m_ub; ++i) {
    sol.ub_duals(i) = std::max(0.0, -sf.row_sign[static_cast<std::size_t>(i)] * y_std(i));
  }
  for (Index i = 0; i < lp.num_eq(); ++i) {
    sol.eq_duals(i) = sf.row_sign[static_cast<std::size_t>(m_ub + i)] * y_std(m_ub + i);
  }
  sol.bound_duals = Vector::Zero(n);
  const Vector residual = lp.objective + lp.ub_matrix.transpose() * sol.ub_duals -
                          lp.eq_matrix.transpose() * sol.eq_duals;
  for (Index j = 0; j < n; ++j) {
    if (lp.is_nonnegative(j)) sol.bound_duals(j) = std::max(0.0, residual(j));
  }

  const Vector slack = lp.ub_rhs - lp.ub_matrix * sol.x;
  for (Index i = 0; i < m_ub; ++i) {
    if (std::abs(slack(i)) <= options.feasibility_tol * (1.0 + std::abs(lp.ub_rhs(i)))) {
      sol.active_rows.push_back(i);
    }
  }
  return sol;
}

Certificate certify(const LinearProgram& lp, const Solution& sol) {
  Certificate cert;
  if (!sol.optimal()) return cert;
  const Vector slack = lp.ub_rhs - lp.ub_matrix * sol.x;
  double primal = 0.0;
  for (Index i = 0; i < slack.size(); ++i) primal = std::max(primal, -slack(i));
  if (lp.num_eq() > 0) {
    primal = std::max(primal, (lp.eq_matrix * sol.x - lp.eq_rhs).cwiseAbs().maxCoeff());
  }
  for (Index j = 0; j < lp.num_vars(); ++j) {
    if (lp.is_nonnegative(j)) primal = std::max(primal, -sol.x(j));
  }
  cert.primal_infeasibility = primal;

  const Vector residual = lp.objective + lp.ub_matrix.transpose() * sol.ub_duals -
                          lp.eq_matrix.transpose() * sol.eq_duals - sol.bound_duals;
  cert.dual_infeasibility = residual.size() ? residual.cwiseAbs().maxCoeff() : 0.0;

  double cs = 0.0;
  for (Index i = 0; i < slack.size(); ++i) cs = std::max(cs, std::abs(sol.ub_duals(i) * slack(i)));
  for (Index j = 0; j < lp.num_vars(); ++j) {
    cs = std::max(cs, std::abs(sol.bound_duals(j) * sol.x(j)));
  }
  cert.complementary_slackness = cs;
  cert.duality_gap = std::abs(sol.value - sol.dual_value(lp));
  cert.ok = cert.primal_infeasibility <= 1e-9 && cert.dual_infeasibility <= 1e-9 &&
            cert.complementary_slackness <= 1e-9 &&
            cert.duality_gap <= 1e-8 * (1.0 + std::abs(sol.value));
  return cert;
}

VPolytope optimal_face(const LinearProgram& lp, const Solution& sol,
                       const std::vector<Index>& coords, Index max_dim) {
  require(sol.optimal(), ErrorCode::kInvalidArgument,
          "optimal face requested for a non-optimal solution");
  const Index n = lp.num_vars();
  const double dual_tol = 1e-9;
  const double slack_tol = 1e-8;

  // Inequalities of the original problem, with sign bounds folded in.
  Matrix ineq = lp.ub_matrix;
  Vector ineq_rhs = lp.ub_rhs;
  Vector ineq_dual = sol.ub_duals;
  for (Index j = 0; j < n; ++j) {
    if (!lp.is_nonnegative(j)) continue;
    const Index r = ineq.rows();
    ineq.conservativeResize(r + 1, n);
    ineq.row(r).setZero();
    ineq(r, j) = -1.0;
    ineq_rhs.conservativeResize(r + 1);
    ineq_rhs(r) = 0.0;
    ineq_dual.conservativeResize(r + 1);
    ineq_dual(r) = sol.bound_duals(j);
  }

  // The optimal face: original constraints plus c^T x <= c*.
  LinearProgram face(n);
  face.ub_matrix = ineq;
  face.ub_rhs = ineq_rhs;
  face.eq_matrix = lp.eq_matrix;
  face.eq_rhs = lp.eq_rhs;
  face.add_eq(lp.objective, sol.value);

  std::vector<bool> equality(static_cast<std::size_t>(ineq.rows()), false);
  const Vector slack = ineq_rhs - ineq * sol.x;
  for (Index i = 0; i < ineq.rows(); ++i) {
    const double scale = 1.0 + ineq.row(i).norm() * (1.0 + sol.x.norm());
    if (ineq_dual(i) > dual_tol) {
      equality[static_cast<std::size_t>(i)] = true;
    } else if (std::abs(slack(i)) <= slack_tol * scale) {
      LinearProgram probe = face;
      probe.objective = ineq.row(i).transpose();  // minimize a_i x, i.e. maximize slack
      const Solution ps = solve(probe);
      if (ps.optimal() && ineq_rhs(i) - ps.value <= slack_tol * scale) {
        equality[static_cast<std::size_t>(i)] = true;
      }
    }
  }

  HPolytope h;
  h.eq_matrix = face.eq_matrix;
  h.eq_rhs = face.eq_rhs;
  h.ub_matrix.resize(0, n);
  h.ub_rhs.resize(0);
  for (Index i = 0; i < ineq.rows(); ++i) {
    Matrix& target = equality[static_cast<std::size_t>(i)] ? h.eq_matrix : h.ub_matrix;
    Vector& rhs = equality[static_cast<std::size_t>(i)] ? h.eq_rhs : h.ub_rhs;
    const Index r = target.rows();
    target.conservativeResize(r + 1, n);
    target.row(r) = ineq.row(i);
    rhs.conservativeResize(r + 1);
    rhs(r) = ineq_rhs(i);
  }

  const VPolytope full = vertices_of(h, &sol.x, max_dim);
  std::vector<Vector> projected;
  projected.reserve(static_cast<std::size_t>(full.size()));
  for (const Vector& v : full.vertices()) {
    Vector p(static_cast<Index>(coords.size()));
    for (std::size_t k = 0; k < coords.size(); ++k) p(static_cast<Index>(k)) = v(coords[k]);
    projected.push_back(std::move(p));
  }
  return VPolytope::from_points(std::move(projected), 1e-8);
}

}  // namespace mdport::lp
