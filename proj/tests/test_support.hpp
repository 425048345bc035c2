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

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <initializer_list>
#include <random>
#include <vector>

#include "mdport/geometry.hpp"
#include "mdport/probspace.hpp"

namespace mdport::testing {

inline Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

// Scenario rows -> n x N matrix.
inline Matrix scenarios(std::initializer_list<std::initializer_list<double>> rows) {
  const auto big_n = static_cast<Index>(rows.size());
  const auto n = static_cast<Index>(rows.begin()->size());
  Matrix m(n, big_n);
  Index j = 0;
  for (const auto& row : rows) {
    Index i = 0;
    for (double x : row) m(i++, j) = x;
    ++j;
  }
  return m;
}

inline double max_abs(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

// Each expected point has a counterpart in `got` within `tol`, and the sizes agree.
inline bool same_points(const std::vector<Vector>& got, const std::vector<Vector>& want,
                        double tol) {
  if (got.size() != want.size()) return false;
  for (const Vector& w : want) {
    bool found = false;
    for (const Vector& g : got) found = found || max_abs(g - w) <= tol;
    if (!found) return false;
  }
  return true;
}

inline Vector gaussian_vector(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

inline Vector random_weights(std::mt19937_64& rng, Index n) {
  std::uniform_real_distribution<double> u(0.2, 1.0);
  Vector w(n);
  for (Index i = 0; i < n; ++i) w(i) = u(rng);
  return w / w.sum();
}

// Centered Gaussian returns with full row rank on `space`.
inline MarketModel random_market(std::mt19937_64& rng, const FiniteProbSpace& space, Index n) {
  for (;;) {
    Matrix r(n, space.size());
    for (Index i = 0; i < n; ++i) r.row(i) = gaussian_vector(rng, space.size()).transpose();
    r.colwise() -= space.expectation_rows(r);
    if (numerical_rank(r) < n) continue;
    return MarketModel::from_centered(space, r, Vector::Zero(n));
  }
}

// Random polytope: `count` Gaussian points in R^d, reduced to extreme points.
inline VPolytope random_polytope(std::mt19937_64& rng, Index d, int count) {
  std::vector<Vector> pts;
  for (int i = 0; i < count; ++i) pts.push_back(gaussian_vector(rng, d));
  return VPolytope::from_points(pts);
}

// Brute-force oracle: min c^T x over {A x <= b}, enumerating every basis.
inline double enumerate_minimum(const Vector& c, const Matrix& a, const Vector& b) {
  const Index n = c.size();
  const Index m = a.rows();
  double best = std::numeric_limits<double>::infinity();
  std::vector<Index> pick(static_cast<std::size_t>(n));
  std::function<void(Index, Index)> rec = [&](Index start, Index depth) {
    if (depth == n) {
      Matrix sub(n, n);
      Vector rhs(n);
      for (Index k = 0; k < n; ++k) {
        sub.row(k) = a.row(pick[static_cast<std::size_t>(k)]);
        rhs(k) = b(pick[static_cast<std::size_t>(k)]);
      }
      Eigen::FullPivLU<Matrix> lu(sub);
      if (lu.rank() < n) return;
      const Vector x = lu.solve(rhs);
      if (((a * x - b).array() <= 1e-9).all()) best = std::min(best, c.dot(x));
      return;
    }
    for (Index i = start; i < m; ++i) {
      pick[static_cast<std::size_t>(depth)] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

}  // namespace mdport::testing
