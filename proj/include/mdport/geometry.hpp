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

// Vertex-represented polytopes and the Steiner-point machinery.
//
// Polytopes may be lower-dimensional; every routine works in the affine hull
// of the vertex set. The Steiner point of a polytope depends only on the
// polytope itself, not on the ambient space it is embedded in, so the exact
// formulas are chosen by the affine dimension k of the vertex set:
//
//   k = 0  the single vertex
//   k = 1  the midpoint of the segment
//   k = 2  vertices weighted by their exterior angle / 2 pi
//   k >= 3 Monte-Carlo: average argmax vertex over uniform random directions

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace mdport {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

class VPolytope {
 public:
  /// Deduplicates (sup-norm `dedup_tol`) and keeps only extreme points.
  static VPolytope from_points(std::vector<Vector> points, double dedup_tol = 1e-10);

  /// Caller guarantees `vertices` are distinct extreme points.
  static VPolytope from_vertices(std::vector<Vector> vertices);

  Index dim() const { return vertices_.front().size(); }
  Index size() const { return static_cast<Index>(vertices_.size()); }
  bool is_singleton() const { return vertices_.size() == 1; }
  const std::vector<Vector>& vertices() const { return vertices_; }
  const Vector& vertex(Index i) const { return vertices_[static_cast<std::size_t>(i)]; }

  /// d x k matrix with one vertex per column.
  Matrix as_matrix() const;
  Vector centroid() const;
  Index affine_dimension(double rel_tol = 1e-9) const;

  /// LP membership test with absolute tolerance `tol`.
  bool contains(const Vector& p, double tol = 1e-9) const;

  /// Same vertex set up to `tol` in the sup-norm, in any order.
  bool same_vertices(const VPolytope& other, double tol) const;

 private:
  explicit VPolytope(std::vector<Vector> vertices) : vertices_(std::move(vertices)) {}
  std::vector<Vector> vertices_;
};

/// Indices of the points that are not convex combinations of the others.
/// Points must be pairwise distinct.
std::vector<std::size_t> extreme_indices(const std::vector<Vector>& points,
                                         double tol = 1e-9);

/// Collapses points within `tol` (sup-norm) of an earlier point, keeping order.
std::vector<Vector> dedup_points(const std::vector<Vector>& points, double tol);

VPolytope extreme_filter(std::vector<Vector> points);
VPolytope minkowski_sum(const VPolytope& a, const VPolytope& b);

/// Vertices of conv(a) intersected with conv(b); d <= max_dim.
VPolytope intersect(const VPolytope& a, const VPolytope& b, Index max_dim = 8);

struct SupportResult {
  double value = 0.0;
  std::vector<Index> face_indices;
  VPolytope face;
};

SupportResult support(const VPolytope& p, const Vector& direction, double rel_tol = 1e-9);

struct AffineHull {
  Vector origin;   // centroid of the points
  Matrix basis;    // d x k, orthonormal columns
  Matrix normals;  // d x (d - k), orthonormal complement
  Index dimension() const { return basis.cols(); }
};

AffineHull affine_hull(const std::vector<Vector>& points, double rel_tol = 1e-9);

/// { x : eq_matrix x = eq_rhs, ub_matrix x <= ub_rhs }.
struct HPolytope {
  Matrix eq_matrix;
  Vector eq_rhs;
  Matrix ub_matrix;
  Vector ub_rhs;
};

/// Facets (in the affine hull) plus the affine-hull equalities.
HPolytope to_halfspaces(const VPolytope& p);

/// Vertices of the bounded polyhedron { z : A z <= b } by the double
/// description method. Returns an empty list when the polyhedron is empty and
/// throws kUnboundedFace when it is unbounded.
std::vector<Vector> enumerate_vertices(const Matrix& a, const Vector& b, double tol = 1e-9);

/// Vertices of an H-polytope. Equalities are eliminated through a null-space
/// parametrization around `anchor` (or a least-squares point when null);
/// throws kEmptyIntersection when infeasible and kGuardExceeded when more than
/// `max_free_dims` directions remain.
VPolytope vertices_of(const HPolytope& h, const Vector* anchor = nullptr,
                      Index max_free_dims = 8);

struct SteinerConfig {
  std::size_t samples = 65536;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  bool force_monte_carlo = false;
};

struct SteinerResult {
  Vector point;
  Vector std_error;  // per coordinate; zero on exact paths
  bool exact = true;
  std::size_t samples = 0;
};

SteinerResult steiner_point(const VPolytope& p, const SteinerConfig& config = {});

/// max over pieces of (g_i^T y + b_i).
class PwlConvexFunction {
 public:
  PwlConvexFunction(std::vector<Vector> gradients, std::vector<double> intercepts);
  /// All intercepts zero.
  explicit PwlConvexFunction(std::vector<Vector> gradients);

  Index dim() const { return gradients_.front().size(); }
  std::size_t pieces() const { return gradients_.size(); }
  const std::vector<Vector>& gradients() const { return gradients_; }
  const std::vector<double>& intercepts() const { return intercepts_; }
  bool positively_homogeneous() const;

  double operator()(const Vector& y) const;
  /// Pieces within `rel_tol * (1 + |f(y)|)` of the maximum.
  std::vector<std::size_t> active_pieces(const Vector& y, double rel_tol = 1e-9) const;
  VPolytope subdifferential(const Vector& y, double rel_tol = 1e-9) const;

 private:
  std::vector<Vector> gradients_;
  std::vector<double> intercepts_;
};

/// Steiner point of the subdifferential at y.
SteinerResult extended_gradient(const PwlConvexFunction& f, const Vector& y,
                                const SteinerConfig& config = {});

/// Euclidean distance from p to conv(poly), by accelerated projected gradient
/// over the convex-combination weights.
double distance_to_hull(const Vector& p, const VPolytope& poly);

double hausdorff(const VPolytope& a, const VPolytope& b);

}  // namespace mdport
