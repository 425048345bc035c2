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

#include "mdport/geometry.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <limits>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "mdport/error.hpp"
#include "mdport/lp.hpp"

namespace mdport {

namespace {

double sup_distance(const Vector& a, const Vector& b) { return (a - b).cwiseAbs().maxCoeff(); }

void check_same_dim(const std::vector<Vector>& points) {
  require(!points.empty(), ErrorCode::kInvalidArgument, "polytope needs at least one point");
  const Index d = points.front().size();
  require(d > 0, ErrorCode::kInvalidArgument, "points must have positive dimension");
  for (const Vector& p : points) {
    require(p.size() == d, ErrorCode::kDimensionMismatch, "points have different dimensions");
    require(p.allFinite(), ErrorCode::kInvalidArgument, "points must be finite");
  }
}

// Zero sets of the double description method, one bit per constraint row.
class RowSet {
 public:
  explicit RowSet(Index rows = 0) : words_(static_cast<std::size_t>((rows + 63) / 64), 0) {}
  void set(Index i) { words_[static_cast<std::size_t>(i / 64)] |= (std::uint64_t{1} << (i % 64)); }
  RowSet operator&(const RowSet& o) const {
    RowSet r = *this;
    for (std::size_t w = 0; w < words_.size(); ++w) r.words_[w] &= o.words_[w];
    return r;
  }
  bool subset_of(const RowSet& o) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      if ((words_[w] & ~o.words_[w]) != 0) return false;
    }
    return true;
  }
  Index count() const {
    Index c = 0;
    for (std::uint64_t w : words_) c += std::popcount(w);
    return c;
  }

 private:
  std::vector<std::uint64_t> words_;
};

struct Ray {
  Vector y;
  RowSet zeros;
};

// Projection onto the probability simplex.
Vector project_simplex(const Vector& v) {
  Vector u = v;
  std::sort(u.data(), u.data() + u.size(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (Index i = 0; i < u.size(); ++i) {
    cumulative += u(i);
    const double t = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (u(i) - t > 0.0) theta = t;
  }
  return (v.array() - theta).max(0.0);
}

}  // namespace

// ---------------------------------------------------------------- VPolytope

VPolytope VPolytope::from_points(std::vector<Vector> points, double dedup_tol) {
  check_same_dim(points);
  std::vector<Vector> unique = dedup_points(points, dedup_tol);
  const auto keep = extreme_indices(unique);
  std::vector<Vector> vertices;
  vertices.reserve(keep.size());
  for (std::size_t i : keep) vertices.push_back(std::move(unique[i]));
  return VPolytope(std::move(vertices));
}

VPolytope VPolytope::from_vertices(std::vector<Vector> vertices) {
  check_same_dim(vertices);
  return VPolytope(std::move(vertices));
}

Matrix VPolytope::as_matrix() const {
  Matrix m(dim(), size());
  for (Index i = 0; i < size(); ++i) m.col(i) = vertex(i);
  return m;
}

Vector VPolytope::centroid() const { return as_matrix().rowwise().mean(); }

Index VPolytope::affine_dimension(double rel_tol) const {
  return affine_hull(vertices_, rel_tol).dimension();
}

bool VPolytope::contains(const Vector& p, double tol) const {
  require(p.size() == dim(), ErrorCode::kDimensionMismatch, "membership point dimension");
  const Index k = size();
  const Index d = dim();
  // min |V lambda - p|_1  s.t. lambda in the simplex.
  lp::LinearProgram prog(k + 2 * d);
  prog.nonnegative.assign(static_cast<std::size_t>(k + 2 * d), true);
  prog.objective.tail(2 * d).setOnes();
  for (Index r = 0; r < d; ++r) {
    Vector row = Vector::Zero(k + 2 * d);
    for (Index i = 0; i < k; ++i) row(i) = vertex(i)(r);
    row(k + r) = 1.0;
    row(k + d + r) = -1.0;
    prog.add_eq(row, p(r));
  }
  Vector sum = Vector::Zero(k + 2 * d);
  sum.head(k).setOnes();
  prog.add_eq(sum, 1.0);
  const lp::Solution sol = lp::solve(prog);
  return sol.optimal() && sol.value <= tol;
}

bool VPolytope::same_vertices(const VPolytope& other, double tol) const {
  if (size() != other.size() || dim() != other.dim()) return false;
  for (const Vector& v : vertices_) {
    const bool found = std::any_of(other.vertices_.begin(), other.vertices_.end(),
                                   [&](const Vector& w) { return sup_distance(v, w) <= tol; });
    if (!found) return false;
  }
  return true;
}

std::vector<Vector> dedup_points(const std::vector<Vector>& points, double tol) {
  std::vector<Vector> out;
  for (const Vector& p : points) {
    const bool seen = std::any_of(out.begin(), out.end(),
                                  [&](const Vector& q) { return sup_distance(p, q) <= tol; });
    if (!seen) out.push_back(p);
  }
  return out;
}

std::vector<std::size_t> extreme_indices(const std::vector<Vector>& points, double tol) {
  const std::size_t k = points.size();
  if (k <= 2) {
    std::vector<std::size_t> all(k);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return all;
  }
  const Index d = points.front().size();
  if (d == 1) {
    std::size_t lo = 0;
    std::size_t hi = 0;
    for (std::size_t i = 1; i < k; ++i) {
      if (points[i](0) < points[lo](0)) lo = i;
      if (points[i](0) > points[hi](0)) hi = i;
    }
    if (lo == hi) return {lo};
    return {std::min(lo, hi), std::max(lo, hi)};
  }

  std::vector<bool> alive(k, true);
  lp::Options options;
  options.feasibility_tol = tol;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<std::size_t> others;
    for (std::size_t j = 0; j < k; ++j) {
      if (j != i && alive[j]) others.push_back(j);
    }
    if (others.empty()) continue;
    const auto m = static_cast<Index>(others.size());
    // Is points[i] a convex combination of the surviving others?
    lp::LinearProgram prog(m);
    prog.nonnegative.assign(static_cast<std::size_t>(m), true);
    prog.eq_matrix.resize(d + 1, m);
    prog.eq_rhs.resize(d + 1);
    for (Index c = 0; c < m; ++c) {
      prog.eq_matrix.block(0, c, d, 1) = points[others[static_cast<std::size_t>(c)]];
      prog.eq_matrix(d, c) = 1.0;
    }
    prog.eq_rhs.head(d) = points[i];
    prog.eq_rhs(d) = 1.0;
    if (lp::solve(prog, options).optimal()) alive[i] = false;
  }
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < k; ++i) {
    if (alive[i]) keep.push_back(i);
  }
  return keep;
}

VPolytope extreme_filter(std::vector<Vector> points) {
  return VPolytope::from_points(std::move(points));
}

VPolytope minkowski_sum(const VPolytope& a, const VPolytope& b) {
  require(a.dim() == b.dim(), ErrorCode::kDimensionMismatch,
          "Minkowski sum of polytopes in different dimensions");
  std::vector<Vector> sums;
  sums.reserve(static_cast<std::size_t>(a.size() * b.size()));
  for (const Vector& u : a.vertices()) {
    for (const Vector& v : b.vertices()) sums.push_back(u + v);
  }
  return VPolytope::from_points(std::move(sums));
}

// ------------------------------------------------------------ H <-> V forms

AffineHull affine_hull(const std::vector<Vector>& points, double rel_tol) {
  check_same_dim(points);
  const Index d = points.front().size();
  const auto k = static_cast<Index>(points.size());
  Matrix centered(d, k);
  Vector origin = Vector::Zero(d);
  for (const Vector& p : points) origin += p;
  origin /= static_cast<double>(k);
  double scale = 1.0;
  for (Index i = 0; i < k; ++i) {
    centered.col(i) = points[static_cast<std::size_t>(i)] - origin;
    scale = std::max(scale, points[static_cast<std::size_t>(i)].cwiseAbs().maxCoeff());
  }
  Eigen::JacobiSVD<Matrix> svd(centered, Eigen::ComputeFullU);
  const Vector& sv = svd.singularValues();
  const double threshold =
      std::max(rel_tol * (sv.size() ? sv(0) : 0.0), 1e-12 * scale);
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > threshold) ++rank;
  }
  AffineHull hull;
  hull.origin = origin;
  hull.basis = svd.matrixU().leftCols(rank);
  hull.normals = svd.matrixU().rightCols(d - rank);
  return hull;
}

std::vector<Vector> enumerate_vertices(const Matrix& a, const Vector& b, double tol) {
  require(a.rows() == b.size(), ErrorCode::kDimensionMismatch, "H-representation shape");
  const Index k = a.cols();
  require(k >= 1, ErrorCode::kInvalidArgument, "vertex enumeration needs dimension >= 1");

  // Homogenize: a_i z - b_i t <= 0 and -t <= 0, rows scaled to unit length.
  std::vector<Vector> rows;
  for (Index i = 0; i < a.rows(); ++i) {
    const double norm = a.row(i).norm();
    if (norm <= tol) {
      if (b(i) < -tol) return {};  // 0 <= b_i violated
      continue;
    }
    Vector h(k + 1);
    h.head(k) = a.row(i).transpose();
    h(k) = -b(i);
    rows.push_back(h / h.norm());
  }
  {
    Vector t_row = Vector::Zero(k + 1);
    t_row(k) = -1.0;
    rows.push_back(t_row);
  }
  const auto m = static_cast<Index>(rows.size());
  Matrix hmat(m, k + 1);
  for (Index i = 0; i < m; ++i) hmat.row(i) = rows[static_cast<std::size_t>(i)].transpose();

  // Initial simplicial cone from k + 1 independent rows.
  Eigen::ColPivHouseholderQR<Matrix> qr(hmat.transpose());
  qr.setThreshold(1e-10);
  if (qr.rank() < k + 1) {
    fail(ErrorCode::kUnboundedFace,
         "polyhedron contains a line (constraint rank " + std::to_string(qr.rank()) + " < " +
             std::to_string(k + 1) + ")");
  }
  std::vector<Index> initial(static_cast<std::size_t>(k + 1));
  std::vector<bool> processed(static_cast<std::size_t>(m), false);
  for (Index c = 0; c < k + 1; ++c) {
    initial[static_cast<std::size_t>(c)] = qr.colsPermutation().indices()(c);
    processed[static_cast<std::size_t>(initial[static_cast<std::size_t>(c)])] = true;
  }
  Matrix hk(k + 1, k + 1);
  for (Index c = 0; c < k + 1; ++c) hk.row(c) = hmat.row(initial[static_cast<std::size_t>(c)]);
  const Matrix generators = -hk.fullPivLu().inverse();

  auto zero_set = [&](const Vector& y) {
    RowSet zeros(m);
    for (Index i = 0; i < m; ++i) {
      if (processed[static_cast<std::size_t>(i)] && std::abs(hmat.row(i).dot(y)) <= tol) {
        zeros.set(i);
      }
    }
    return zeros;
  };

  std::vector<Ray> rays;
  for (Index c = 0; c < k + 1; ++c) {
    Vector y = generators.col(c);
    y.normalize();
    rays.push_back(Ray{y, zero_set(y)});
  }

  for (Index row = 0; row < m; ++row) {
    if (processed[static_cast<std::size_t>(row)]) continue;
    const Vector h = hmat.row(row).transpose();
    std::vector<double> s(rays.size());
    std::vector<std::size_t> pos;
    std::vector<std::size_t> neg;
    for (std::size_t r = 0; r < rays.size(); ++r) {
      s[r] = h.dot(rays[r].y);
      if (s[r] > tol) {
        pos.push_back(r);
      } else if (s[r] < -tol) {
        neg.push_back(r);
      }
    }
    processed[static_cast<std::size_t>(row)] = true;
    if (pos.empty()) {
      for (Ray& ray : rays) {
        if (std::abs(h.dot(ray.y)) <= tol) ray.zeros.set(row);
      }
      continue;
    }

    std::vector<Ray> next;
    for (std::size_t r = 0; r < rays.size(); ++r) {
      if (s[r] <= tol) {
        Ray kept = rays[r];
        if (s[r] >= -tol) kept.zeros.set(row);
        next.push_back(std::move(kept));
      }
    }
    for (std::size_t p : pos) {
      for (std::size_t q : neg) {
        const RowSet common = rays[p].zeros & rays[q].zeros;
        if (common.count() < k - 1) continue;
        bool adjacent = true;
        for (std::size_t r = 0; r < rays.size() && adjacent; ++r) {
          if (r != p && r != q && common.subset_of(rays[r].zeros)) adjacent = false;
        }
        if (!adjacent) continue;
        Vector y = s[p] * rays[q].y - s[q] * rays[p].y;
        const double norm = y.norm();
        if (norm <= tol) continue;
        y /= norm;
        next.push_back(Ray{y, zero_set(y)});
      }
    }
    rays = std::move(next);
  }

  std::vector<Vector> vertices;
  for (const Ray& ray : rays) {
    const double t = ray.y(k);
    if (t <= tol) {
      std::ostringstream msg;
      msg << "polyhedron is unbounded along direction [";
      for (Index i = 0; i < k; ++i) msg << (i ? ", " : "") << ray.y(i);
      msg << "]";
      fail(ErrorCode::kUnboundedFace, msg.str());
    }
    vertices.push_back(ray.y.head(k) / t);
  }
  double scale = 1.0;
  for (const Vector& v : vertices) scale = std::max(scale, v.cwiseAbs().maxCoeff());
  return dedup_points(vertices, 1e-9 * scale);
}

HPolytope to_halfspaces(const VPolytope& p) {
  const AffineHull hull = affine_hull(p.vertices());
  const Index d = p.dim();
  const Index k = hull.dimension();
  HPolytope h;
  h.eq_matrix = hull.normals.transpose();
  h.eq_rhs = h.eq_matrix * hull.origin;
  h.ub_matrix.resize(0, d);
  h.ub_rhs.resize(0);
  if (k == 0) return h;

  // Facets are the vertices of the polar of the centered vertex set.
  Matrix local(p.size(), k);
  for (Index i = 0; i < p.size(); ++i) {
    local.row(i) = (hull.basis.transpose() * (p.vertex(i) - hull.origin)).transpose();
  }
  const std::vector<Vector> normals = enumerate_vertices(local, Vector::Ones(p.size()));
  h.ub_matrix.resize(static_cast<Index>(normals.size()), d);
  h.ub_rhs.resize(static_cast<Index>(normals.size()));
  for (std::size_t f = 0; f < normals.size(); ++f) {
    const Vector ambient = hull.basis * normals[f];
    h.ub_matrix.row(static_cast<Index>(f)) = ambient.transpose();
    h.ub_rhs(static_cast<Index>(f)) = 1.0 + ambient.dot(hull.origin);
  }
  return h;
}

VPolytope vertices_of(const HPolytope& h, const Vector* anchor, Index max_free_dims) {
  const Index d = std::max(h.eq_matrix.cols(), h.ub_matrix.cols());
  Vector x0 = Vector::Zero(d);
  Matrix null_basis = Matrix::Identity(d, d);

  if (h.eq_matrix.rows() > 0) {
    Eigen::JacobiSVD<Matrix> svd(h.eq_matrix, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vector& sv = svd.singularValues();
    const double threshold = 1e-9 * std::max(1.0, sv.size() ? sv(0) : 0.0);
    Index rank = 0;
    for (Index i = 0; i < sv.size(); ++i) {
      if (sv(i) > threshold) ++rank;
    }
    null_basis = svd.matrixV().rightCols(d - rank);
    const double rhs_scale = 1.0 + h.eq_rhs.cwiseAbs().maxCoeff();
    bool anchored = false;
    if (anchor != nullptr) {
      const double residual = (h.eq_matrix * *anchor - h.eq_rhs).cwiseAbs().maxCoeff();
      if (residual <= 1e-7 * rhs_scale) {
        x0 = *anchor;
        anchored = true;
      }
    }
    if (!anchored) {
      svd.setThreshold(threshold / std::max(1.0, sv.size() ? sv(0) : 0.0));
      x0 = svd.solve(h.eq_rhs);
      const double residual = (h.eq_matrix * x0 - h.eq_rhs).cwiseAbs().maxCoeff();
      if (residual > 1e-8 * rhs_scale) {
        fail(ErrorCode::kEmptyIntersection, "equality constraints are inconsistent");
      }
    }
  } else if (anchor != nullptr) {
    x0 = *anchor;
  }

  const Index free_dims = null_basis.cols();
  if (free_dims > max_free_dims) {
    fail(ErrorCode::kGuardExceeded, "vertex enumeration in " + std::to_string(free_dims) +
                                        " dimensions exceeds the guard of " +
                                        std::to_string(max_free_dims));
  }
  if (free_dims == 0) {
    if (h.ub_matrix.rows() > 0) {
      const Vector slack = h.ub_rhs - h.ub_matrix * x0;
      const double scale = 1.0 + h.ub_rhs.cwiseAbs().maxCoeff();
      if (slack.minCoeff() < -1e-9 * scale) {
        fail(ErrorCode::kEmptyIntersection, "polytope is empty");
      }
    }
    return VPolytope::from_vertices({x0});
  }

  const Matrix a = h.ub_matrix * null_basis;
  const Vector b = h.ub_rhs - h.ub_matrix * x0;
  const std::vector<Vector> local = enumerate_vertices(a, b);
  if (local.empty()) fail(ErrorCode::kEmptyIntersection, "polytope is empty");
  std::vector<Vector> points;
  points.reserve(local.size());
  for (const Vector& z : local) points.push_back(x0 + null_basis * z);
  return VPolytope::from_points(std::move(points), 1e-9);
}

VPolytope intersect(const VPolytope& a, const VPolytope& b, Index max_dim) {
  require(a.dim() == b.dim(), ErrorCode::kDimensionMismatch,
          "intersection of polytopes in different dimensions");
  if (a.dim() > max_dim) {
    fail(ErrorCode::kGuardExceeded, "intersection in dimension " + std::to_string(a.dim()) +
                                        " exceeds the guard of " + std::to_string(max_dim));
  }
  const HPolytope ha = to_halfspaces(a);
  const HPolytope hb = to_halfspaces(b);
  HPolytope h;
  h.eq_matrix.resize(ha.eq_matrix.rows() + hb.eq_matrix.rows(), a.dim());
  h.eq_matrix << ha.eq_matrix, hb.eq_matrix;
  h.eq_rhs.resize(ha.eq_rhs.size() + hb.eq_rhs.size());
  h.eq_rhs << ha.eq_rhs, hb.eq_rhs;
  h.ub_matrix.resize(ha.ub_matrix.rows() + hb.ub_matrix.rows(), a.dim());
  h.ub_matrix << ha.ub_matrix, hb.ub_matrix;
  h.ub_rhs.resize(ha.ub_rhs.size() + hb.ub_rhs.size());
  h.ub_rhs << ha.ub_rhs, hb.ub_rhs;
  return vertices_of(h, nullptr, max_dim);
}

SupportResult support(const VPolytope& p, const Vector& direction, double rel_tol) {
  require(direction.size() == p.dim(), ErrorCode::kDimensionMismatch, "support direction");
  require(direction.cwiseAbs().maxCoeff() > 0.0, ErrorCode::kInvalidArgument,
          "support function needs a non-zero direction");
  Vector values(p.size());
  for (Index i = 0; i < p.size(); ++i) values(i) = p.vertex(i).dot(direction);
  const double best = values.maxCoeff();
  const double tol = rel_tol * (1.0 + std::abs(best));
  std::vector<Index> face;
  std::vector<Vector> face_vertices;
  for (Index i = 0; i < p.size(); ++i) {
    if (values(i) >= best - tol) {
      face.push_back(i);
      face_vertices.push_back(p.vertex(i));
    }
  }
  return SupportResult{best, std::move(face), VPolytope::from_vertices(std::move(face_vertices))};
}

// ------------------------------------------------------------ Steiner point

namespace {

SteinerResult steiner_exact_polygon(const VPolytope& p, const AffineHull& hull) {
  const Index k = p.size();
  std::vector<std::pair<double, Index>> order;
  std::vector<Vector> local(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) {
    local[static_cast<std::size_t>(i)] = hull.basis.transpose() * (p.vertex(i) - hull.origin);
    order.emplace_back(std::atan2(local[static_cast<std::size_t>(i)](1),
                                  local[static_cast<std::size_t>(i)](0)),
                       i);
  }
  std::sort(order.begin(), order.end());
  Vector point = Vector::Zero(p.dim());
  for (Index pos = 0; pos < k; ++pos) {
    const Index prev = order[static_cast<std::size_t>((pos + k - 1) % k)].second;
    const Index cur = order[static_cast<std::size_t>(pos)].second;
    const Index next = order[static_cast<std::size_t>((pos + 1) % k)].second;
    const Vector e1 = local[static_cast<std::size_t>(cur)] - local[static_cast<std::size_t>(prev)];
    const Vector e2 = local[static_cast<std::size_t>(next)] - local[static_cast<std::size_t>(cur)];
    // Exterior angle: turn between consecutive edges.
    const double turn = std::atan2(e1(0) * e2(1) - e1(1) * e2(0), e1.dot(e2));
    point += (turn / (2.0 * std::numbers::pi)) * p.vertex(cur);
  }
  return SteinerResult{point, Vector::Zero(p.dim()), true, 0};
}

constexpr std::size_t kShardSize = 4096;

// Counts how often each vertex is the argmax of a Gaussian direction over
// samples [begin, end) of shard `shard`.
void sample_shard(const Matrix& vt, std::uint64_t seed, std::size_t shard, std::size_t count,
                  std::vector<std::uint64_t>& hits) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(shard), static_cast<std::uint32_t>(shard >> 32)};
  std::mt19937_64 engine(seq);
  std::normal_distribution<double> normal;
  const Index d = vt.cols();
  const Index k = vt.rows();
  const double scale = 1.0 + vt.cwiseAbs().maxCoeff();
  Vector u(d);
  Vector scores(k);
  for (std::size_t s = 0; s < count; ++s) {
    for (int attempt = 0;; ++attempt) {
      for (Index i = 0; i < d; ++i) u(i) = normal(engine);
      scores.noalias() = vt * u;
      Index best = 0;
      double top = scores(0);
      double second = -std::numeric_limits<double>::infinity();
      for (Index i = 1; i < k; ++i) {
        if (scores(i) > top) {
          second = top;
          top = scores(i);
          best = i;
        } else if (scores(i) > second) {
          second = scores(i);
        }
      }
      // Ties have probability zero; redraw rather than break them.
      if (top - second > 1e-12 * scale * u.norm() || attempt >= 100) {
        ++hits[static_cast<std::size_t>(best)];
        break;
      }
    }
  }
}

SteinerResult steiner_monte_carlo(const VPolytope& p, const SteinerConfig& config) {
  require(config.samples >= 2, ErrorCode::kInvalidArgument, "Steiner sampling needs >= 2 samples");
  const Matrix vt = p.as_matrix().transpose();
  const std::size_t k = static_cast<std::size_t>(p.size());
  const std::size_t shards = (config.samples + kShardSize - 1) / kShardSize;
  std::vector<std::vector<std::uint64_t>> hits(shards, std::vector<std::uint64_t>(k, 0));
  auto run = [&](std::size_t shard) {
    const std::size_t begin = shard * kShardSize;
    const std::size_t count = std::min(kShardSize, config.samples - begin);
    sample_shard(vt, config.seed, shard, count, hits[shard]);
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(config.workers,
                                                           static_cast<unsigned>(shards)));
  if (workers == 1) {
    for (std::size_t s = 0; s < shards; ++s) run(s);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t s = w; s < shards; s += workers) run(s);
      });
    }
  }
  std::vector<std::uint64_t> total(k, 0);
  for (const auto& shard : hits) {
    for (std::size_t i = 0; i < k; ++i) total[i] += shard[i];
  }
  const auto n = static_cast<double>(config.samples);
  Vector mean = Vector::Zero(p.dim());
  Vector second = Vector::Zero(p.dim());
  for (std::size_t i = 0; i < k; ++i) {
    const double f = static_cast<double>(total[i]) / n;
    mean += f * p.vertex(static_cast<Index>(i));
    second += f * p.vertex(static_cast<Index>(i)).cwiseAbs2();
  }
  const Vector variance = ((second - mean.cwiseAbs2()).array().max(0.0) * n / (n - 1.0)).matrix();
  return SteinerResult{mean, (variance / n).cwiseSqrt(), false, config.samples};
}

}  // namespace

SteinerResult steiner_point(const VPolytope& p, const SteinerConfig& config) {
  if (p.is_singleton()) return SteinerResult{p.vertex(0), Vector::Zero(p.dim()), true, 0};
  const AffineHull hull = affine_hull(p.vertices());
  const Index k = hull.dimension();
  if (!config.force_monte_carlo) {
    if (k == 0) return SteinerResult{p.vertex(0), Vector::Zero(p.dim()), true, 0};
    if (k == 1) {
      // Midpoint of the extreme points along the segment.
      Index lo = 0;
      Index hi = 0;
      double lo_v = std::numeric_limits<double>::infinity();
      double hi_v = -lo_v;
      for (Index i = 0; i < p.size(); ++i) {
        const double t = hull.basis.col(0).dot(p.vertex(i) - hull.origin);
        if (t < lo_v) { lo_v = t; lo = i; }
        if (t > hi_v) { hi_v = t; hi = i; }
      }
      return SteinerResult{0.5 * (p.vertex(lo) + p.vertex(hi)), Vector::Zero(p.dim()), true, 0};
    }
    if (k == 2) return steiner_exact_polygon(p, hull);
  }
  return steiner_monte_carlo(p, config);
}

// ----------------------------------------------------- piecewise-linear f

PwlConvexFunction::PwlConvexFunction(std::vector<Vector> gradients, std::vector<double> intercepts)
    : gradients_(std::move(gradients)), intercepts_(std::move(intercepts)) {
  check_same_dim(gradients_);
  require(intercepts_.size() == gradients_.size(), ErrorCode::kDimensionMismatch,
          "one intercept per piece required");
  for (double b : intercepts_) {
    require(std::isfinite(b), ErrorCode::kInvalidArgument, "intercepts must be finite");
  }
}

PwlConvexFunction::PwlConvexFunction(std::vector<Vector> gradients)
    : PwlConvexFunction(gradients, std::vector<double>(gradients.size(), 0.0)) {}

bool PwlConvexFunction::positively_homogeneous() const {
  return std::all_of(intercepts_.begin(), intercepts_.end(), [](double b) { return b == 0.0; });
}

double PwlConvexFunction::operator()(const Vector& y) const {
  require(y.size() == dim(), ErrorCode::kDimensionMismatch, "evaluation point dimension");
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < gradients_.size(); ++i) {
    best = std::max(best, gradients_[i].dot(y) + intercepts_[i]);
  }
  return best;
}

std::vector<std::size_t> PwlConvexFunction::active_pieces(const Vector& y, double rel_tol) const {
  const double best = (*this)(y);
  const double tol = rel_tol * (1.0 + std::abs(best));
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < gradients_.size(); ++i) {
    if (gradients_[i].dot(y) + intercepts_[i] >= best - tol) active.push_back(i);
  }
  return active;
}

VPolytope PwlConvexFunction::subdifferential(const Vector& y, double rel_tol) const {
  std::vector<Vector> active;
  for (std::size_t i : active_pieces(y, rel_tol)) active.push_back(gradients_[i]);
  return VPolytope::from_points(std::move(active));
}

SteinerResult extended_gradient(const PwlConvexFunction& f, const Vector& y,
                                const SteinerConfig& config) {
  return steiner_point(f.subdifferential(y), config);
}

// ------------------------------------------------------------- distances

double distance_to_hull(const Vector& p, const VPolytope& poly) {
  require(p.size() == poly.dim(), ErrorCode::kDimensionMismatch, "distance point dimension");
  const Matrix v = poly.as_matrix();
  const Index k = v.cols();
  Index nearest = 0;
  for (Index i = 1; i < k; ++i) {
    if ((v.col(i) - p).squaredNorm() < (v.col(nearest) - p).squaredNorm()) nearest = i;
  }
  if (k == 1 || (v.col(nearest) - p).norm() == 0.0) return (v.col(nearest) - p).norm();

  const double lipschitz = std::max((v.transpose() * v).eigenvalues().real().maxCoeff(), 1e-300);
  Vector lambda = Vector::Zero(k);
  lambda(nearest) = 1.0;
  Vector momentum = lambda;
  double t = 1.0;
  for (int iter = 0; iter < 10000; ++iter) {
    const Vector grad = v.transpose() * (v * momentum - p);
    const Vector next = project_simplex(momentum - grad / lipschitz);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    momentum = next + ((t - 1.0) / t_next) * (next - lambda);
    const double change = (next - lambda).norm();
    lambda = next;
    t = t_next;
    if (change <= 1e-10) break;
  }
  return std::min((v * lambda - p).norm(), (v.col(nearest) - p).norm());
}

double hausdorff(const VPolytope& a, const VPolytope& b) {
  require(a.dim() == b.dim(), ErrorCode::kDimensionMismatch,
          "Hausdorff distance between polytopes in different dimensions");
  double h = 0.0;
  for (const Vector& v : a.vertices()) h = std::max(h, distance_to_hull(v, b));
  for (const Vector& v : b.vertices()) h = std::max(h, distance_to_hull(v, a));
  return h;
}

}  // namespace mdport
