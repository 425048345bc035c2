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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mdport/error.hpp"
#include "mdport/geometry.hpp"
#include "test_support.hpp"

using namespace mdport;
using namespace mdport::testing;

namespace {

VPolytope unit_square() {
  return VPolytope::from_points({vec({0, 0}), vec({1, 0}), vec({1, 1}), vec({0, 1})});
}

// Exterior-angle oracle for a convex polygon given in counter-clockwise order.
Vector polygon_steiner(const std::vector<Vector>& ccw) {
  const std::size_t k = ccw.size();
  Vector s = Vector::Zero(2);
  for (std::size_t i = 0; i < k; ++i) {
    const Vector a = ccw[(i + k - 1) % k] - ccw[i];
    const Vector b = ccw[(i + 1) % k] - ccw[i];
    const double interior = std::acos(std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0));
    s += (std::numbers::pi - interior) / (2 * std::numbers::pi) * ccw[i];
  }
  return s;
}

std::vector<Vector> ccw_order(const VPolytope& p) {
  const Vector c = p.centroid();
  std::vector<Vector> v = p.vertices();
  std::sort(v.begin(), v.end(), [&](const Vector& a, const Vector& b) {
    return std::atan2(a(1) - c(1), a(0) - c(0)) < std::atan2(b(1) - c(1), b(0) - c(0));
  });
  return v;
}

}  // namespace

TEST_CASE("interior and duplicate points are dropped") {
  const VPolytope p = VPolytope::from_points(
      {vec({0, 0}), vec({1, 0}), vec({1, 1}), vec({0, 1}), vec({0.5, 0.5}), vec({1, 1}),
       vec({0.5, 0})});
  CHECK(p.size() == 4);
  CHECK(p.contains(vec({0.25, 0.75})));
  CHECK_FALSE(p.contains(vec({1.1, 0.5})));
  CHECK(p.affine_dimension() == 2);
}

TEST_CASE("extreme filter keeps the six vertices of a hexagon") {
  std::vector<Vector> pts;
  for (int k = 0; k < 6; ++k) {
    const double t = k * std::numbers::pi / 3;
    pts.push_back(vec({std::cos(t), std::sin(t)}));
  }
  pts.push_back(vec({0, 0}));
  pts.push_back(vec({0.5, 0.1}));
  pts.push_back(vec({-0.2, 0.3}));
  CHECK(extreme_filter(pts).size() == 6);
}

TEST_CASE("Minkowski sum of a square and a segment") {
  const VPolytope seg = VPolytope::from_points({vec({0, 0}), vec({1, 1})});
  const VPolytope sum = minkowski_sum(unit_square(), seg);
  CHECK(same_points(sum.vertices(),
                    {vec({0, 0}), vec({1, 0}), vec({2, 1}), vec({2, 2}), vec({1, 2}), vec({0, 1})},
                    1e-12));
}

TEST_CASE("intersection of overlapping squares") {
  const VPolytope shifted =
      VPolytope::from_points({vec({0.5, 0}), vec({1.5, 0}), vec({1.5, 1}), vec({0.5, 1})});
  const VPolytope i = intersect(unit_square(), shifted);
  CHECK(same_points(i.vertices(), {vec({0.5, 0}), vec({1, 0}), vec({1, 1}), vec({0.5, 1})},
                    1e-9));
  CHECK(hausdorff(unit_square(), shifted) == doctest::Approx(0.5));
  const VPolytope far = VPolytope::from_points({vec({3, 3}), vec({4, 3}), vec({3, 4})});
  CHECK_THROWS_AS(intersect(unit_square(), far), Error);
}

TEST_CASE("intersection of lower-dimensional polytopes in a common hyperplane") {
  const VPolytope tri1 = VPolytope::from_points({vec({1, 0, 0}), vec({0, 1, 0}), vec({0, 0, 1})});
  const VPolytope tri2 = VPolytope::from_points(
      {vec({2.0 / 3, 2.0 / 3, -1.0 / 3}), vec({2.0 / 3, -1.0 / 3, 2.0 / 3}),
       vec({-1.0 / 3, 2.0 / 3, 2.0 / 3})});
  const VPolytope hex = intersect(tri1, tri2);
  CHECK(hex.size() == 6);
  CHECK(hex.affine_dimension() == 2);
}

TEST_CASE("support face of a square") {
  const SupportResult up = support(unit_square(), vec({0, 1}));
  CHECK(up.value == doctest::Approx(1.0));
  CHECK(up.face.size() == 2);
  const SupportResult corner = support(unit_square(), vec({1, 1}));
  CHECK(corner.face.is_singleton());
  CHECK(max_abs(corner.face.vertex(0) - vec({1, 1})) == 0.0);
}

TEST_CASE("halfspace round trip of a triangle") {
  const VPolytope tri = VPolytope::from_points({vec({0, 0}), vec({2, 0}), vec({0, 1})});
  const HPolytope h = to_halfspaces(tri);
  CHECK(h.ub_matrix.rows() == 3);
  const VPolytope back = vertices_of(h);
  CHECK(back.same_vertices(tri, 1e-9));
}

TEST_CASE("vertex enumeration of a cube") {
  Matrix a(6, 3);
  a << 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1;
  const Vector b = Vector::Ones(6);
  CHECK(enumerate_vertices(a, b).size() == 8);
  Matrix open(1, 2);
  open << 1, 0;
  CHECK_THROWS_AS(enumerate_vertices(open, Vector::Ones(1)), Error);
}

TEST_CASE("Steiner point: exact low-dimensional cases") {
  const VPolytope point = VPolytope::from_points({vec({1, 2, 3})});
  CHECK(max_abs(steiner_point(point).point - vec({1, 2, 3})) == 0.0);
  const VPolytope seg = VPolytope::from_points({vec({0, 0, 1}), vec({2, 4, 1})});
  CHECK(max_abs(steiner_point(seg).point - vec({1, 2, 1})) <= 1e-15);
  const VPolytope tri = VPolytope::from_points({vec({0, 0}), vec({1, 0}), vec({0, 1})});
  const SteinerResult s = steiner_point(tri);
  CHECK(s.exact);
  CHECK(max_abs(s.point - vec({0.375, 0.375})) <= 1e-12);
  CHECK(max_abs(steiner_point(unit_square()).point - vec({0.5, 0.5})) <= 1e-12);
}

TEST_CASE("Steiner point of a symmetric 3-polytope is its center") {
  std::vector<Vector> cube;
  for (int m = 0; m < 8; ++m) cube.push_back(vec({double(m & 1), double((m >> 1) & 1), double(m >> 2)}));
  const SteinerResult s = steiner_point(VPolytope::from_points(cube), {20000, 3, 2, false});
  CHECK_FALSE(s.exact);
  for (Index i = 0; i < 3; ++i) CHECK(std::abs(s.point(i) - 0.5) <= 4 * s.std_error(i) + 1e-12);
}

TEST_CASE("Monte-Carlo Steiner point is independent of the worker count") {
  std::mt19937_64 rng(11);
  const VPolytope p = random_polytope(rng, 3, 12);
  const SteinerResult one = steiner_point(p, {20000, 5, 1, false});
  const SteinerResult four = steiner_point(p, {20000, 5, 4, false});
  CHECK(max_abs(one.point - four.point) == 0.0);
  const SteinerResult other = steiner_point(p, {20000, 6, 1, false});
  CHECK(max_abs(one.point - other.point) > 0.0);
}

TEST_CASE("planar Steiner point matches the exterior-angle oracle") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const VPolytope p = random_polytope(rng, 2, 8);
    CHECK(max_abs(steiner_point(p).point - polygon_steiner(ccw_order(p))) <= 1e-10);
  }
}

TEST_CASE("piecewise-linear convex functions and their subdifferentials") {
  const PwlConvexFunction f({vec({1, 0}), vec({-1, 0}), vec({0, 1}), vec({0, -1})});
  CHECK(f.positively_homogeneous());
  CHECK(f(vec({2, -3})) == doctest::Approx(3.0));
  CHECK(f.subdifferential(vec({1, 0})).is_singleton());
  CHECK(f.subdifferential(vec({1, 1})).size() == 2);
  const SteinerResult g = extended_gradient(f, vec({1, 1}));
  CHECK(max_abs(g.point - vec({0.5, 0.5})) <= 1e-15);
  CHECK(f.subdifferential(vec({0, 0})).size() == 4);
  CHECK(max_abs(extended_gradient(f, vec({0, 0})).point) <= 1e-12);
  const PwlConvexFunction affine({vec({1, 0})}, {1.0});
  CHECK_FALSE(affine.positively_homogeneous());
}

TEST_CASE("distance to hull") {
  CHECK(distance_to_hull(vec({0.5, 0.5}), unit_square()) <= 1e-9);
  CHECK(distance_to_hull(vec({2, 0.5}), unit_square()) == doctest::Approx(1.0).epsilon(1e-6));
}
