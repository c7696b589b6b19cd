// Copyright 2026 The trajrisk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "trajrisk/geometry.hpp"

#include <doctest.h>

#include <random>

#include "support/gen.hpp"
#include "support/naive.hpp"

using namespace trajrisk;

namespace {

Polygon unit_square() {
  return Polygon{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {}};
}

Polygon donut() {
  // Outer 4x4 square with a 2x2 hole in the middle.
  Polygon poly{{{0, 0}, {4, 0}, {4, 4}, {0, 4}}, {}};
  poly.holes.push_back({{1, 1}, {3, 1}, {3, 3}, {1, 3}});
  return poly;
}

}  // namespace

TEST_CASE("point_on_segment detects interior, endpoint and off-line points") {
  CHECK(point_on_segment({0.5, 0.5}, {0, 0}, {1, 1}));
  CHECK(point_on_segment({0, 0}, {0, 0}, {1, 1}));
  CHECK(point_on_segment({1, 1}, {0, 0}, {1, 1}));
  CHECK_FALSE(point_on_segment({2, 2}, {0, 0}, {1, 1}));   // collinear, outside
  CHECK_FALSE(point_on_segment({0.5, 0.6}, {0, 0}, {1, 1}));
  CHECK(point_on_segment({0.5, 0}, {0, 0}, {1, 0}));       // horizontal
  CHECK(point_on_segment({0, 0.5}, {0, 0}, {0, 1}));       // vertical
}

TEST_CASE("polygon containment: interior, exterior, boundary") {
  const Polygon square = unit_square();
  CHECK(polygon_contains(square, {0.5, 0.5}));
  CHECK_FALSE(polygon_contains(square, {1.5, 0.5}));
  CHECK_FALSE(polygon_contains(square, {-0.5, 0.5}));
  // Boundary points, including vertices, are inside.
  CHECK(polygon_contains(square, {0, 0}));
  CHECK(polygon_contains(square, {1, 1}));
  CHECK(polygon_contains(square, {0.5, 0}));
  CHECK(polygon_contains(square, {1, 0.5}));
}

TEST_CASE("polygon containment honors holes") {
  const Polygon poly = donut();
  CHECK(polygon_contains(poly, {0.5, 0.5}));    // in the ring of material
  CHECK(polygon_contains(poly, {3.5, 2.0}));
  CHECK_FALSE(polygon_contains(poly, {2, 2}));  // inside the hole
  CHECK(polygon_contains(poly, {1, 2}));        // hole edge counts as inside
  CHECK(polygon_contains(poly, {1, 1}));        // hole vertex
}

TEST_CASE("polygon containment works for concave shapes") {
  // A 'U': the notch between the prongs is outside.
  const Polygon u{{{0, 0}, {5, 0}, {5, 4}, {4, 4}, {4, 1}, {1, 1}, {1, 4}, {0, 4}},
                  {}};
  CHECK(polygon_contains(u, {0.5, 3.0}));
  CHECK(polygon_contains(u, {4.5, 3.0}));
  CHECK(polygon_contains(u, {2.5, 0.5}));
  CHECK_FALSE(polygon_contains(u, {2.5, 3.0}));  // inside the notch
  CHECK_FALSE(polygon_contains(u, {2.5, 4.0}));
}

TEST_CASE("ray through a vertex does not double count") {
  // Diamond: a query point due west of the left vertex must stay outside,
  // and a point inside on the vertex's latitude must stay inside.
  const Polygon diamond{{{2, 0}, {4, 2}, {2, 4}, {0, 2}}, {}};
  CHECK_FALSE(polygon_contains(diamond, {-1, 2}));
  CHECK(polygon_contains(diamond, {1.5, 2}));
  CHECK(polygon_contains(diamond, {2, 2}));
  CHECK_FALSE(polygon_contains(diamond, {5, 2}));
}

TEST_CASE("polygon containment agrees with a vertical-ray reference") {
  std::mt19937_64 rng(17);
  const BoundingBox box = testing::test_bbox();
  std::uniform_real_distribution<double> lon(box.lon_min, box.lon_max);
  std::uniform_real_distribution<double> lat(box.lat_min, box.lat_max);

  auto areas = testing::gen_polygon_areas(rng, box, testing::kTestDay, 86400, 60);
  int inside_seen = 0;
  for (const auto& area : areas) {
    for (const Polygon& poly : area.parts) {
      for (int i = 0; i < 200; ++i) {
        const LonLat p{lon(rng), lat(rng)};
        const bool got = polygon_contains(poly, p);
        const bool want = testing::naive_polygon_contains(poly, p);
        CHECK(got == want);
        inside_seen += got;
      }
      // Vertices are boundary, hence inside, for both implementations.
      for (const LonLat& v : poly.outer) {
        CHECK(polygon_contains(poly, v));
        CHECK(testing::naive_polygon_contains(poly, v));
      }
    }
  }
  CHECK(inside_seen > 100);  // the comparison actually exercised hits
}

TEST_CASE("polygon bbox covers outer ring only as holes are interior") {
  const Polygon poly = donut();
  const BoundingBox box = polygon_bbox(poly);
  CHECK(box.lon_min == 0);
  CHECK(box.lat_min == 0);
  CHECK(box.lon_max == 4);
  CHECK(box.lat_max == 4);
}

TEST_CASE("bounding box validity and containment") {
  CHECK(BoundingBox{0, 0, 1, 1}.valid());
  CHECK_FALSE(BoundingBox{1, 0, 0, 1}.valid());
  CHECK_FALSE(BoundingBox{0, 0, 0, 1}.valid());
  const BoundingBox box{-74.0, 40.0, -73.0, 41.0};
  CHECK(box.contains({-74.0, 40.0}));
  CHECK(box.contains({-73.0, 41.0}));
  CHECK_FALSE(box.contains({-74.0001, 40.5}));
}
