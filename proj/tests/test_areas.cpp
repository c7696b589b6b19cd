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

#include "trajrisk/areas.hpp"

#include <doctest.h>

#include <random>

#include "trajrisk/error.hpp"
#include "support/gen.hpp"
#include "support/naive.hpp"

using namespace trajrisk;

namespace {

constexpr Timestamp kT0 = testing::kTestDay;
const BoundingBox kUnitBox{-74.0, 40.0, -73.0, 41.0};

AreaSet unit_grid() {
  // 2 x 2 cells of half a degree, hourly slots over one day.
  return build_grid(kUnitBox, 0.5, 3600, {kT0, kT0 + 86400}, kT0);
}

}  // namespace

TEST_CASE("grid derives its tiling from bbox, cell size and time range") {
  const AreaSet grid = unit_grid();
  const GridParams& params = *grid.grid_params();
  CHECK(grid.kind() == AreaKind::grid);
  CHECK(params.cols == 2);
  CHECK(params.rows == 2);
  CHECK(params.slots == 24);
  CHECK(params.slot_lo == 0);
  CHECK(grid.area_count() == 2 * 2 * 24);
  CHECK(grid.enumerable());
}

TEST_CASE("grid adds a clipped cell when the box is not a multiple of the size") {
  const AreaSet grid =
      build_grid({0.0, 0.0, 1.0, 0.9}, 0.3, 3600, {kT0, kT0 + 3600}, kT0);
  const GridParams& params = *grid.grid_params();
  CHECK(params.cols == 4);  // 3 whole columns plus a 0.1-degree sliver
  CHECK(params.rows == 3);
  CHECK(params.slots == 1);

  // The sliver column is reachable and clipped to the bbox edge.
  const auto ref = grid.locate(kT0, {0.95, 0.45});
  REQUIRE(ref.has_value());
  CHECK(grid.area_id(*ref) == "c3_r1_t0");
  const EquivalenceArea cell = grid.materialize(*ref);
  REQUIRE(cell.parts.size() == 1);
  BoundingBox box = polygon_bbox(cell.parts[0]);
  CHECK(box.lon_max == 1.0);
  CHECK(box.lon_min == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("grid cells are half-open on every axis") {
  const AreaSet grid = unit_grid();
  // Min corner of the bbox at the first instant: cell (0, 0, 0).
  auto ref = grid.locate(kT0, {-74.0, 40.0});
  REQUIRE(ref);
  CHECK(grid.area_id(*ref) == "c0_r0_t0");
  // Interior cell boundary belongs to the upper cell.
  ref = grid.locate(kT0, {-73.5, 40.0});
  REQUIRE(ref);
  CHECK(grid.area_id(*ref) == "c1_r0_t0");
  ref = grid.locate(kT0 + 3600, {-74.0, 40.0});
  REQUIRE(ref);
  CHECK(grid.area_id(*ref) == "c0_r0_t1");
  // Max edges are exclusive.
  CHECK_FALSE(grid.locate(kT0, {-73.0, 40.5}));
  CHECK_FALSE(grid.locate(kT0, {-73.5, 41.0}));
  CHECK_FALSE(grid.locate(kT0 + 86400, {-73.5, 40.5}));
  // Just inside all three max edges lands in the last cell.
  ref = grid.locate(kT0 + 86399, {-73.000001, 40.999999});
  REQUIRE(ref);
  CHECK(grid.area_id(*ref) == "c1_r1_t23");
}

TEST_CASE("grid rejects points outside the bbox or time range") {
  const AreaSet grid = unit_grid();
  CHECK_FALSE(grid.locate(kT0, {-74.1, 40.5}));
  CHECK_FALSE(grid.locate(kT0, {-73.5, 39.9}));
  CHECK_FALSE(grid.locate(kT0 - 1, {-73.5, 40.5}));
  CHECK(grid.locate(kT0 + 43200, {-73.5, 40.5}));
}

TEST_CASE("grid time origin earlier than the range shifts slot alignment") {
  // Slots align to 90 minutes before the range starts, so the range begins
  // mid-slot: the first reported slot is a clipped half hour.
  const Timestamp origin = kT0 - 5400;
  const AreaSet grid =
      build_grid(kUnitBox, 0.5, 3600, {kT0, kT0 + 7200}, origin);
  const GridParams& params = *grid.grid_params();
  CHECK(params.slot_lo == 1);
  CHECK(params.slots == 3);  // 30min + 60min + 30min cover the 2h range

  auto ref = grid.locate(kT0, {-73.75, 40.25});
  REQUIRE(ref);
  CHECK(grid.area_id(*ref) == "c0_r0_t0");
  const EquivalenceArea first = grid.materialize(*ref);
  REQUIRE(first.windows.size() == 1);
  CHECK(first.windows[0].start == kT0);            // clipped to the range
  CHECK(first.windows[0].end == origin + 2 * 3600);  // true slot boundary

  // 30 minutes in, the second slot starts.
  ref = grid.locate(kT0 + 1800, {-73.75, 40.25});
  REQUIRE(ref);
  CHECK(grid.area_id(*ref) == "c0_r0_t1");
}

TEST_CASE("grid ids and refs round-trip") {
  const AreaSet grid = unit_grid();
  std::mt19937_64 rng(29);
  for (int i = 0; i < 50; ++i) {
    const AreaRef ref = rng() % grid.area_count();
    const std::string id = grid.area_id(ref);
    CHECK(grid.ref_of(id) == ref);
  }
  CHECK(grid.ref_of("c1_r1_t23") == grid.area_count() - 1);
  CHECK_FALSE(grid.ref_of("c2_r0_t0"));   // out of range column
  CHECK_FALSE(grid.ref_of("c0_r0_t24"));  // out of range slot
  CHECK_FALSE(grid.ref_of("c0_r0"));
  CHECK_FALSE(grid.ref_of("p1"));
  CHECK_FALSE(grid.ref_of(""));
  CHECK_THROWS_AS(grid.area_id(grid.area_count()), Error);
}

TEST_CASE("grid locate agrees with a cell-by-cell scan") {
  std::mt19937_64 rng(31);
  const BoundingBox box = testing::test_bbox();
  std::uniform_real_distribution<double> lon(box.lon_min - 0.01, box.lon_max + 0.01);
  std::uniform_real_distribution<double> lat(box.lat_min - 0.01, box.lat_max + 0.01);
  std::uniform_int_distribution<Timestamp> when(kT0 - 3600, kT0 + 90000);

  for (int trial = 0; trial < 5; ++trial) {
    const AreaSet grid = testing::gen_grid(rng, box, kT0, 86400);
    for (int i = 0; i < 1000; ++i) {
      const LonLat p{lon(rng), lat(rng)};
      const Timestamp t = when(rng);
      CHECK(grid.locate(t, p) == testing::naive_locate(grid, t, p));
    }
  }
}

TEST_CASE("grid with too many cells per axis is rejected") {
  CHECK_THROWS_AS(
      build_grid(kUnitBox, 1e-10, 3600, {kT0, kT0 + 3600}, kT0), Error);
}

TEST_CASE("grid beyond the enumeration limit still locates but cannot be listed") {
  // 3000 x 3000 spatial cells: far past the enumeration cutoff.
  const AreaSet grid = build_grid({0.0, 0.0, 0.3, 0.3}, 0.0001, 43200,
                                  {kT0, kT0 + 86400}, kT0);
  CHECK_FALSE(grid.enumerable());
  CHECK(grid.area_count() == 3000ull * 3000ull * 2ull);
  const auto ref = grid.locate(kT0, {0.15005, 0.15005});
  REQUIRE(ref);
  CHECK(grid.area_id(*ref) == "c1500_r1500_t0");
  CHECK_THROWS_AS(area_set_to_geojson(grid), Error);
}

TEST_CASE("grid construction validates its inputs") {
  const TimeInterval day{kT0, kT0 + 86400};
  CHECK_THROWS_AS(build_grid({1, 0, 0, 1}, 0.5, 3600, day, kT0), Error);
  CHECK_THROWS_AS(build_grid(kUnitBox, 0.0, 3600, day, kT0), Error);
  CHECK_THROWS_AS(build_grid(kUnitBox, -0.5, 3600, day, kT0), Error);
  CHECK_THROWS_AS(build_grid(kUnitBox, 0.5, 0, day, kT0), Error);
  CHECK_THROWS_AS(build_grid(kUnitBox, 0.5, 3600, {kT0, kT0}, kT0), Error);
}

TEST_CASE("polygon areas: later features win overlaps") {
  const TimeInterval day{kT0, kT0 + 86400};
  EquivalenceArea low;
  low.area_id = "low";
  low.parts.push_back({{{0, 0}, {4, 0}, {4, 4}, {0, 4}}, {}});
  low.windows.push_back(day);
  EquivalenceArea high;
  high.area_id = "high";
  high.parts.push_back({{{2, 2}, {6, 2}, {6, 6}, {2, 6}}, {}});
  high.windows.push_back(day);

  const AreaSet set = make_polygon_area_set({low, high});
  CHECK(set.kind() == AreaKind::polygon);
  CHECK(set.area_count() == 2);
  CHECK(set.enumerable());

  auto at = [&](double lon, double lat) {
    auto ref = set.locate(kT0 + 3600, {lon, lat});
    return ref ? set.area_id(*ref) : std::string("none");
  };
  CHECK(at(1, 1) == "low");
  CHECK(at(3, 3) == "high");  // overlap goes to the later feature
  CHECK(at(5, 5) == "high");
  CHECK(at(7, 7) == "none");
  CHECK(set.ref_of("low") == 0);
  CHECK(set.ref_of("high") == 1);
  CHECK_FALSE(set.ref_of("nope"));
}

TEST_CASE("polygon areas respect their time windows") {
  EquivalenceArea morning;
  morning.area_id = "morning";
  morning.parts.push_back({{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {}});
  morning.windows.push_back({kT0 + 7 * 3600, kT0 + 10 * 3600});
  morning.windows.push_back({kT0 + 16 * 3600, kT0 + 19 * 3600});

  const AreaSet set = make_polygon_area_set({morning});
  const LonLat p{0.5, 0.5};
  CHECK(set.locate(kT0 + 8 * 3600, p));
  CHECK(set.locate(kT0 + 17 * 3600, p));
  CHECK_FALSE(set.locate(kT0 + 12 * 3600, p));
  CHECK_FALSE(set.locate(kT0 + 10 * 3600, p));  // window end is exclusive
  CHECK(set.locate(kT0 + 7 * 3600, p));         // window start is inclusive
}

TEST_CASE("a multi-part area is one area") {
  const AreaSet set = testing::block_fixture_areas();
  const Timestamp noon = kT0 + 12 * 3600;
  const auto in_first = set.locate(noon, {4.5, 0.5});
  const auto in_second = set.locate(noon, {4.5, 2.5});
  REQUIRE(in_first);
  REQUIRE(in_second);
  CHECK(*in_first == *in_second);
  CHECK(set.area_id(*in_first) == "hospital");
  CHECK(set.label(*in_first) == "two buildings, one area");
  CHECK_FALSE(set.locate(noon, {4.5, 1.5}));  // the gap between the buildings
}

TEST_CASE("polygon area construction validates structure") {
  const TimeInterval day{kT0, kT0 + 86400};
  EquivalenceArea ok;
  ok.area_id = "a";
  ok.parts.push_back({{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {}});
  ok.windows.push_back(day);

  EquivalenceArea no_id = ok;
  no_id.area_id = "";
  CHECK_THROWS_AS(make_polygon_area_set({no_id}), Error);

  EquivalenceArea dup = ok;
  dup.area_id = "a";
  CHECK_THROWS_AS(make_polygon_area_set({ok, dup}), Error);

  EquivalenceArea no_parts = ok;
  no_parts.area_id = "b";
  no_parts.parts.clear();
  CHECK_THROWS_AS(make_polygon_area_set({no_parts}), Error);

  EquivalenceArea thin = ok;
  thin.area_id = "c";
  thin.parts[0].outer.resize(2);
  CHECK_THROWS_AS(make_polygon_area_set({thin}), Error);

  EquivalenceArea no_window = ok;
  no_window.area_id = "d";
  no_window.windows.clear();
  CHECK_THROWS_AS(make_polygon_area_set({no_window}), Error);

  EquivalenceArea bad_window = ok;
  bad_window.area_id = "e";
  bad_window.windows = {{kT0 + 10, kT0 + 10}};
  CHECK_THROWS_AS(make_polygon_area_set({bad_window}), Error);

  EquivalenceArea overlap = ok;
  overlap.area_id = "f";
  overlap.windows = {{kT0, kT0 + 100}, {kT0 + 50, kT0 + 200}};
  CHECK_THROWS_AS(make_polygon_area_set({overlap}), Error);
}

TEST_CASE("geojson areas load with ids, labels, windows and defaults") {
  const std::string text = R"({
    "type": "FeatureCollection",
    "features": [
      {"type": "Feature",
       "properties": {"area_id": "square", "label": "downtown"},
       "geometry": {"type": "Polygon",
                    "coordinates": [[[0,0],[1,0],[1,1],[0,1],[0,0]]]}},
      {"type": "Feature",
       "properties": {"time_windows": [["2009-01-05T07:00:00Z",
                                        "2009-01-05T08:00:00Z"]]},
       "geometry": {"type": "MultiPolygon",
                    "coordinates": [[[[2,0],[3,0],[3,1],[2,1],[2,0]]],
                                    [[[4,0],[5,0],[5,1],[4,1],[4,0]]]]}}
    ]})";
  const AreaSet set =
      load_polygon_areas(text, {{kT0, kT0 + 86400}});
  CHECK(set.area_count() == 2);
  REQUIRE(set.polygon_areas().size() == 2);

  const EquivalenceArea& square = set.polygon_areas()[0];
  CHECK(square.area_id == "square");
  CHECK(square.label == "downtown");
  REQUIRE(square.windows.size() == 1);
  CHECK(square.windows[0] == TimeInterval{kT0, kT0 + 86400});  // default

  const EquivalenceArea& pair = set.polygon_areas()[1];
  CHECK(pair.area_id == "f1");  // fallback id from the feature index
  CHECK(pair.parts.size() == 2);
  REQUIRE(pair.windows.size() == 1);
  CHECK(pair.windows[0] ==
        TimeInterval{kT0 + 7 * 3600, kT0 + 8 * 3600});

  CHECK(set.locate(kT0 + 7 * 3600 + 60, {4.5, 0.5}).has_value());
  CHECK_FALSE(set.locate(kT0 + 9 * 3600, {4.5, 0.5}));
}

TEST_CASE("geojson loading rejects malformed input") {
  const std::vector<TimeInterval> day{{kT0, kT0 + 86400}};
  CHECK_THROWS_AS(load_polygon_areas("not json", day), GeoJsonError);
  CHECK_THROWS_AS(load_polygon_areas(R"({"type": "Feature"})", day), GeoJsonError);
  CHECK_THROWS_AS(load_polygon_areas(R"({"type": "FeatureCollection"})", day),
                  GeoJsonError);
  // Unclosed ring.
  CHECK_THROWS_AS(load_polygon_areas(R"({
    "type": "FeatureCollection",
    "features": [{"type": "Feature", "properties": {},
      "geometry": {"type": "Polygon",
                   "coordinates": [[[0,0],[1,0],[1,1],[0,1]]]}}]})", day),
                  GeoJsonError);
  // Unsupported geometry.
  CHECK_THROWS_AS(load_polygon_areas(R"({
    "type": "FeatureCollection",
    "features": [{"type": "Feature", "properties": {},
      "geometry": {"type": "Point", "coordinates": [0, 0]}}]})", day),
                  GeoJsonError);
  // Numeric area_id.
  CHECK_THROWS_AS(load_polygon_areas(R"({
    "type": "FeatureCollection",
    "features": [{"type": "Feature", "properties": {"area_id": 7},
      "geometry": {"type": "Polygon",
                   "coordinates": [[[0,0],[1,0],[1,1],[0,1],[0,0]]]}}]})", day),
                  GeoJsonError);
  // Coordinates out of range.
  CHECK_THROWS_AS(load_polygon_areas(R"({
    "type": "FeatureCollection",
    "features": [{"type": "Feature", "properties": {},
      "geometry": {"type": "Polygon",
                   "coordinates": [[[0,0],[200,0],[200,1],[0,1],[0,0]]]}}]})", day),
                  GeoJsonError);
  // No window anywhere: no property and no defaults.
  CHECK_THROWS_AS(load_polygon_areas(R"({
    "type": "FeatureCollection",
    "features": [{"type": "Feature", "properties": {},
      "geometry": {"type": "Polygon",
                   "coordinates": [[[0,0],[1,0],[1,1],[0,1],[0,0]]]}}]})", {}),
                  GeoJsonError);
  // Duplicate ids across features.
  CHECK_THROWS_AS(load_polygon_areas(R"({
    "type": "FeatureCollection",
    "features": [
      {"type": "Feature", "properties": {"area_id": "x"},
       "geometry": {"type": "Polygon",
                    "coordinates": [[[0,0],[1,0],[1,1],[0,1],[0,0]]]}},
      {"type": "Feature", "properties": {"area_id": "x"},
       "geometry": {"type": "Polygon",
                    "coordinates": [[[2,0],[3,0],[3,1],[2,1],[2,0]]]}}
    ]})", day),
                  Error);
}

TEST_CASE("area sets serialize to geojson and load back equivalently") {
  std::mt19937_64 rng(37);
  const AreaSet original = make_polygon_area_set(testing::gen_polygon_areas(
      rng, testing::test_bbox(), kT0, 86400, 25));
  const std::string text = area_set_to_geojson(original);
  const AreaSet reloaded = load_polygon_areas(text, {});

  CHECK(reloaded.area_count() == original.area_count());
  const BoundingBox box = testing::test_bbox();
  std::uniform_real_distribution<double> lon(box.lon_min, box.lon_max);
  std::uniform_real_distribution<double> lat(box.lat_min, box.lat_max);
  std::uniform_int_distribution<Timestamp> when(kT0, kT0 + 86399);
  for (int i = 0; i < 2000; ++i) {
    const LonLat p{lon(rng), lat(rng)};
    const Timestamp t = when(rng);
    const auto a = original.locate(t, p);
    const auto b = reloaded.locate(t, p);
    const std::string ida = a ? original.area_id(*a) : "none";
    const std::string idb = b ? reloaded.area_id(*b) : "none";
    CHECK(ida == idb);
  }

  // A small grid also exports: one rectangle feature per cell.
  const AreaSet grid =
      build_grid(kUnitBox, 0.5, 43200, {kT0, kT0 + 86400}, kT0);
  const AreaSet grid_as_polys = load_polygon_areas(area_set_to_geojson(grid), {});
  CHECK(grid_as_polys.area_count() == grid.area_count());
}
