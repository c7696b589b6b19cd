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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "trajrisk/geometry.hpp"
#include "trajrisk/rtree.hpp"
#include "trajrisk/time.hpp"

namespace trajrisk {

// Half-open [start, end).
struct TimeInterval {
  Timestamp start = 0;
  Timestamp end = 0;

  bool contains(Timestamp t) const { return t >= start && t < end; }
  bool valid() const { return start < end; }

  friend bool operator==(const TimeInterval&, const TimeInterval&) = default;
};

// A spatio-temporal region an adversary cannot see inside of: one or more
// disjoint polygon parts, active during one or more disjoint time windows.
// A point is in the area when it falls inside any part during any window.
struct EquivalenceArea {
  std::string area_id;
  std::vector<Polygon> parts;
  std::vector<TimeInterval> windows;
  std::string label;
};

struct GridParams {
  BoundingBox bbox;
  double spatial_size_deg = 0.0;
  Duration temporal_size = 0;
  TimeInterval time_range;
  Timestamp time_origin = 0;
  // Derived tiling dimensions.
  std::uint64_t cols = 0;
  std::uint64_t rows = 0;
  std::uint64_t slots = 0;
  std::int64_t slot_lo = 0;
};

enum class AreaKind { grid, polygon };

// Dense handle into an AreaSet's (possibly implicit) area space.
using AreaRef = std::uint64_t;

// Above this cell count a grid's areas are not enumerated; scores are
// reported for occupied cells only. Fine sweeps over a metro bounding box
// produce hundreds of millions of cells, almost all of them empty.
inline constexpr std::uint64_t kGridEnumerationLimit = 100000;

// A queryable set of equivalence areas. Grid sets keep their cells implicit
// and locate by arithmetic; polygon sets use a packed bounding-box tree over
// polygon parts. Immutable after construction; locate is pure.
class AreaSet {
 public:
  AreaKind kind() const { return kind_; }
  std::uint64_t area_count() const;

  // Whether per-area enumeration (refs 0 .. area_count()-1) is practical.
  bool enumerable() const;

  // The highest-priority area containing the point, or nullopt. For polygon
  // sets, later-listed areas win overlaps; grid cells never overlap.
  // Boundary handling: grid cells are half-open in lon, lat and time;
  // polygon boundary points count as inside.
  std::optional<AreaRef> locate(Timestamp t, LonLat s) const;

  std::string area_id(AreaRef ref) const;
  const std::string& label(AreaRef ref) const;
  std::optional<AreaRef> ref_of(std::string_view area_id) const;

  // Concrete geometry and windows; grid cells come out as rectangles.
  EquivalenceArea materialize(AreaRef ref) const;

  const GridParams* grid_params() const {
    return kind_ == AreaKind::grid ? &grid_ : nullptr;
  }

  // Polygon sets only: areas in priority order (later wins overlaps).
  const std::vector<EquivalenceArea>& polygon_areas() const { return areas_; }

  friend AreaSet build_grid(const BoundingBox&, double, Duration, TimeInterval,
                            Timestamp);
  friend AreaSet make_polygon_area_set(std::vector<EquivalenceArea> areas);

 private:
  AreaKind kind_ = AreaKind::polygon;
  GridParams grid_;

  std::vector<EquivalenceArea> areas_;
  StaticRTree part_index_;  // entries: part bbox -> flat part number
  std::vector<std::pair<std::uint32_t, std::uint32_t>> flat_parts_;  // (area, part)
  std::unordered_map<std::string, std::uint32_t> id_index_;
};

// Uniform spatio-temporal grid over bbox x time_range, cells half-open and
// aligned to the bbox min corner and to time_origin. Ragged edge cells are
// clipped to the bbox / time range so the tiling is exact. Cell ids encode
// (col, row, slot) as "c{col}_r{row}_t{slot}".
AreaSet build_grid(const BoundingBox& bbox, double spatial_size_deg,
                   Duration temporal_size, TimeInterval time_range,
                   Timestamp time_origin);

// Builds a polygon AreaSet from already-validated areas, priority = order.
// Throws on duplicate area ids or structurally invalid areas.
AreaSet make_polygon_area_set(std::vector<EquivalenceArea> areas);

// Parses a GeoJSON FeatureCollection of Polygon / MultiPolygon features.
// Optional feature properties: "area_id" (default "f{index}"), "label",
// "time_windows" as a list of [startISO, endISO) pairs. Features without
// time_windows inherit default_time_windows. Feature order is priority
// order: later features win overlaps.
AreaSet load_polygon_areas(std::string_view geojson_text,
                           const std::vector<TimeInterval>& default_time_windows);

AreaSet load_polygon_areas_file(const std::string& path,
                                const std::vector<TimeInterval>& default_time_windows);

// FeatureCollection with one feature per area (grid cells materialized as
// rectangles). Requires an enumerable AreaSet.
std::string area_set_to_geojson(const AreaSet& areas);

}  // namespace trajrisk
