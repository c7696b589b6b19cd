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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "trajrisk/error.hpp"

namespace trajrisk {
namespace {

using json = nlohmann::json;

std::uint64_t checked_cell_count(std::uint64_t cols, std::uint64_t rows,
                                 std::uint64_t slots) {
  unsigned __int128 n = static_cast<unsigned __int128>(cols) * rows;
  n *= slots;
  if (n > static_cast<unsigned __int128>(1) << 62) {
    throw Error("grid too fine: cell count exceeds 2^62");
  }
  return static_cast<std::uint64_t>(n);
}

// Number of half-open tiles of width `size` needed to cover `extent`.
// A sliver narrower than 1e-9 of a tile is treated as float noise, not a tile.
std::uint64_t tile_count(double extent, double size) {
  double q = extent / size;
  if (!(q >= 0.0) || q > 1e9) {
    throw Error("grid too fine: more than 1e9 tiles along one axis");
  }
  double whole = std::floor(q);
  std::uint64_t n = static_cast<std::uint64_t>(whole);
  if (q - whole > 1e-9) ++n;
  return std::max<std::uint64_t>(n, 1);
}

void validate_area(const EquivalenceArea& area) {
  if (area.area_id.empty()) throw Error("equivalence area with empty area_id");
  if (area.parts.empty()) {
    throw Error("area '" + area.area_id + "' has no polygon parts");
  }
  for (const Polygon& part : area.parts) {
    if (part.outer.size() < 3) {
      throw Error("area '" + area.area_id + "' has a ring with fewer than 3 vertices");
    }
    for (const Ring& hole : part.holes) {
      if (hole.size() < 3) {
        throw Error("area '" + area.area_id + "' has a hole with fewer than 3 vertices");
      }
    }
  }
  if (area.windows.empty()) {
    throw Error("area '" + area.area_id + "' has no time windows");
  }
  for (std::size_t i = 0; i < area.windows.size(); ++i) {
    if (!area.windows[i].valid()) {
      throw Error("area '" + area.area_id + "' has an empty time window");
    }
    if (i > 0 && area.windows[i].start < area.windows[i - 1].end) {
      throw Error("area '" + area.area_id + "' has overlapping time windows");
    }
  }
}

std::string string_member(const json& obj, const char* key) {
  if (!obj.is_object()) return {};
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) return {};
  return it->get<std::string>();
}

std::string feature_name(const json& props, std::size_t index) {
  if (props.is_object()) {
    auto it = props.find("area_id");
    if (it != props.end() && it->is_string()) return it->get<std::string>();
  }
  return "feature #" + std::to_string(index);
}

LonLat parse_position(const json& pos, const std::string& where) {
  if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() ||
      !pos[1].is_number()) {
    throw GeoJsonError(where + ": position must be [lon, lat]");
  }
  LonLat p{pos[0].get<double>(), pos[1].get<double>()};
  if (!(p.lon >= -180.0 && p.lon <= 180.0 && p.lat >= -90.0 && p.lat <= 90.0)) {
    throw GeoJsonError(where + ": coordinate out of range");
  }
  return p;
}

Ring parse_ring(const json& ring, const std::string& where) {
  if (!ring.is_array() || ring.size() < 4) {
    throw GeoJsonError(where + ": ring needs at least 4 positions");
  }
  Ring out;
  out.reserve(ring.size() - 1);
  for (const json& pos : ring) out.push_back(parse_position(pos, where));
  if (out.front().lon != out.back().lon || out.front().lat != out.back().lat) {
    throw GeoJsonError(where + ": ring is not closed");
  }
  out.pop_back();
  return out;
}

Polygon parse_polygon(const json& rings, const std::string& where) {
  if (!rings.is_array() || rings.empty()) {
    throw GeoJsonError(where + ": Polygon coordinates must be a ring list");
  }
  Polygon poly;
  poly.outer = parse_ring(rings[0], where);
  for (std::size_t i = 1; i < rings.size(); ++i) {
    poly.holes.push_back(parse_ring(rings[i], where));
  }
  return poly;
}

std::vector<TimeInterval> parse_time_windows(const json& windows,
                                             const std::string& where) {
  if (!windows.is_array()) {
    throw GeoJsonError(where + ": time_windows must be a list of [start, end] pairs");
  }
  std::vector<TimeInterval> out;
  for (const json& w : windows) {
    if (!w.is_array() || w.size() != 2 || !w[0].is_string() || !w[1].is_string()) {
      throw GeoJsonError(where + ": time window must be [startISO, endISO]");
    }
    const auto start = parse_timestamp(w[0].get<std::string>());
    const auto end = parse_timestamp(w[1].get<std::string>());
    if (!start || !end) {
      throw GeoJsonError(where + ": unparseable time window timestamp");
    }
    TimeInterval iv{*start, *end};
    if (!iv.valid()) {
      throw GeoJsonError(where + ": time window start must precede end");
    }
    out.push_back(iv);
  }
  std::sort(out.begin(), out.end(),
            [](const TimeInterval& a, const TimeInterval& b) {
              return a.start < b.start;
            });
  return out;
}

json interval_to_json(const TimeInterval& iv) {
  return json::array({format_timestamp(iv.start), format_timestamp(iv.end)});
}

json ring_to_json(const Ring& ring) {
  json out = json::array();
  for (const LonLat& p : ring) out.push_back(json::array({p.lon, p.lat}));
  out.push_back(json::array({ring.front().lon, ring.front().lat}));
  return out;
}

json polygon_to_json(const Polygon& poly) {
  json rings = json::array();
  rings.push_back(ring_to_json(poly.outer));
  for (const Ring& hole : poly.holes) rings.push_back(ring_to_json(hole));
  return rings;
}

}  // namespace

std::uint64_t AreaSet::area_count() const {
  if (kind_ == AreaKind::grid) {
    return grid_.cols * grid_.rows * grid_.slots;
  }
  return areas_.size();
}

bool AreaSet::enumerable() const {
  return kind_ == AreaKind::polygon || area_count() <= kGridEnumerationLimit;
}

std::optional<AreaRef> AreaSet::locate(Timestamp t, LonLat s) const {
  if (kind_ == AreaKind::grid) {
    const GridParams& g = grid_;
    if (!g.time_range.contains(t)) return std::nullopt;
    if (s.lon < g.bbox.lon_min || s.lon >= g.bbox.lon_max) return std::nullopt;
    if (s.lat < g.bbox.lat_min || s.lat >= g.bbox.lat_max) return std::nullopt;
    auto clamp_tile = [](double offset, double size, std::uint64_t n) {
      double idx = std::floor(offset / size);
      if (idx < 0.0) idx = 0.0;
      std::uint64_t i = static_cast<std::uint64_t>(idx);
      return std::min(i, n - 1);
    };
    std::uint64_t col = clamp_tile(s.lon - g.bbox.lon_min, g.spatial_size_deg, g.cols);
    std::uint64_t row = clamp_tile(s.lat - g.bbox.lat_min, g.spatial_size_deg, g.rows);
    std::int64_t slot = floor_div(t - g.time_origin, g.temporal_size) - g.slot_lo;
    // Guaranteed by the time_range gate; integer arithmetic is exact.
    std::uint64_t sl = static_cast<std::uint64_t>(slot);
    return (sl * g.rows + row) * g.cols + col;
  }

  std::optional<std::uint32_t> best;
  part_index_.visit_point(s.lon, s.lat, [&](std::uint32_t flat) {
    const auto [area_idx, part_idx] = flat_parts_[flat];
    if (best && *best >= area_idx) return;
    const EquivalenceArea& area = areas_[area_idx];
    bool in_window = false;
    for (const TimeInterval& w : area.windows) {
      if (w.contains(t)) {
        in_window = true;
        break;
      }
    }
    if (!in_window) return;
    if (polygon_contains(area.parts[part_idx], s)) best = area_idx;
  });
  if (!best) return std::nullopt;
  return static_cast<AreaRef>(*best);
}

std::string AreaSet::area_id(AreaRef ref) const {
  if (kind_ == AreaKind::polygon) return areas_.at(ref).area_id;
  const GridParams& g = grid_;
  std::uint64_t col = ref % g.cols;
  std::uint64_t row = (ref / g.cols) % g.rows;
  std::uint64_t slot = ref / (g.cols * g.rows);
  if (slot >= g.slots) throw Error("area ref out of range");
  std::ostringstream os;
  os << 'c' << col << "_r" << row << "_t" << slot;
  return os.str();
}

const std::string& AreaSet::label(AreaRef ref) const {
  static const std::string kEmpty;
  if (kind_ == AreaKind::polygon) return areas_.at(ref).label;
  if (ref >= area_count()) throw Error("area ref out of range");
  return kEmpty;
}

std::optional<AreaRef> AreaSet::ref_of(std::string_view id) const {
  if (kind_ == AreaKind::polygon) {
    auto it = id_index_.find(std::string(id));
    if (it == id_index_.end()) return std::nullopt;
    return static_cast<AreaRef>(it->second);
  }
  // Parse "c{col}_r{row}_t{slot}".
  auto take = [&](char prefix, std::uint64_t& out) {
    if (id.empty() || id.front() != prefix) return false;
    id.remove_prefix(1);
    auto [p, ec] = std::from_chars(id.data(), id.data() + id.size(), out);
    if (ec != std::errc() || p == id.data()) return false;
    id.remove_prefix(p - id.data());
    return true;
  };
  std::uint64_t col = 0, row = 0, slot = 0;
  if (!take('c', col)) return std::nullopt;
  if (id.empty() || id.front() != '_') return std::nullopt;
  id.remove_prefix(1);
  if (!take('r', row)) return std::nullopt;
  if (id.empty() || id.front() != '_') return std::nullopt;
  id.remove_prefix(1);
  if (!take('t', slot)) return std::nullopt;
  if (!id.empty()) return std::nullopt;
  const GridParams& g = grid_;
  if (col >= g.cols || row >= g.rows || slot >= g.slots) return std::nullopt;
  return (slot * g.rows + row) * g.cols + col;
}

EquivalenceArea AreaSet::materialize(AreaRef ref) const {
  if (kind_ == AreaKind::polygon) return areas_.at(ref);
  const GridParams& g = grid_;
  if (ref >= area_count()) throw Error("area ref out of range");
  std::uint64_t col = ref % g.cols;
  std::uint64_t row = (ref / g.cols) % g.rows;
  std::uint64_t slot = ref / (g.cols * g.rows);

  double x0 = g.bbox.lon_min + static_cast<double>(col) * g.spatial_size_deg;
  double x1 = std::min(x0 + g.spatial_size_deg, g.bbox.lon_max);
  double y0 = g.bbox.lat_min + static_cast<double>(row) * g.spatial_size_deg;
  double y1 = std::min(y0 + g.spatial_size_deg, g.bbox.lat_max);

  EquivalenceArea area;
  area.area_id = area_id(ref);
  Polygon rect;
  rect.outer = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  area.parts.push_back(std::move(rect));

  std::int64_t abs_slot = g.slot_lo + static_cast<std::int64_t>(slot);
  TimeInterval w;
  w.start = std::max<Timestamp>(g.time_origin + abs_slot * g.temporal_size,
                                g.time_range.start);
  w.end = std::min<Timestamp>(g.time_origin + (abs_slot + 1) * g.temporal_size,
                              g.time_range.end);
  area.windows.push_back(w);
  return area;
}

AreaSet build_grid(const BoundingBox& bbox, double spatial_size_deg,
                   Duration temporal_size, TimeInterval time_range,
                   Timestamp time_origin) {
  if (!bbox.valid()) throw Error("grid bounding box is invalid");
  if (!(spatial_size_deg > 0.0) || !std::isfinite(spatial_size_deg)) {
    throw Error("grid spatial cell size must be positive");
  }
  if (temporal_size <= 0) throw Error("grid temporal cell size must be positive");
  if (!time_range.valid()) throw Error("grid time range is empty");

  AreaSet set;
  set.kind_ = AreaKind::grid;
  GridParams& g = set.grid_;
  g.bbox = bbox;
  g.spatial_size_deg = spatial_size_deg;
  g.temporal_size = temporal_size;
  g.time_range = time_range;
  g.time_origin = time_origin;
  g.cols = tile_count(bbox.lon_max - bbox.lon_min, spatial_size_deg);
  g.rows = tile_count(bbox.lat_max - bbox.lat_min, spatial_size_deg);
  g.slot_lo = floor_div(time_range.start - time_origin, temporal_size);
  std::int64_t slot_hi = floor_div(time_range.end - 1 - time_origin, temporal_size);
  g.slots = static_cast<std::uint64_t>(slot_hi - g.slot_lo + 1);
  checked_cell_count(g.cols, g.rows, g.slots);
  return set;
}

AreaSet make_polygon_area_set(std::vector<EquivalenceArea> areas) {
  AreaSet set;
  set.kind_ = AreaKind::polygon;
  set.areas_ = std::move(areas);
  if (set.areas_.size() > 0xFFFFFFFFull) throw Error("too many areas");

  std::vector<StaticRTree::Entry> entries;
  for (std::uint32_t a = 0; a < set.areas_.size(); ++a) {
    EquivalenceArea& area = set.areas_[a];
    std::sort(area.windows.begin(), area.windows.end(),
              [](const TimeInterval& x, const TimeInterval& y) {
                return x.start < y.start;
              });
    validate_area(area);
    if (!set.id_index_.emplace(area.area_id, a).second) {
      throw Error("duplicate area_id '" + area.area_id + "'");
    }
    for (std::uint32_t p = 0; p < area.parts.size(); ++p) {
      BoundingBox bb = polygon_bbox(area.parts[p]);
      entries.push_back({Rect{bb.lon_min, bb.lat_min, bb.lon_max, bb.lat_max},
                         static_cast<std::uint32_t>(set.flat_parts_.size())});
      set.flat_parts_.emplace_back(a, p);
    }
  }
  set.part_index_ = StaticRTree(std::move(entries));
  return set;
}

AreaSet load_polygon_areas(std::string_view geojson_text,
                           const std::vector<TimeInterval>& default_time_windows) {
  for (std::size_t i = 0; i < default_time_windows.size(); ++i) {
    if (!default_time_windows[i].valid()) {
      throw Error("default time window start must precede end");
    }
    if (i > 0 && default_time_windows[i].start < default_time_windows[i - 1].end) {
      throw Error("default time windows overlap");
    }
  }

  json doc;
  try {
    doc = json::parse(geojson_text);
  } catch (const json::parse_error& e) {
    throw GeoJsonError(std::string("not valid JSON: ") + e.what());
  }
  if (string_member(doc, "type") != "FeatureCollection") {
    throw GeoJsonError("expected a FeatureCollection");
  }
  auto features = doc.find("features");
  if (features == doc.end() || !features->is_array()) {
    throw GeoJsonError("FeatureCollection has no features array");
  }

  std::vector<EquivalenceArea> areas;
  areas.reserve(features->size());
  for (std::size_t i = 0; i < features->size(); ++i) {
    const json& f = (*features)[i];
    if (string_member(f, "type") != "Feature") {
      throw GeoJsonError("features[" + std::to_string(i) + "] is not a Feature");
    }
    const json props = f.value("properties", json());
    const std::string where = feature_name(props, i);

    EquivalenceArea area;
    if (props.is_object()) {
      auto it = props.find("area_id");
      if (it != props.end()) {
        if (!it->is_string()) throw GeoJsonError(where + ": area_id must be a string");
        area.area_id = it->get<std::string>();
      }
      auto lbl = props.find("label");
      if (lbl != props.end()) {
        if (!lbl->is_string()) throw GeoJsonError(where + ": label must be a string");
        area.label = lbl->get<std::string>();
      }
    }
    if (area.area_id.empty()) area.area_id = "f" + std::to_string(i);

    auto geom = f.find("geometry");
    if (geom == f.end() || !geom->is_object()) {
      throw GeoJsonError(where + ": missing geometry");
    }
    const std::string gtype = string_member(*geom, "type");
    const json& coords = geom->contains("coordinates") ? (*geom)["coordinates"] : json();
    if (gtype == "Polygon") {
      area.parts.push_back(parse_polygon(coords, where));
    } else if (gtype == "MultiPolygon") {
      if (!coords.is_array() || coords.empty()) {
        throw GeoJsonError(where + ": MultiPolygon coordinates must be a polygon list");
      }
      for (const json& poly : coords) {
        area.parts.push_back(parse_polygon(poly, where));
      }
    } else {
      throw GeoJsonError(where + ": unsupported geometry type '" + gtype + "'");
    }

    if (props.is_object() && props.contains("time_windows")) {
      area.windows = parse_time_windows(props["time_windows"], where);
    } else {
      area.windows = default_time_windows;
    }
    if (area.windows.empty()) {
      throw GeoJsonError(where + ": no time windows given and no defaults configured");
    }
    areas.push_back(std::move(area));
  }
  return make_polygon_area_set(std::move(areas));
}

AreaSet load_polygon_areas_file(const std::string& path,
                                const std::vector<TimeInterval>& default_time_windows) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return load_polygon_areas(buf.str(), default_time_windows);
  } catch (const GeoJsonError& e) {
    throw GeoJsonError(path + ": " + e.what());
  }
}

std::string area_set_to_geojson(const AreaSet& areas) {
  if (!areas.enumerable()) {
    throw Error("area set is too large to enumerate as GeoJSON");
  }
  json features = json::array();
  for (AreaRef ref = 0; ref < areas.area_count(); ++ref) {
    EquivalenceArea area = areas.materialize(ref);
    json geometry;
    if (area.parts.size() == 1) {
      geometry = {{"type", "Polygon"}, {"coordinates", polygon_to_json(area.parts[0])}};
    } else {
      json polys = json::array();
      for (const Polygon& part : area.parts) polys.push_back(polygon_to_json(part));
      geometry = {{"type", "MultiPolygon"}, {"coordinates", polys}};
    }
    json windows = json::array();
    for (const TimeInterval& w : area.windows) windows.push_back(interval_to_json(w));
    json props = {{"area_id", area.area_id}, {"time_windows", windows}};
    if (!area.label.empty()) props["label"] = area.label;
    features.push_back({{"type", "Feature"},
                        {"properties", props},
                        {"geometry", geometry}});
  }
  json doc = {{"type", "FeatureCollection"}, {"features", features}};
  return doc.dump(2) + "\n";
}

}  // namespace trajrisk
