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

#include <algorithm>
#include <cmath>
#include <limits>

namespace trajrisk {

bool point_on_segment(LonLat p, LonLat a, LonLat b) {
  double cross =
      (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon);
  if (cross != 0.0) return false;
  return std::min(a.lon, b.lon) <= p.lon && p.lon <= std::max(a.lon, b.lon) &&
         std::min(a.lat, b.lat) <= p.lat && p.lat <= std::max(a.lat, b.lat);
}

namespace {

// Horizontal ray crossing count; the caller has already handled boundary
// points, so edges through p only flip parity per the half-open lat rule.
bool ring_crossings_odd(const Ring& ring, LonLat p, bool parity_in) {
  bool inside = parity_in;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const LonLat& a = ring[j];
    const LonLat& b = ring[i];
    if ((a.lat > p.lat) != (b.lat > p.lat)) {
      double x_at_lat =
          a.lon + (p.lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
      if (p.lon < x_at_lat) inside = !inside;
    }
  }
  return inside;
}

bool on_ring_boundary(const Ring& ring, LonLat p) {
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if (point_on_segment(p, ring[j], ring[i])) return true;
  }
  return false;
}

}  // namespace

bool polygon_contains(const Polygon& poly, LonLat p) {
  if (poly.outer.empty()) return false;
  if (on_ring_boundary(poly.outer, p)) return true;
  for (const Ring& hole : poly.holes) {
    if (on_ring_boundary(hole, p)) return true;
  }
  bool inside = ring_crossings_odd(poly.outer, p, false);
  for (const Ring& hole : poly.holes) {
    inside = ring_crossings_odd(hole, p, inside);
  }
  return inside;
}

BoundingBox ring_bbox(const Ring& ring) {
  BoundingBox box{std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity(),
                  -std::numeric_limits<double>::infinity(),
                  -std::numeric_limits<double>::infinity()};
  for (const LonLat& p : ring) {
    box.lon_min = std::min(box.lon_min, p.lon);
    box.lat_min = std::min(box.lat_min, p.lat);
    box.lon_max = std::max(box.lon_max, p.lon);
    box.lat_max = std::max(box.lat_max, p.lat);
  }
  return box;
}

BoundingBox polygon_bbox(const Polygon& poly) { return ring_bbox(poly.outer); }

}  // namespace trajrisk
