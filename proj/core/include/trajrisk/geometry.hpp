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

#include <vector>

namespace trajrisk {

// WGS84 degrees. Planar lon/lat geometry throughout; at city scale the
// distortion is irrelevant for area membership.
struct LonLat {
  double lon = 0.0;
  double lat = 0.0;

  friend bool operator==(const LonLat&, const LonLat&) = default;
};

inline constexpr double kMetersPerDegreeLat = 111320.0;

struct BoundingBox {
  double lon_min = 0.0;
  double lat_min = 0.0;
  double lon_max = 0.0;
  double lat_max = 0.0;

  // Well-ordered and strictly non-degenerate.
  bool valid() const { return lon_min < lon_max && lat_min < lat_max; }

  // Edge-inclusive containment (used by the cleaning filter).
  bool contains(LonLat p) const {
    return p.lon >= lon_min && p.lon <= lon_max && p.lat >= lat_min &&
           p.lat <= lat_max;
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

// A ring is stored open: the closing edge from back() to front() is implicit.
using Ring = std::vector<LonLat>;

struct Polygon {
  Ring outer;
  std::vector<Ring> holes;
};

// True when p lies on the closed segment [a, b] (exact collinearity test).
bool point_on_segment(LonLat p, LonLat a, LonLat b);

// Even-odd containment with boundary points counting as inside. Holes are
// handled by the even-odd rule itself; a point on a hole edge is inside.
bool polygon_contains(const Polygon& poly, LonLat p);

BoundingBox ring_bbox(const Ring& ring);
BoundingBox polygon_bbox(const Polygon& poly);

}  // namespace trajrisk
