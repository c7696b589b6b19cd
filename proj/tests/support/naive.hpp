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
//
// Brute-force reference implementations, deliberately written with different
// algorithms than the library: vertical instead of horizontal ray casting,
// linear scans instead of tree queries and floor arithmetic, and quadratic
// counting loops instead of hash-grouped statistics. Slow but obvious.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trajrisk/areas.hpp"
#include "trajrisk/metrics.hpp"
#include "trajrisk/model.hpp"

namespace trajrisk::testing {

// Even-odd containment via a ray cast in the +lat direction (the library
// casts in +lon). Boundary points count as inside.
bool naive_polygon_contains(const Polygon& poly, LonLat p);

// Linear scan over every area. Grids are scanned cell bound by cell bound;
// polygon sets honor declaration order, later areas winning overlaps.
std::optional<AreaRef> naive_locate(const AreaSet& areas, Timestamp t, LonLat s);

struct OracleResult {
  std::map<std::string, AreaScores> areas;
  std::map<std::string, TrajectoryScores> trajectories;
  std::map<std::string, Staircase> staircases;  // "k", "l", "strict_k", "t"
  std::uint64_t unmatched_origin = 0;
  std::uint64_t unmatched_dest = 0;
  std::optional<double> t_max;
};

// Double-loop scoring over dataset x areas using naive_locate for matching.
OracleResult naive_score(const Dataset& dataset, const AreaSet& areas,
                         bool drop_self_loops);

// Staircase by direct counting: one point per distinct value v at
// (|{x : x < v}| / n, v).
Staircase naive_staircase(const std::vector<double>& scores);

// First difference between an engine result and the oracle, or nullopt when
// they agree. Integer scores must match exactly; t values within tol.
std::optional<std::string> diff_results(const ScoreResult& engine,
                                        const OracleResult& oracle, double tol);

}  // namespace trajrisk::testing
