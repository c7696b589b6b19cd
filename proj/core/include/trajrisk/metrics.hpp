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
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "trajrisk/areas.hpp"
#include "trajrisk/model.hpp"

namespace trajrisk {

// Where each trajectory's identifying (origin) and sensitive (destination)
// records landed in an area set. Holds non-owning pointers; the dataset and
// area set must outlive the table.
struct MatchTable {
  const Dataset* dataset = nullptr;
  const AreaSet* areas = nullptr;
  bool self_loops_dropped = false;

  // Indexed by trajectory position in dataset->trajectories.
  std::vector<std::optional<AreaRef>> origin_area;
  std::vector<std::optional<AreaRef>> dest_area;

  // M_A: trajectories (by index, in dataset order) whose origin record lies
  // in each occupied origin area.
  std::unordered_map<AreaRef, std::vector<std::uint32_t>> members;

  std::uint64_t unmatched_origin = 0;  // origin record in no area
  std::uint64_t unmatched_dest = 0;    // destination record in no area

  bool is_self_loop(std::uint32_t i) const {
    return origin_area[i] && dest_area[i] && *origin_area[i] == *dest_area[i];
  }

  // Whether trajectory i counts toward destination (inference) statistics.
  bool contributes_to_inference(std::uint32_t i) const {
    return origin_area[i] && dest_area[i] &&
           !(self_loops_dropped && *origin_area[i] == *dest_area[i]);
  }
};

// drop_self_loops removes trips that start and end in the same area from
// destination statistics (l-diversity, t-closeness) without changing origin
// counts: a same-area trip still hides in the crowd but reveals nothing an
// adversary does not already know.
MatchTable build_match_table(const Dataset& dataset, const AreaSet& areas,
                             bool drop_self_loops = false);

// k_A = |M_A|: how many trajectories start in each area. When the area set
// is enumerable, unoccupied areas are reported with k = 0; otherwise only
// occupied areas appear.
std::map<std::string, std::uint64_t> k_anonymity(const MatchTable& table);

// l_A = |I_A|: distinct destination areas reachable from each area's
// members. Areas whose members all lack a located destination report l = 0.
std::map<std::string, std::uint64_t> l_diversity(const MatchTable& table);

// For each trajectory: the number of OTHER trajectories sharing both its
// origin area and its destination area. Defined only when both ends are
// located; undefined trajectories are absent from the result.
std::map<std::string, std::uint64_t> strict_k(const Dataset& dataset,
                                              const AreaSet& areas);

// Total variation distance between each area's destination distribution
// Q_A and the population destination distribution P, in [0, 1]. Defined
// only for areas with at least one member contributing a destination.
struct TClosenessResult {
  std::map<std::string, double> per_area;
  std::optional<double> t_max;
};
TClosenessResult t_closeness(const MatchTable& table);

// Empirical CDF lower staircase: one point per distinct score value v, at
// (fraction of scores strictly below v, v). Fractions ascend from 0;
// a point (0.2, 3) reads "20% of trajectories score below 3".
struct StairPoint {
  double fraction = 0.0;
  double score = 0.0;

  friend bool operator==(const StairPoint&, const StairPoint&) = default;
};

struct Staircase {
  std::vector<StairPoint> points;
  std::uint64_t sample_count = 0;

  bool empty() const { return points.empty(); }
};

// Throws on an empty score list.
Staircase make_staircase(std::vector<double> scores);

struct AreaScores {
  std::uint64_t k = 0;
  std::uint64_t l = 0;
  std::optional<double> t;
  std::uint64_t matched_count = 0;  // members contributing a destination
};

struct TrajectoryScores {
  std::optional<std::uint64_t> k_origin;
  std::optional<std::uint64_t> l_origin;
  std::optional<std::uint64_t> strict_k;
  std::optional<double> t_origin;
};

struct ScoreOptions {
  bool drop_self_loops = false;
};

struct ScoreResult {
  std::map<std::string, AreaScores> areas;
  std::map<std::string, TrajectoryScores> trajectories;
  // Keys: "k", "l", "strict_k", "t". Present even when empty.
  std::map<std::string, Staircase> staircases;
  std::uint64_t unmatched_origin = 0;
  std::uint64_t unmatched_dest = 0;
  std::optional<double> t_max;
};

// One pass over dataset x areas producing every per-area and per-trajectory
// metric plus the four staircases. Deterministic: output maps are sorted
// and results do not depend on trajectory order.
ScoreResult score_area_set(const Dataset& dataset, const AreaSet& areas,
                           const ScoreOptions& options = {});

}  // namespace trajrisk
