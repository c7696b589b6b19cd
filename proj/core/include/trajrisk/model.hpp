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

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "trajrisk/geometry.hpp"
#include "trajrisk/time.hpp"

namespace trajrisk {

// One spatio-temporal point of a trajectory. `extras` is an opaque
// passthrough map of attributes the library never interprets.
struct Record {
  Timestamp t = 0;
  LonLat pos;
  std::map<std::string, std::string> extras;
};

// Ordered records with a designated quasi-identifier point (the origin)
// and sensitive-attribute point (the destination). Freshly parsed data has
// records sorted by time; perturbed datasets may carry time-inverted trips,
// which are reported but never repaired.
struct Trajectory {
  std::string id;
  std::vector<Record> records;
  std::size_t qi_index = 0;
  std::size_t sa_index = 1;

  const Record& qi() const { return records[qi_index]; }
  const Record& sa() const { return records[sa_index]; }
  Record& qi() { return records[qi_index]; }
  Record& sa() { return records[sa_index]; }

  Duration duration() const { return sa().t - qi().t; }
};

struct Dataset {
  std::vector<Trajectory> trajectories;
  std::string provenance;

  std::size_t size() const { return trajectories.size(); }
  bool empty() const { return trajectories.empty(); }
};

// Structural validation used at construction boundaries: >= 2 records,
// time-sorted, qi != sa, in-range coordinates, non-empty id. Throws Error.
void validate(const Trajectory& trajectory);

// Per-trajectory validation plus id uniqueness. Throws Error.
void validate(const Dataset& dataset);

}  // namespace trajrisk
