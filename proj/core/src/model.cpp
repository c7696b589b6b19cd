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

#include "trajrisk/model.hpp"

#include <unordered_set>

#include "trajrisk/error.hpp"

namespace trajrisk {

void validate(const Trajectory& trajectory) {
  if (trajectory.id.empty()) throw Error("trajectory with empty id");
  if (trajectory.records.size() < 2) {
    throw Error("trajectory '" + trajectory.id + "': fewer than 2 records");
  }
  if (trajectory.qi_index == trajectory.sa_index ||
      trajectory.qi_index >= trajectory.records.size() ||
      trajectory.sa_index >= trajectory.records.size()) {
    throw Error("trajectory '" + trajectory.id + "': bad qi/sa indexes");
  }
  for (std::size_t i = 0; i < trajectory.records.size(); ++i) {
    const Record& r = trajectory.records[i];
    if (r.pos.lat < -90.0 || r.pos.lat > 90.0 || r.pos.lon < -180.0 ||
        r.pos.lon > 180.0) {
      throw Error("trajectory '" + trajectory.id +
                  "': coordinates out of range");
    }
    if (i > 0 && trajectory.records[i - 1].t > r.t) {
      throw Error("trajectory '" + trajectory.id + "': records not sorted by time");
    }
  }
}

void validate(const Dataset& dataset) {
  std::unordered_set<std::string_view> ids;
  ids.reserve(dataset.trajectories.size());
  for (const Trajectory& trajectory : dataset.trajectories) {
    validate(trajectory);
    if (!ids.insert(trajectory.id).second) {
      throw Error("duplicate trajectory id '" + trajectory.id + "'");
    }
  }
}

}  // namespace trajrisk
