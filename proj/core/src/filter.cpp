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

#include "trajrisk/filter.hpp"

#include "trajrisk/error.hpp"

namespace trajrisk {

std::pair<Dataset, FilterReport> filter_dataset(const Dataset& dataset,
                                                const FilterConfig& config) {
  if (!config.valid()) throw Error("filter: invalid FilterConfig");

  Dataset kept;
  kept.provenance = dataset.provenance;
  FilterReport report;
  report.input_count = dataset.trajectories.size();

  for (const Trajectory& trajectory : dataset.trajectories) {
    if (trajectory.duration() < config.min_duration) {
      ++report.dropped_duration;
      continue;
    }
    if (!config.bbox.contains(trajectory.qi().pos) ||
        !config.bbox.contains(trajectory.sa().pos)) {
      ++report.dropped_bbox;
      continue;
    }
    if (config.time_window) {
      Timestamp t = trajectory.qi().t;
      if (t < config.time_window->first || t >= config.time_window->second) {
        ++report.dropped_window;
        continue;
      }
    }
    kept.trajectories.push_back(trajectory);
  }
  report.kept_count = kept.trajectories.size();
  return {std::move(kept), report};
}

}  // namespace trajrisk
