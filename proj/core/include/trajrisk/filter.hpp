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
#include <utility>

#include "trajrisk/model.hpp"

namespace trajrisk {

// Dataset cleaning rules. A trajectory is kept iff its duration
// (SA.t - QI.t) is >= min_duration, both endpoints lie inside bbox
// (edge-inclusive), and, when set, the QI timestamp falls in the half-open
// time_window. The window applies to the QI record only, so trips may end
// outside it.
struct FilterConfig {
  Duration min_duration = 60;
  BoundingBox bbox;
  std::optional<std::pair<Timestamp, Timestamp>> time_window;

  bool valid() const {
    return min_duration >= 0 && bbox.valid() &&
           (!time_window || time_window->first < time_window->second);
  }
};

// Every drop is attributed to the first failing rule, checked in the order
// duration, bbox, window. input_count == kept_count + sum of drops.
struct FilterReport {
  std::uint64_t input_count = 0;
  std::uint64_t kept_count = 0;
  std::uint64_t dropped_duration = 0;
  std::uint64_t dropped_bbox = 0;
  std::uint64_t dropped_window = 0;
};

// Pure filter: surviving trajectories keep their relative order, and
// filtering twice with the same config is a no-op the second time.
std::pair<Dataset, FilterReport> filter_dataset(const Dataset& dataset,
                                                const FilterConfig& config);

}  // namespace trajrisk
