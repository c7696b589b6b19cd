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

#include "trajrisk/metrics.hpp"
#include "trajrisk/model.hpp"

namespace trajrisk {

struct NoiseConfig {
  double sigma_space_m = 500.0;   // per-axis (east/north), meters
  double sigma_time_s = 600.0;    // seconds
  std::uint64_t seed = 0;
  std::uint32_t repetitions = 3;
};

struct PerturbReport {
  std::uint64_t records_perturbed = 0;
  std::uint64_t trips_time_inverted = 0;  // dropoff ended up before pickup
};

// Adds independent zero-mean Gaussian noise to every record: east and north
// offsets drawn in meters and converted to degrees at the record's own
// latitude, plus a time offset rounded to whole seconds. Draws are keyed by
// (seed, repetition, trajectory id, record, axis), so a given trip is moved
// the same way no matter where it sits in the file. A sigma of zero leaves
// that dimension bit-identical. Never reorders records or drops trips, even
// when noise inverts a trip's time order.
std::pair<Dataset, PerturbReport> perturb(const Dataset& dataset,
                                          const NoiseConfig& config,
                                          std::uint32_t repetition);

struct AveragedAreaScores {
  double k = 0.0;
  double l = 0.0;
  std::optional<double> t;  // mean over repetitions where defined
  double matched_count = 0.0;
};

struct AveragedScoreResult {
  std::map<std::string, AveragedAreaScores> areas;
  double unmatched_origin = 0.0;
  double unmatched_dest = 0.0;
  std::optional<double> t_max;
  std::uint32_t repetitions = 0;
};

// Scores config.repetitions independently-perturbed copies of the dataset
// and averages per-area metrics across them. Areas absent from a repetition
// count as zero for k / l / matched; t averages only over repetitions where
// it is defined. With sigma 0 and one repetition this reproduces the
// unperturbed scores exactly.
AveragedScoreResult score_averaged(const Dataset& dataset, const AreaSet& areas,
                                   const NoiseConfig& config,
                                   const ScoreOptions& options = {});

}  // namespace trajrisk
