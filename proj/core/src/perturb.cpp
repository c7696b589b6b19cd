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

#include "trajrisk/perturb.hpp"

#include <cmath>
#include <numbers>

#include "trajrisk/error.hpp"
#include "trajrisk/geometry.hpp"
#include "trajrisk/rng.hpp"

namespace trajrisk {

std::pair<Dataset, PerturbReport> perturb(const Dataset& dataset,
                                          const NoiseConfig& config,
                                          std::uint32_t repetition) {
  if (config.sigma_space_m < 0.0 || config.sigma_time_s < 0.0) {
    throw Error("noise sigma must be non-negative");
  }
  Dataset out = dataset;
  PerturbReport report;
  const bool space = config.sigma_space_m > 0.0;
  const bool time = config.sigma_time_s > 0.0;
  if (!space && !time) return {std::move(out), report};

  for (Trajectory& traj : out.trajectories) {
    const std::uint64_t h = fnv1a64(traj.id);
    for (std::size_t r = 0; r < traj.records.size(); ++r) {
      Record& rec = traj.records[r];
      const std::uint32_t ri = static_cast<std::uint32_t>(r);
      if (space) {
        const double east =
            keyed_gaussian(config.seed, repetition, h, ri, 0) * config.sigma_space_m;
        const double north =
            keyed_gaussian(config.seed, repetition, h, ri, 1) * config.sigma_space_m;
        // Meters-per-degree of longitude shrinks with cos(latitude); the
        // record's own latitude sets the conversion. Clamped away from the
        // poles where the conversion degenerates.
        const double coslat = std::max(
            std::abs(std::cos(rec.pos.lat * std::numbers::pi / 180.0)), 1e-9);
        rec.pos.lat += north / kMetersPerDegreeLat;
        rec.pos.lon += east / (kMetersPerDegreeLat * coslat);
      }
      if (time) {
        const double dt =
            keyed_gaussian(config.seed, repetition, h, ri, 2) * config.sigma_time_s;
        rec.t += std::llround(dt);
      }
      ++report.records_perturbed;
    }
    if (traj.sa().t < traj.qi().t) ++report.trips_time_inverted;
  }
  return {std::move(out), report};
}

AveragedScoreResult score_averaged(const Dataset& dataset, const AreaSet& areas,
                                   const NoiseConfig& config,
                                   const ScoreOptions& options) {
  if (config.repetitions == 0) throw Error("repetitions must be at least 1");

  struct Accum {
    double k_sum = 0.0;
    double l_sum = 0.0;
    double matched_sum = 0.0;
    double t_sum = 0.0;
    std::uint32_t t_defined = 0;
  };
  std::map<std::string, Accum> acc;
  double unmatched_origin_sum = 0.0;
  double unmatched_dest_sum = 0.0;
  double t_max_sum = 0.0;
  std::uint32_t t_max_defined = 0;

  for (std::uint32_t rep = 0; rep < config.repetitions; ++rep) {
    auto [noisy, report] = perturb(dataset, config, rep);
    (void)report;
    ScoreResult scores = score_area_set(noisy, areas, options);
    for (const auto& [id, a] : scores.areas) {
      Accum& s = acc[id];
      s.k_sum += static_cast<double>(a.k);
      s.l_sum += static_cast<double>(a.l);
      s.matched_sum += static_cast<double>(a.matched_count);
      if (a.t) {
        s.t_sum += *a.t;
        ++s.t_defined;
      }
    }
    unmatched_origin_sum += static_cast<double>(scores.unmatched_origin);
    unmatched_dest_sum += static_cast<double>(scores.unmatched_dest);
    if (scores.t_max) {
      t_max_sum += *scores.t_max;
      ++t_max_defined;
    }
  }

  AveragedScoreResult out;
  out.repetitions = config.repetitions;
  const double inv_reps = 1.0 / static_cast<double>(config.repetitions);
  for (const auto& [id, s] : acc) {
    AveragedAreaScores a;
    a.k = s.k_sum * inv_reps;
    a.l = s.l_sum * inv_reps;
    a.matched_count = s.matched_sum * inv_reps;
    if (s.t_defined > 0) a.t = s.t_sum / static_cast<double>(s.t_defined);
    out.areas.emplace(id, a);
  }
  out.unmatched_origin = unmatched_origin_sum * inv_reps;
  out.unmatched_dest = unmatched_dest_sum * inv_reps;
  if (t_max_defined > 0) {
    out.t_max = t_max_sum / static_cast<double>(t_max_defined);
  }
  return out;
}

}  // namespace trajrisk
