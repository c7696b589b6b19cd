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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "trajrisk/error.hpp"
#include "trajrisk/rng.hpp"
#include "trajrisk/trip_io.hpp"
#include "support/gen.hpp"

using namespace trajrisk;

namespace {

constexpr Timestamp kT0 = testing::kTestDay;

Dataset sample_dataset(int count, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  return testing::gen_dataset(rng, count, testing::test_bbox(), kT0, 86400);
}

}  // namespace

TEST_CASE("sigma zero is a bit-exact identity") {
  const Dataset dataset = sample_dataset(50);
  const NoiseConfig config{0.0, 0.0, 99, 1};
  auto [noisy, report] = perturb(dataset, config, 0);
  CHECK(report.records_perturbed == 0);
  CHECK(report.trips_time_inverted == 0);
  CHECK(canonical_csv(noisy) == canonical_csv(dataset));
  // Not just printed alike: the stored doubles are identical too.
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    for (std::size_t r = 0; r < 2; ++r) {
      CHECK(noisy.trajectories[i].records[r].pos ==
            dataset.trajectories[i].records[r].pos);
      CHECK(noisy.trajectories[i].records[r].t ==
            dataset.trajectories[i].records[r].t);
    }
  }
}

TEST_CASE("noise is reproducible and keyed by seed and repetition") {
  const Dataset dataset = sample_dataset(40);
  const NoiseConfig config{300.0, 300.0, 7, 3};
  const auto once = perturb(dataset, config, 0);
  const auto again = perturb(dataset, config, 0);
  CHECK(canonical_csv(once.first) == canonical_csv(again.first));
  CHECK(once.second.records_perturbed == 80);

  const auto other_rep = perturb(dataset, config, 1);
  CHECK(canonical_csv(once.first) != canonical_csv(other_rep.first));

  NoiseConfig other_seed = config;
  other_seed.seed = 8;
  const auto different = perturb(dataset, other_seed, 0);
  CHECK(canonical_csv(once.first) != canonical_csv(different.first));
}

TEST_CASE("noise follows the trajectory, not its position in the file") {
  const Dataset dataset = sample_dataset(60);
  Dataset reversed = dataset;
  std::reverse(reversed.trajectories.begin(), reversed.trajectories.end());

  const NoiseConfig config{400.0, 300.0, 21, 1};
  const Dataset a = perturb(dataset, config, 0).first;
  const Dataset b = perturb(reversed, config, 0).first;

  for (const Trajectory& traj : a.trajectories) {
    const auto it = std::find_if(
        b.trajectories.begin(), b.trajectories.end(),
        [&](const Trajectory& other) { return other.id == traj.id; });
    REQUIRE(it != b.trajectories.end());
    for (std::size_t r = 0; r < traj.records.size(); ++r) {
      CHECK(traj.records[r].pos == it->records[r].pos);
      CHECK(traj.records[r].t == it->records[r].t);
    }
  }
}

TEST_CASE("space and time noise are independent dimensions") {
  const Dataset dataset = sample_dataset(30);

  const Dataset space_only = perturb(dataset, {500.0, 0.0, 5, 1}, 0).first;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    CHECK(space_only.trajectories[i].qi().t == dataset.trajectories[i].qi().t);
    CHECK(space_only.trajectories[i].qi().pos != dataset.trajectories[i].qi().pos);
  }

  const Dataset time_only = perturb(dataset, {0.0, 600.0, 5, 1}, 0).first;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    CHECK(time_only.trajectories[i].qi().pos == dataset.trajectories[i].qi().pos);
  }
}

TEST_CASE("perturb keeps ids, extras, order and record count") {
  Dataset dataset = sample_dataset(20);
  dataset.trajectories[2].qi().extras["fare"] = "9.75";
  const Dataset noisy = perturb(dataset, {500.0, 600.0, 11, 1}, 0).first;
  REQUIRE(noisy.size() == dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    CHECK(noisy.trajectories[i].id == dataset.trajectories[i].id);
    CHECK(noisy.trajectories[i].records.size() ==
          dataset.trajectories[i].records.size());
  }
  CHECK(noisy.trajectories[2].qi().extras.at("fare") == "9.75");
}

TEST_CASE("time inversions are counted but never repaired") {
  // One-second trips plus ten minutes of time noise: inversion is a coin flip.
  Dataset dataset;
  for (int i = 0; i < 200; ++i) {
    Trajectory traj;
    traj.id = "s" + std::to_string(i);
    const LonLat p{-73.9, 40.7};
    traj.records.push_back({kT0 + i * 60, p, {}});
    traj.records.push_back({kT0 + i * 60 + 1, p, {}});
    dataset.trajectories.push_back(std::move(traj));
  }
  auto [noisy, report] = perturb(dataset, {0.0, 600.0, 13, 1}, 0);
  CHECK(report.trips_time_inverted > 50);
  std::uint64_t actually_inverted = 0;
  for (const Trajectory& traj : noisy.trajectories) {
    if (traj.sa().t < traj.qi().t) ++actually_inverted;
  }
  CHECK(actually_inverted == report.trips_time_inverted);
}

TEST_CASE("negative sigma is rejected") {
  const Dataset dataset = sample_dataset(5);
  CHECK_THROWS_AS(perturb(dataset, {-1.0, 600.0, 0, 1}, 0), Error);
  CHECK_THROWS_AS(perturb(dataset, {500.0, -1.0, 0, 1}, 0), Error);
}

TEST_CASE("planar displacement magnitude matches the configured sigma") {
  const double sigma = 500.0;
  const Dataset dataset = sample_dataset(5000, 2);
  const Dataset noisy = perturb(dataset, {sigma, 0.0, 17, 1}, 0).first;

  double sum = 0.0;
  std::uint64_t count = 0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    for (std::size_t r = 0; r < 2; ++r) {
      const Record& before = dataset.trajectories[i].records[r];
      const Record& after = noisy.trajectories[i].records[r];
      // Invert the degree conversion at the original latitude.
      const double coslat =
          std::abs(std::cos(before.pos.lat * std::numbers::pi / 180.0));
      const double east =
          (after.pos.lon - before.pos.lon) * kMetersPerDegreeLat * coslat;
      const double north = (after.pos.lat - before.pos.lat) * kMetersPerDegreeLat;
      sum += std::hypot(east, north);
      ++count;
    }
  }
  // Independent per-axis normals make the planar displacement Rayleigh
  // with mean sigma * sqrt(pi / 2).
  const double expected = sigma * std::sqrt(std::numbers::pi / 2.0);
  const double mean = sum / static_cast<double>(count);
  CHECK(mean == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("keyed gaussian stream is deterministic and roughly standard") {
  CHECK(keyed_gaussian(1, 2, 3, 4, 0) == keyed_gaussian(1, 2, 3, 4, 0));
  CHECK(keyed_gaussian(1, 2, 3, 4, 0) != keyed_gaussian(1, 2, 3, 4, 1));
  CHECK(keyed_gaussian(1, 2, 3, 4, 0) != keyed_gaussian(2, 2, 3, 4, 0));
  CHECK(keyed_gaussian(1, 2, 3, 4, 0) != keyed_gaussian(1, 3, 3, 4, 0));

  double sum = 0.0, sum_sq = 0.0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const double z = keyed_gaussian(123, i % 7, fnv1a64("x"), i, i % 3);
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / n;
  const double variance = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(variance == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("averaged scores with sigma zero reproduce the raw scores") {
  const Dataset dataset = sample_dataset(80, 3);
  const AreaSet grid = build_grid(testing::test_bbox(), 0.05, 7200,
                                  {kT0, kT0 + 86400}, kT0);
  const ScoreResult raw = score_area_set(dataset, grid);
  for (std::uint32_t reps : {1u, 3u}) {
    const AveragedScoreResult avg =
        score_averaged(dataset, grid, {0.0, 0.0, 7, reps});
    CHECK(avg.repetitions == reps);
    REQUIRE(avg.areas.size() == raw.areas.size());
    for (const auto& [id, scores] : raw.areas) {
      const AveragedAreaScores& got = avg.areas.at(id);
      CHECK(got.k == doctest::Approx(static_cast<double>(scores.k)).epsilon(1e-12));
      CHECK(got.l == doctest::Approx(static_cast<double>(scores.l)).epsilon(1e-12));
      CHECK(got.matched_count ==
            doctest::Approx(static_cast<double>(scores.matched_count)).epsilon(1e-12));
      CHECK(got.t.has_value() == scores.t.has_value());
      if (scores.t) CHECK(*got.t == doctest::Approx(*scores.t).epsilon(1e-12));
    }
    CHECK(avg.unmatched_origin ==
          doctest::Approx(static_cast<double>(raw.unmatched_origin)));
    CHECK(avg.t_max.has_value() == raw.t_max.has_value());
  }
}

TEST_CASE("averaged scores equal the mean of individually scored repetitions") {
  const Dataset dataset = sample_dataset(100, 4);
  const AreaSet grid = build_grid(testing::test_bbox(), 0.05, 14400,
                                  {kT0, kT0 + 86400}, kT0);
  const NoiseConfig config{500.0, 600.0, 31, 3};

  struct Sum {
    double k = 0, l = 0, matched = 0, t = 0;
    int t_n = 0;
  };
  std::map<std::string, Sum> sums;
  for (std::uint32_t rep = 0; rep < config.repetitions; ++rep) {
    const ScoreResult scores =
        score_area_set(perturb(dataset, config, rep).first, grid);
    for (const auto& [id, a] : scores.areas) {
      Sum& s = sums[id];
      s.k += static_cast<double>(a.k);
      s.l += static_cast<double>(a.l);
      s.matched += static_cast<double>(a.matched_count);
      if (a.t) {
        s.t += *a.t;
        ++s.t_n;
      }
    }
  }

  const AveragedScoreResult avg = score_averaged(dataset, grid, config);
  REQUIRE(avg.areas.size() == sums.size());
  for (const auto& [id, s] : sums) {
    const AveragedAreaScores& got = avg.areas.at(id);
    CHECK(got.k == doctest::Approx(s.k / 3.0).epsilon(1e-12));
    CHECK(got.l == doctest::Approx(s.l / 3.0).epsilon(1e-12));
    CHECK(got.matched_count == doctest::Approx(s.matched / 3.0).epsilon(1e-12));
    CHECK(got.t.has_value() == (s.t_n > 0));
    if (got.t) CHECK(*got.t == doctest::Approx(s.t / s.t_n).epsilon(1e-12));
  }
}

TEST_CASE("zero repetitions are rejected") {
  const Dataset dataset = sample_dataset(5);
  const AreaSet grid = build_grid(testing::test_bbox(), 0.1, 86400,
                                  {kT0, kT0 + 86400}, kT0);
  CHECK_THROWS_AS(score_averaged(dataset, grid, {500.0, 600.0, 1, 0}), Error);
}
