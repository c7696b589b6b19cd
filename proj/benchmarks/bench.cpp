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
// Microbenchmarks for the hot paths: point location (grid arithmetic and
// polygon tree), full scoring, and perturbation.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "trajrisk/areas.hpp"
#include "trajrisk/metrics.hpp"
#include "trajrisk/model.hpp"
#include "trajrisk/perturb.hpp"

namespace trajrisk {
namespace {

constexpr BoundingBox kBox{-74.05, 40.60, -73.75, 40.90};
constexpr Timestamp kDay = 1231113600;  // 2009-01-05T00:00:00Z

std::vector<std::pair<Timestamp, LonLat>> random_points(std::size_t n,
                                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lon(kBox.lon_min, kBox.lon_max);
  std::uniform_real_distribution<double> lat(kBox.lat_min, kBox.lat_max);
  std::uniform_int_distribution<Timestamp> t(kDay, kDay + 86399);
  std::vector<std::pair<Timestamp, LonLat>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back({t(rng), {lon(rng), lat(rng)}});
  return out;
}

Dataset random_dataset(std::size_t trips, std::uint64_t seed) {
  auto points = random_points(2 * trips, seed);
  Dataset data;
  data.trajectories.reserve(trips);
  for (std::size_t i = 0; i < trips; ++i) {
    Trajectory traj;
    traj.id = "b" + std::to_string(i);
    auto [t0, p0] = points[2 * i];
    auto [t1, p1] = points[2 * i + 1];
    traj.records.push_back({t0, p0, {}});
    traj.records.push_back({t0 + 60 + (t1 % 3000), p1, {}});
    data.trajectories.push_back(std::move(traj));
  }
  return data;
}

// An overlapping collection of square areas, a few hundred vertices total.
AreaSet polygon_areas(int count) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lon(kBox.lon_min, kBox.lon_max - 0.04);
  std::uniform_real_distribution<double> lat(kBox.lat_min, kBox.lat_max - 0.04);
  std::vector<EquivalenceArea> areas;
  for (int i = 0; i < count; ++i) {
    const double x = lon(rng), y = lat(rng), w = 0.01 + 0.03 * (i % 3);
    EquivalenceArea area;
    area.area_id = "a" + std::to_string(i);
    area.parts.push_back(
        {{{x, y}, {x + w, y}, {x + w, y + w}, {x, y + w}}, {}});
    area.windows.push_back({kDay, kDay + 86400});
    areas.push_back(std::move(area));
  }
  return make_polygon_area_set(std::move(areas));
}

void BM_GridLocate(benchmark::State& state) {
  const AreaSet grid = build_grid(kBox, 0.002, 300, {kDay, kDay + 86400}, kDay);
  const auto points = random_points(4096, 11);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [t, p] = points[i++ & 4095];
    benchmark::DoNotOptimize(grid.locate(t, p));
  }
}
BENCHMARK(BM_GridLocate);

void BM_PolygonLocate(benchmark::State& state) {
  const AreaSet areas = polygon_areas(static_cast<int>(state.range(0)));
  const auto points = random_points(4096, 13);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [t, p] = points[i++ & 4095];
    benchmark::DoNotOptimize(areas.locate(t, p));
  }
}
BENCHMARK(BM_PolygonLocate)->Arg(16)->Arg(128)->Arg(1024);

void BM_ScoreGrid(benchmark::State& state) {
  const Dataset data = random_dataset(static_cast<std::size_t>(state.range(0)), 17);
  const AreaSet grid = build_grid(kBox, 0.01, 1800, {kDay, kDay + 86400}, kDay);
  for (auto _ : state) {
    benchmark::DoNotOptimize(score_area_set(data, grid));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ScoreGrid)->Arg(1000)->Arg(10000);

void BM_Perturb(benchmark::State& state) {
  const Dataset data = random_dataset(static_cast<std::size_t>(state.range(0)), 19);
  const NoiseConfig noise{500.0, 600.0, 42, 1};
  std::uint32_t rep = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(perturb(data, noise, rep++));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 2);  // records
}
BENCHMARK(BM_Perturb)->Arg(1000)->Arg(10000);

}  // namespace
}  // namespace trajrisk

BENCHMARK_MAIN();
