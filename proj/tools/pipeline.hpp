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
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace trajrisk::cli {

// Flag values exactly as given on the command line (or a key=value config
// file); parsing and defaulting happen inside the run_* functions so the
// manifest can echo the fully resolved configuration.
struct RunConfig {
  // Input.
  std::string input_path;
  std::string id_column = "auto";  // "auto" sniffs the header for "id"; "" = none
  std::string pickup_time_column = "pickup_time";
  std::string dropoff_time_column = "dropoff_time";
  std::string pickup_lon_column = "pickup_lon";
  std::string pickup_lat_column = "pickup_lat";
  std::string dropoff_lon_column = "dropoff_lon";
  std::string dropoff_lat_column = "dropoff_lat";
  bool strict = false;

  // Cleaning.
  std::string min_duration = "60s";
  std::string bbox;       // "lon_min,lat_min,lon_max,lat_max"; empty = whole world
  std::string qi_window;  // "HH:MM..HH:MM" (daily, resolved to the data's first day)
                          // or "ISO..ISO"; empty = no window

  // Area source: exactly one of grid / areas file.
  std::optional<double> grid_size;  // degrees
  std::string twindow;              // temporal cell size, e.g. "5m"
  std::string areas_path;           // GeoJSON FeatureCollection
  std::string time_origin;          // ISO; default: midnight of earliest record
  std::string time_range;           // "ISO..ISO"; default: data extent, whole days

  // Scoring.
  bool drop_self_loops = false;

  // Perturbation.
  bool perturb = false;  // score/sweep: also score the anonymized dataset
  double sigma_space = 500.0;
  std::string sigma_time = "10m";
  std::uint64_t seed = 0;
  std::uint32_t repetitions = 3;
  std::uint32_t repetition_index = 0;  // perturb subcommand
  bool emit_perturbed = false;

  // Sweep.
  std::vector<double> spatial_sizes;
  std::vector<std::string> temporal_sizes;
  std::uint32_t jobs = 1;

  // Output. Empty out_dir on `score` streams the JSON report to stdout.
  std::string out_dir;
  std::string output_file;  // ingest / perturb single-file output; "" = stdout
};

// Carries a specific process exit code through the error path.
struct ExitError : std::runtime_error {
  int code;
  ExitError(int exit_code, const std::string& message)
      : std::runtime_error(message), code(exit_code) {}
};

inline constexpr int kExitConfig = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitEmpty = 3;

int run_ingest(const RunConfig& config);
int run_score(const RunConfig& config);
int run_sweep(const RunConfig& config);
int run_perturb(const RunConfig& config);

// Scores the two sides described by key=value config files (same keys as
// the long CLI flags) against the raw side's area set and emits per-metric
// diff GeoJSON. The two sides must agree on the area source.
int run_compare(const RunConfig& base, const std::string& raw_config_path,
                const std::string& anon_config_path);

// Key=value file loader (flag-name keys). Keys for which skip_key returns
// true are left untouched, which is how explicit flags beat config values.
void apply_config_file(RunConfig& config, const std::string& path,
                       const std::function<bool(const std::string&)>& skip_key = {});

}  // namespace trajrisk::cli
