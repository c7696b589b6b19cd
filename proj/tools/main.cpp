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

#include <iostream>

#include <CLI11.hpp>

#include "pipeline.hpp"
#include "trajrisk/error.hpp"
#include "trajrisk/version.hpp"

namespace {

using trajrisk::cli::RunConfig;

void add_input_options(CLI::App& cmd, RunConfig& cfg) {
  cmd.add_option("-i,--input", cfg.input_path, "Trip-record CSV file")
      ->required();
  cmd.add_option("--id-column", cfg.id_column,
                 "Trajectory id column; 'auto' uses an 'id' header column when "
                 "present, '' synthesizes t1, t2, ...")
      ->capture_default_str();
  cmd.add_option("--pickup-time-column", cfg.pickup_time_column, "")
      ->capture_default_str()->group("Schema");
  cmd.add_option("--dropoff-time-column", cfg.dropoff_time_column, "")
      ->capture_default_str()->group("Schema");
  cmd.add_option("--pickup-lon-column", cfg.pickup_lon_column, "")
      ->capture_default_str()->group("Schema");
  cmd.add_option("--pickup-lat-column", cfg.pickup_lat_column, "")
      ->capture_default_str()->group("Schema");
  cmd.add_option("--dropoff-lon-column", cfg.dropoff_lon_column, "")
      ->capture_default_str()->group("Schema");
  cmd.add_option("--dropoff-lat-column", cfg.dropoff_lat_column, "")
      ->capture_default_str()->group("Schema");
  cmd.add_flag("--strict", cfg.strict,
               "Abort on the first malformed row instead of skipping it");
}

// CLI11 never feeds a config file to a subcommand's set_config hook, so the
// file is merged by hand after parsing (see dispatch); flags already given on
// the command line keep their values.
void add_config_option(CLI::App& cmd, std::string& config_path) {
  cmd.add_option("--config", config_path,
                 "key=value config file (same keys as the long flags); "
                 "explicit flags take precedence");
}

void add_filter_options(CLI::App& cmd, RunConfig& cfg) {
  cmd.add_option("--min-duration", cfg.min_duration,
                 "Drop trips shorter than this (e.g. 60s, 1m)")
      ->capture_default_str();
  cmd.add_option("--bbox", cfg.bbox,
                 "Keep trips inside lon_min,lat_min,lon_max,lat_max");
  cmd.add_option("--qi-window", cfg.qi_window,
                 "Keep trips whose pickup falls in HH:MM..HH:MM (daily) or "
                 "ISO..ISO (absolute)");
}

void add_area_options(CLI::App& cmd, RunConfig& cfg) {
  cmd.add_option("--grid", cfg.grid_size,
                 "Grid spatial cell size in degrees (with --twindow)");
  cmd.add_option("--twindow", cfg.twindow,
                 "Grid temporal cell size (e.g. 5m, 10m, 30m)");
  cmd.add_option("--areas", cfg.areas_path,
                 "GeoJSON FeatureCollection of equivalence areas");
  cmd.add_option("--time-origin", cfg.time_origin,
                 "Grid time alignment (ISO); default: midnight of the "
                 "earliest kept record");
  cmd.add_option("--time-range", cfg.time_range,
                 "Analysis window ISO..ISO; default: whole days covering "
                 "the kept records");
}

void add_noise_options(CLI::App& cmd, RunConfig& cfg, bool with_toggle) {
  if (with_toggle) {
    cmd.add_flag("--perturb", cfg.perturb,
                 "Also score a Gaussian-perturbed copy, averaged over "
                 "--repetitions");
    cmd.add_flag("--emit-perturbed", cfg.emit_perturbed,
                 "Write each perturbed repetition as canonical CSV");
  }
  cmd.add_option("--sigma-space", cfg.sigma_space,
                 "Spatial noise std-dev per axis, meters")
      ->capture_default_str();
  cmd.add_option("--sigma-time", cfg.sigma_time, "Temporal noise std-dev")
      ->capture_default_str();
  cmd.add_option("--seed", cfg.seed, "Noise seed")
      ->envname("TRAJRISK_SEED")
      ->capture_default_str();
  cmd.add_option("--repetitions", cfg.repetitions,
                 "Perturbation repetitions to average")
      ->capture_default_str();
}

int dispatch(int argc, char** argv) {
  CLI::App app{"trajrisk - privacy risk scoring for trajectory datasets"};
  app.set_version_flag("--version", std::string("trajrisk ") + trajrisk::kVersion);
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;
  std::string raw_config_path, anon_config_path;

  CLI::App* ingest = app.add_subcommand(
      "ingest", "Parse, clean and emit the canonical trip CSV");
  add_input_options(*ingest, cfg);
  add_filter_options(*ingest, cfg);
  ingest->add_option("-o,--output", cfg.output_file,
                     "Output CSV (stdout when omitted)");
  add_config_option(*ingest, config_path);

  CLI::App* score = app.add_subcommand(
      "score", "Score a dataset against an area set and emit reports");
  add_input_options(*score, cfg);
  add_filter_options(*score, cfg);
  add_area_options(*score, cfg);
  add_noise_options(*score, cfg, /*with_toggle=*/true);
  score->add_flag("--drop-self-loops", cfg.drop_self_loops,
                  "Exclude same-area trips from l/t destination statistics");
  score->add_option("--out", cfg.out_dir,
                    "Output directory (omit to stream report JSON to stdout)");
  add_config_option(*score, config_path);

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Score across a grid-size sweep and emit staircase panels");
  add_input_options(*sweep, cfg);
  add_filter_options(*sweep, cfg);
  add_area_options(*sweep, cfg);
  add_noise_options(*sweep, cfg, /*with_toggle=*/true);
  sweep->add_flag("--drop-self-loops", cfg.drop_self_loops,
                  "Exclude same-area trips from l/t destination statistics");
  sweep
      ->add_option("--spatial-sizes", cfg.spatial_sizes,
                   "Grid spatial sizes to sweep, degrees")
      ->delimiter(',');
  sweep
      ->add_option("--temporal-sizes", cfg.temporal_sizes,
                   "Grid temporal sizes to sweep (e.g. 5m,10m,30m)")
      ->delimiter(',');
  sweep->add_option("--jobs", cfg.jobs, "Parallel sweep workers")
      ->capture_default_str();
  sweep->add_option("--out", cfg.out_dir, "Output directory")->required();
  add_config_option(*sweep, config_path);

  CLI::App* perturb = app.add_subcommand(
      "perturb", "Emit one Gaussian-perturbed repetition as canonical CSV");
  add_input_options(*perturb, cfg);
  add_filter_options(*perturb, cfg);
  add_noise_options(*perturb, cfg, /*with_toggle=*/false);
  perturb->add_option("--rep", cfg.repetition_index,
                      "Repetition index (selects the noise stream)")
      ->capture_default_str();
  perturb->add_option("-o,--output", cfg.output_file,
                      "Output CSV (stdout when omitted)");
  add_config_option(*perturb, config_path);

  CLI::App* compare = app.add_subcommand(
      "compare", "Score raw vs perturbed configs and emit per-area diffs");
  compare->add_option("--raw-config", raw_config_path,
                      "key=value config for the raw side")
      ->required();
  compare->add_option("--anon-config", anon_config_path,
                      "key=value config for the anonymized side")
      ->required();
  compare->add_option("--out", cfg.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return trajrisk::cli::kExitConfig;
  }

  if (!config_path.empty()) {
    for (CLI::App* sub : {ingest, score, sweep, perturb}) {
      if (!*sub) continue;
      trajrisk::cli::apply_config_file(
          cfg, config_path, [sub](const std::string& key) {
            const CLI::Option* opt = sub->get_option_no_throw("--" + key);
            return opt != nullptr && opt->count() > 0;
          });
    }
  }

  if (*ingest) return trajrisk::cli::run_ingest(cfg);
  if (*score) return trajrisk::cli::run_score(cfg);
  if (*sweep) return trajrisk::cli::run_sweep(cfg);
  if (*perturb) return trajrisk::cli::run_perturb(cfg);
  if (*compare) {
    return trajrisk::cli::run_compare(cfg, raw_config_path, anon_config_path);
  }
  return trajrisk::cli::kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const trajrisk::cli::ExitError& e) {
    std::cerr << "trajrisk: error: " << e.what() << "\n";
    return e.code;
  } catch (const trajrisk::GeoJsonError& e) {
    std::cerr << "trajrisk: error: " << e.what() << "\n";
    return trajrisk::cli::kExitConfig;
  } catch (const trajrisk::IoError& e) {
    std::cerr << "trajrisk: error: " << e.what() << "\n";
    return trajrisk::cli::kExitIo;
  } catch (const trajrisk::ParseError& e) {
    std::cerr << "trajrisk: error: " << e.what() << "\n";
    return trajrisk::cli::kExitIo;
  } catch (const trajrisk::SchemaError& e) {
    std::cerr << "trajrisk: error: " << e.what() << "\n";
    return trajrisk::cli::kExitIo;
  } catch (const trajrisk::Error& e) {
    std::cerr << "trajrisk: error: " << e.what() << "\n";
    return trajrisk::cli::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "trajrisk: error: " << e.what() << "\n";
    return trajrisk::cli::kExitConfig;
  }
}
