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

#include "pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>
#include <openssl/evp.h>

#include "trajrisk/areas.hpp"
#include "trajrisk/csv.hpp"
#include "trajrisk/error.hpp"
#include "trajrisk/filter.hpp"
#include "trajrisk/metrics.hpp"
#include "trajrisk/perturb.hpp"
#include "trajrisk/report.hpp"
#include "trajrisk/time.hpp"
#include "trajrisk/trip_io.hpp"
#include "trajrisk/version.hpp"

namespace trajrisk::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

// --- small parsing helpers -------------------------------------------------

[[noreturn]] void config_error(const std::string& message) {
  throw ExitError(kExitConfig, message);
}

Timestamp need_timestamp(const std::string& text, const std::string& what) {
  auto ts = parse_timestamp(text);
  if (!ts) config_error(what + ": unparseable timestamp '" + text + "'");
  return *ts;
}

Duration need_duration(const std::string& text, const std::string& what) {
  auto d = parse_duration(text);
  if (!d) config_error(what + ": unparseable duration '" + text + "'");
  return *d;
}

std::vector<double> parse_number_list(const std::string& text,
                                      const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      config_error(what + ": bad number '" + item + "'");
    }
  }
  return out;
}

BoundingBox parse_bbox(const std::string& text) {
  std::vector<double> v = parse_number_list(text, "--bbox");
  if (v.size() != 4) {
    config_error("--bbox expects lon_min,lat_min,lon_max,lat_max");
  }
  BoundingBox bbox{v[0], v[1], v[2], v[3]};
  if (!bbox.valid()) config_error("--bbox is not well-ordered");
  return bbox;
}

std::pair<std::string, std::string> split_range(const std::string& text,
                                                const std::string& what) {
  const std::size_t sep = text.find("..");
  if (sep == std::string::npos) {
    config_error(what + ": expected 'START..END', got '" + text + "'");
  }
  return {text.substr(0, sep), text.substr(sep + 2)};
}

// "HH:MM" -> seconds after midnight.
std::optional<Duration> parse_clock(const std::string& text) {
  unsigned h = 0, m = 0;
  if (std::sscanf(text.c_str(), "%2u:%2u", &h, &m) != 2) return std::nullopt;
  if (h > 23 || m > 59 || text.size() != 5 || text[2] != ':') return std::nullopt;
  return static_cast<Duration>(h) * 3600 + static_cast<Duration>(m) * 60;
}

// --- hashing ----------------------------------------------------------------

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    if (!in) break;
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

// --- output collection --------------------------------------------------------

struct Emitter {
  fs::path root;
  json outputs = json::object();

  void write(const std::string& rel, std::string_view content) {
    const fs::path full = root / rel;
    std::error_code ec;
    fs::create_directories(full.parent_path(), ec);
    write_text_file(full.string(), content);
    outputs[rel] = {{"sha256", sha256_hex(content)}, {"bytes", content.size()}};
  }

  void merge(const std::string& prefix, const json& sub_outputs) {
    for (auto it = sub_outputs.begin(); it != sub_outputs.end(); ++it) {
      outputs[prefix + it.key()] = it.value();
    }
  }
};

// --- load + filter ------------------------------------------------------------

struct LoadedData {
  Dataset dataset;  // after filtering
  TripParseReport parse_report;
  FilterReport filter_report;
  FilterConfig filter;
  std::string input_sha256;
  // Extent of the kept records, for grid defaults.
  bool has_records = false;
  BoundingBox extent;
  Timestamp t_min = 0;
  Timestamp t_max = 0;
  json schema_echo;
  json filter_echo;
};

CsvSchema resolve_schema(const RunConfig& config) {
  CsvSchema schema;
  schema.pickup_time = config.pickup_time_column;
  schema.dropoff_time = config.dropoff_time_column;
  schema.pickup_lon = config.pickup_lon_column;
  schema.pickup_lat = config.pickup_lat_column;
  schema.dropoff_lon = config.dropoff_lon_column;
  schema.dropoff_lat = config.dropoff_lat_column;
  if (config.id_column == "auto") {
    // Use an "id" column when the header has one, else synthesize ids.
    std::ifstream in(config.input_path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + config.input_path + "'");
    CsvReader reader(in);
    if (auto header = reader.next_row()) {
      if (std::find(header->begin(), header->end(), "id") != header->end()) {
        schema.id = "id";
      }
    }
  } else if (!config.id_column.empty()) {
    schema.id = config.id_column;
  }
  return schema;
}

LoadedData load_and_filter(const RunConfig& config) {
  if (config.input_path.empty()) config_error("--input is required");

  LoadedData out;
  const CsvSchema schema = resolve_schema(config);
  {
    std::ifstream in(config.input_path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + config.input_path + "'");
    TripParseOptions opts;
    opts.strict = config.strict;
    auto [dataset, report] = parse_dataset(in, schema, opts);
    out.dataset = std::move(dataset);
    out.parse_report = report;
  }
  out.dataset.provenance = config.input_path;
  out.input_sha256 = sha256_file(config.input_path);

  FilterConfig filter;
  filter.min_duration = need_duration(config.min_duration, "--min-duration");
  filter.bbox = config.bbox.empty() ? BoundingBox{-180.0, -90.0, 180.0, 90.0}
                                    : parse_bbox(config.bbox);
  if (!config.qi_window.empty()) {
    auto [lo, hi] = split_range(config.qi_window, "--qi-window");
    const auto clock_lo = parse_clock(lo);
    const auto clock_hi = parse_clock(hi);
    if (clock_lo && clock_hi) {
      if (*clock_lo >= *clock_hi) {
        config_error("--qi-window clock window must not wrap midnight");
      }
      // Daily clock windows resolve against the first day seen in the data.
      std::optional<Timestamp> first;
      for (const Trajectory& traj : out.dataset.trajectories) {
        if (!first || traj.qi().t < *first) first = traj.qi().t;
      }
      if (first) {
        const Timestamp day = floor_to_day(*first);
        filter.time_window = {day + *clock_lo, day + *clock_hi};
      }
    } else {
      filter.time_window = {need_timestamp(lo, "--qi-window"),
                            need_timestamp(hi, "--qi-window")};
      if (filter.time_window->first >= filter.time_window->second) {
        config_error("--qi-window start must precede end");
      }
    }
  }
  out.filter = filter;

  auto [kept, freport] = filter_dataset(out.dataset, filter);
  out.dataset = std::move(kept);
  out.filter_report = freport;

  for (const Trajectory& traj : out.dataset.trajectories) {
    for (const Record& rec : traj.records) {
      if (!out.has_records) {
        out.extent = {rec.pos.lon, rec.pos.lat, rec.pos.lon, rec.pos.lat};
        out.t_min = out.t_max = rec.t;
        out.has_records = true;
      } else {
        out.extent.lon_min = std::min(out.extent.lon_min, rec.pos.lon);
        out.extent.lat_min = std::min(out.extent.lat_min, rec.pos.lat);
        out.extent.lon_max = std::max(out.extent.lon_max, rec.pos.lon);
        out.extent.lat_max = std::max(out.extent.lat_max, rec.pos.lat);
        out.t_min = std::min(out.t_min, rec.t);
        out.t_max = std::max(out.t_max, rec.t);
      }
    }
  }

  out.schema_echo = {
      {"id", schema.id ? json(*schema.id) : json(nullptr)},
      {"pickup_time", schema.pickup_time},
      {"dropoff_time", schema.dropoff_time},
      {"pickup_lon", schema.pickup_lon},
      {"pickup_lat", schema.pickup_lat},
      {"dropoff_lon", schema.dropoff_lon},
      {"dropoff_lat", schema.dropoff_lat},
  };
  out.filter_echo = {
      {"min_duration_s", filter.min_duration},
      {"bbox", {filter.bbox.lon_min, filter.bbox.lat_min, filter.bbox.lon_max,
                filter.bbox.lat_max}},
      {"qi_window", filter.time_window
                        ? json::array({format_timestamp(filter.time_window->first),
                                       format_timestamp(filter.time_window->second)})
                        : json(nullptr)},
  };
  return out;
}

void log_load(const RunConfig& config, const LoadedData& data) {
  std::cerr << "trajrisk: " << config.input_path << ": "
            << data.parse_report.rows_read << " rows, "
            << data.parse_report.parse_errors << " parse errors, "
            << data.filter_report.input_count << " trips -> "
            << data.filter_report.kept_count << " kept ("
            << data.filter_report.dropped_duration << " short, "
            << data.filter_report.dropped_bbox << " out of bbox, "
            << data.filter_report.dropped_window << " outside window)\n";
}

// --- area construction ----------------------------------------------------------

struct BuiltAreas {
  AreaSet set;
  json echo;
};

TimeInterval default_time_range(const LoadedData& data) {
  // Whole-day extent of the kept records.
  const Timestamp lo = floor_to_day(data.t_min);
  const Timestamp hi = floor_to_day(data.t_max) + 86400;
  return {lo, hi};
}

BuiltAreas build_areas(const RunConfig& config, const LoadedData& data,
                       std::optional<double> grid_override,
                       const std::string& twindow_override) {
  const std::optional<double> grid =
      grid_override ? grid_override : config.grid_size;
  const std::string twindow =
      twindow_override.empty() ? config.twindow : twindow_override;

  if (grid && !config.areas_path.empty()) {
    config_error("--grid and --areas are mutually exclusive");
  }
  if (!grid && config.areas_path.empty()) {
    config_error("an area source is required: --grid SIZE or --areas FILE");
  }

  TimeInterval range;
  if (!config.time_range.empty()) {
    auto [lo, hi] = split_range(config.time_range, "--time-range");
    range = {need_timestamp(lo, "--time-range"), need_timestamp(hi, "--time-range")};
    if (!range.valid()) config_error("--time-range start must precede end");
  } else if (data.has_records) {
    range = default_time_range(data);
  } else {
    config_error("--time-range is required when the dataset is empty");
  }

  BuiltAreas out;
  if (grid) {
    if (twindow.empty()) {
      config_error("--grid needs --twindow (temporal cell size)");
    }
    const Duration tsize = need_duration(twindow, "--twindow");
    BoundingBox bbox;
    if (!config.bbox.empty()) {
      bbox = parse_bbox(config.bbox);
    } else if (data.has_records) {
      // Data extent, with the max edges nudged so extreme points stay
      // inside the half-open cells.
      bbox = data.extent;
      bbox.lon_max += 1e-9;
      bbox.lat_max += 1e-9;
    } else {
      config_error("--bbox is required when the dataset is empty");
    }
    const Timestamp origin = config.time_origin.empty()
                                 ? floor_to_day(data.has_records ? data.t_min
                                                                 : range.start)
                                 : need_timestamp(config.time_origin, "--time-origin");
    try {
      out.set = build_grid(bbox, *grid, tsize, range, origin);
    } catch (const Error& e) {
      config_error(e.what());
    }
    const double mid_lat =
        (bbox.lat_min + bbox.lat_max) / 2.0 * std::numbers::pi / 180.0;
    std::cerr << "trajrisk: grid " << format_score(*grid) << " deg ~ "
              << std::llround(*grid * kMetersPerDegreeLat * std::cos(mid_lat))
              << " m (lon) x " << std::llround(*grid * kMetersPerDegreeLat)
              << " m (lat) at mid-latitude, " << format_duration(tsize)
              << " slots, " << out.set.area_count() << " cells\n";
    out.echo = {{"kind", "grid"},
                {"spatial_size_deg", *grid},
                {"temporal_size_s", tsize},
                {"bbox", {bbox.lon_min, bbox.lat_min, bbox.lon_max, bbox.lat_max}},
                {"time_range", {format_timestamp(range.start),
                                format_timestamp(range.end)}},
                {"time_origin", format_timestamp(origin)}};
  } else {
    const std::vector<TimeInterval> defaults = {range};
    try {
      out.set = load_polygon_areas_file(config.areas_path, defaults);
    } catch (const IoError&) {
      throw;
    } catch (const Error& e) {
      config_error(e.what());
    }
    std::cerr << "trajrisk: " << config.areas_path << ": "
              << out.set.area_count() << " polygon areas\n";
    out.echo = {{"kind", "polygon"},
                {"path", config.areas_path},
                {"default_time_windows",
                 json::array({json::array({format_timestamp(range.start),
                                           format_timestamp(range.end)})})}};
  }
  return out;
}

// --- scoring (raw + optional repetition-averaged anonymized) ---------------------

struct SideResult {
  ScoreResult raw;
  std::optional<AveragedScoreResult> averaged;
  std::map<std::string, Staircase> anon_staircases;
  std::vector<Dataset> perturbed;  // kept only when emit_perturbed
};

NoiseConfig resolve_noise(const RunConfig& config) {
  NoiseConfig noise;
  noise.sigma_space_m = config.sigma_space;
  noise.sigma_time_s =
      static_cast<double>(need_duration(config.sigma_time, "--sigma-time"));
  noise.seed = config.seed;
  noise.repetitions = config.repetitions;
  if (noise.sigma_space_m < 0) config_error("--sigma-space must be >= 0");
  if (noise.repetitions == 0) config_error("--repetitions must be >= 1");
  return noise;
}

json noise_echo(const NoiseConfig& noise) {
  return {{"sigma_space_m", noise.sigma_space_m},
          {"sigma_time_s", noise.sigma_time_s},
          {"seed", noise.seed},
          {"repetitions", noise.repetitions}};
}

SideResult compute_scores(const Dataset& dataset, const AreaSet& areas,
                          const ScoreOptions& options,
                          const std::optional<NoiseConfig>& noise,
                          bool keep_perturbed) {
  SideResult out;
  out.raw = score_area_set(dataset, areas, options);
  if (!noise) return out;

  struct AreaAccum {
    double k = 0, l = 0, matched = 0, t = 0;
    std::uint32_t t_defined = 0;
  };
  struct TrajAccum {
    double k = 0, l = 0, strict = 0, t = 0;
    std::uint32_t k_n = 0, l_n = 0, strict_n = 0, t_n = 0;
  };
  std::map<std::string, AreaAccum> area_acc;
  std::map<std::string, TrajAccum> traj_acc;
  double unmatched_origin = 0, unmatched_dest = 0, t_max_sum = 0;
  std::uint32_t t_max_n = 0;

  for (std::uint32_t rep = 0; rep < noise->repetitions; ++rep) {
    auto [noisy, preport] = perturb(dataset, *noise, rep);
    ScoreResult scores = score_area_set(noisy, areas, options);
    if (keep_perturbed) {
      out.perturbed.push_back(std::move(noisy));
    }
    if (preport.trips_time_inverted > 0) {
      std::cerr << "trajrisk: repetition " << rep << ": "
                << preport.trips_time_inverted << " trips time-inverted\n";
    }
    for (const auto& [id, a] : scores.areas) {
      AreaAccum& acc = area_acc[id];
      acc.k += static_cast<double>(a.k);
      acc.l += static_cast<double>(a.l);
      acc.matched += static_cast<double>(a.matched_count);
      if (a.t) {
        acc.t += *a.t;
        ++acc.t_defined;
      }
    }
    for (const auto& [id, ts] : scores.trajectories) {
      TrajAccum& acc = traj_acc[id];
      if (ts.k_origin) { acc.k += static_cast<double>(*ts.k_origin); ++acc.k_n; }
      if (ts.l_origin) { acc.l += static_cast<double>(*ts.l_origin); ++acc.l_n; }
      if (ts.strict_k) { acc.strict += static_cast<double>(*ts.strict_k); ++acc.strict_n; }
      if (ts.t_origin) { acc.t += *ts.t_origin; ++acc.t_n; }
    }
    unmatched_origin += static_cast<double>(scores.unmatched_origin);
    unmatched_dest += static_cast<double>(scores.unmatched_dest);
    if (scores.t_max) {
      t_max_sum += *scores.t_max;
      ++t_max_n;
    }
  }

  AveragedScoreResult avg;
  avg.repetitions = noise->repetitions;
  const double inv = 1.0 / static_cast<double>(noise->repetitions);
  for (const auto& [id, acc] : area_acc) {
    AveragedAreaScores a;
    a.k = acc.k * inv;
    a.l = acc.l * inv;
    a.matched_count = acc.matched * inv;
    if (acc.t_defined > 0) a.t = acc.t / static_cast<double>(acc.t_defined);
    avg.areas.emplace(id, a);
  }
  avg.unmatched_origin = unmatched_origin * inv;
  avg.unmatched_dest = unmatched_dest * inv;
  if (t_max_n > 0) avg.t_max = t_max_sum / static_cast<double>(t_max_n);
  out.averaged = std::move(avg);

  // Per-trajectory scores averaged over the repetitions where they are
  // defined, then folded into staircases comparable with the raw ones.
  std::vector<double> k_scores, l_scores, strict_scores, t_scores;
  for (const auto& [id, acc] : traj_acc) {
    (void)id;
    if (acc.k_n) k_scores.push_back(acc.k / acc.k_n);
    if (acc.l_n) l_scores.push_back(acc.l / acc.l_n);
    if (acc.strict_n) strict_scores.push_back(acc.strict / acc.strict_n);
    if (acc.t_n) t_scores.push_back(acc.t / acc.t_n);
  }
  auto put = [&](const char* name, std::vector<double>& scores) {
    out.anon_staircases.emplace(
        name, scores.empty() ? Staircase{} : make_staircase(std::move(scores)));
  };
  put("k", k_scores);
  put("l", l_scores);
  put("strict_k", strict_scores);
  put("t", t_scores);
  return out;
}

// --- emission --------------------------------------------------------------------

const char* kStairMetrics[] = {"k", "l", "strict_k", "t"};

void emit_score_outputs(Emitter& emit, const SideResult& side,
                        const AreaSet& areas, const json& config_echo) {
  emit.write("report.json", report_json(side.raw, config_echo.dump()));
  for (Metric m : {Metric::k, Metric::l, Metric::t}) {
    emit.write(std::string("areas_") + metric_name(m) + ".geojson",
               area_scores_geojson(side.raw, areas, m));
  }
  for (const char* name : kStairMetrics) {
    const Staircase& sc = side.raw.staircases.at(name);
    if (sc.empty()) continue;
    emit.write(std::string("staircase_") + name + ".csv", staircase_csv(sc));
    std::vector<StaircaseSeries> series{{"raw", sc}};
    if (side.averaged) {
      const Staircase& anon = side.anon_staircases.at(name);
      if (!anon.empty()) series.push_back({"anonymized", anon});
    }
    emit.write(std::string("staircase_") + name + ".svg",
               staircase_svg(std::string("per-trajectory ") + name, series));
  }
  if (side.averaged) {
    emit.write("report_averaged.json",
               averaged_report_json(*side.averaged, config_echo.dump()));
    for (Metric m : {Metric::k, Metric::l, Metric::t}) {
      emit.write(std::string("diff_") + metric_name(m) + ".geojson",
                 diff_geojson(side.raw, *side.averaged, areas, m));
    }
    for (const char* name : kStairMetrics) {
      const Staircase& anon = side.anon_staircases.at(name);
      if (!anon.empty()) {
        emit.write(std::string("staircase_") + name + "_anonymized.csv",
                   staircase_csv(anon));
      }
    }
  }
  for (std::size_t i = 0; i < side.perturbed.size(); ++i) {
    emit.write("perturbed_rep" + std::to_string(i) + ".csv",
               canonical_csv(side.perturbed[i]));
  }
}

json make_manifest(const std::string& command, const json& config_echo,
                   const RunConfig& config, const LoadedData& data,
                   const json& outputs) {
  return {{"tool", {{"name", "trajrisk"}, {"version", kVersion}}},
          {"command", command},
          {"config", config_echo},
          {"input",
           {{"path", config.input_path},
            {"sha256", data.input_sha256},
            {"rows_read", data.parse_report.rows_read},
            {"parse_errors", data.parse_report.parse_errors},
            {"filter",
             {{"input_count", data.filter_report.input_count},
              {"kept_count", data.filter_report.kept_count},
              {"dropped_duration", data.filter_report.dropped_duration},
              {"dropped_bbox", data.filter_report.dropped_bbox},
              {"dropped_window", data.filter_report.dropped_window}}}}},
          {"outputs", outputs}};
}

json base_config_echo(const std::string& command, const RunConfig& config,
                      const LoadedData& data) {
  return {{"command", command},
          {"input", config.input_path},
          {"schema", data.schema_echo},
          {"strict", config.strict},
          {"filter", data.filter_echo},
          {"drop_self_loops", config.drop_self_loops}};
}

void require_out_dir(const RunConfig& config) {
  if (config.out_dir.empty()) config_error("--out DIR is required");
}

void ensure_not_empty(const LoadedData& data) {
  if (data.dataset.trajectories.empty()) {
    throw ExitError(kExitEmpty, "no trajectories left after filtering");
  }
}

void write_single_output(const RunConfig& config, const std::string& content) {
  if (config.output_file.empty()) {
    std::cout << content;
    if (!std::cout) throw IoError("failed writing to stdout");
  } else {
    write_text_file(config.output_file, content);
  }
}

}  // namespace

void apply_config_file(RunConfig& config, const std::string& path,
                       const std::function<bool(const std::string&)>& skip_key) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      config_error(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (skip_key && skip_key(key)) continue;
    auto as_bool = [&]() {
      if (value == "true" || value == "1" || value == "yes") return true;
      if (value == "false" || value == "0" || value == "no") return false;
      config_error(path + ": key '" + key + "' expects a boolean");
      return false;
    };
    auto as_u64 = [&]() {
      std::uint64_t v = 0;
      auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc() || p != value.data() + value.size()) {
        config_error(path + ": key '" + key + "' expects an integer");
      }
      return v;
    };
    auto as_double = [&]() {
      try {
        std::size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
      } catch (const std::exception&) {
        config_error(path + ": key '" + key + "' expects a number");
        return 0.0;
      }
    };

    if (key == "input") config.input_path = value;
    else if (key == "id-column") config.id_column = value;
    else if (key == "pickup-time-column") config.pickup_time_column = value;
    else if (key == "dropoff-time-column") config.dropoff_time_column = value;
    else if (key == "pickup-lon-column") config.pickup_lon_column = value;
    else if (key == "pickup-lat-column") config.pickup_lat_column = value;
    else if (key == "dropoff-lon-column") config.dropoff_lon_column = value;
    else if (key == "dropoff-lat-column") config.dropoff_lat_column = value;
    else if (key == "strict") config.strict = as_bool();
    else if (key == "min-duration") config.min_duration = value;
    else if (key == "bbox") config.bbox = value;
    else if (key == "qi-window") config.qi_window = value;
    else if (key == "grid") config.grid_size = as_double();
    else if (key == "twindow") config.twindow = value;
    else if (key == "areas") config.areas_path = value;
    else if (key == "time-origin") config.time_origin = value;
    else if (key == "time-range") config.time_range = value;
    else if (key == "drop-self-loops") config.drop_self_loops = as_bool();
    else if (key == "perturb") config.perturb = as_bool();
    else if (key == "sigma-space") config.sigma_space = as_double();
    else if (key == "sigma-time") config.sigma_time = value;
    else if (key == "seed") config.seed = as_u64();
    else if (key == "repetitions") config.repetitions = static_cast<std::uint32_t>(as_u64());
    else config_error(path + ": unknown key '" + key + "'");
  }
}

int run_ingest(const RunConfig& config) {
  LoadedData data = load_and_filter(config);
  log_load(config, data);
  write_single_output(config, canonical_csv(data.dataset));
  return 0;
}

int run_perturb(const RunConfig& config) {
  LoadedData data = load_and_filter(config);
  log_load(config, data);
  ensure_not_empty(data);
  NoiseConfig noise = resolve_noise(config);
  auto [noisy, report] = perturb(data.dataset, noise, config.repetition_index);
  std::cerr << "trajrisk: repetition " << config.repetition_index << ": "
            << report.records_perturbed << " records perturbed, "
            << report.trips_time_inverted << " trips time-inverted\n";
  write_single_output(config, canonical_csv(noisy));
  return 0;
}

int run_score(const RunConfig& config) {
  LoadedData data = load_and_filter(config);
  log_load(config, data);
  ensure_not_empty(data);
  BuiltAreas areas = build_areas(config, data, std::nullopt, "");

  ScoreOptions options;
  options.drop_self_loops = config.drop_self_loops;
  std::optional<NoiseConfig> noise;
  if (config.perturb) noise = resolve_noise(config);
  if ((config.perturb || config.emit_perturbed) && config.out_dir.empty()) {
    config_error("--perturb output needs --out DIR");
  }

  json echo = base_config_echo("score", config, data);
  echo["areas"] = areas.echo;
  echo["noise"] = noise ? noise_echo(*noise) : json(nullptr);

  SideResult side = compute_scores(data.dataset, areas.set, options, noise,
                                   config.emit_perturbed);

  if (config.out_dir.empty()) {
    // Single-file streaming mode: the JSON report on stdout, nothing on disk.
    std::cout << report_json(side.raw, echo.dump());
    if (!std::cout) throw IoError("failed writing to stdout");
    return 0;
  }

  Emitter emit;
  emit.root = config.out_dir;
  emit_score_outputs(emit, side, areas.set, echo);
  json manifest = make_manifest("score", echo, config, data, emit.outputs);
  const std::string manifest_text = manifest.dump(2) + "\n";
  write_text_file((fs::path(config.out_dir) / "manifest.json").string(),
                  manifest_text);
  std::cerr << "trajrisk: wrote " << emit.outputs.size() + 1 << " files to "
            << config.out_dir << "\n";
  return 0;
}

namespace {

std::string sweep_dir_name(double spatial, Duration temporal) {
  std::string t = temporal % 60 == 0 ? std::to_string(temporal / 60)
                                     : std::to_string(temporal) + "s";
  return "s" + format_score(spatial) + "_t" + t;
}

struct CellOutcome {
  bool failed = false;
  int exit_code = 0;
  std::string message;
  json outputs = json::object();
  std::map<std::string, Staircase> raw_stairs;
  std::map<std::string, Staircase> anon_stairs;
  std::string dir_name;
};

}  // namespace

int run_sweep(const RunConfig& config) {
  require_out_dir(config);
  if (config.spatial_sizes.empty() || config.temporal_sizes.empty()) {
    config_error("sweep needs --spatial-sizes and --temporal-sizes");
  }
  if (!config.areas_path.empty()) {
    config_error("sweep works on grids; --areas cannot be swept");
  }

  LoadedData data = load_and_filter(config);
  log_load(config, data);
  ensure_not_empty(data);

  std::vector<Duration> temporal;
  for (const std::string& t : config.temporal_sizes) {
    temporal.push_back(need_duration(t, "--temporal-sizes"));
  }

  ScoreOptions options;
  options.drop_self_loops = config.drop_self_loops;
  std::optional<NoiseConfig> noise;
  if (config.perturb) noise = resolve_noise(config);

  const std::size_t n_cells = config.spatial_sizes.size() * temporal.size();
  std::vector<CellOutcome> outcomes(n_cells);

  // Cells are independent; write into disjoint subdirectories in parallel.
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n_cells) return;
      CellOutcome& cell = outcomes[i];
      const double spatial = config.spatial_sizes[i / temporal.size()];
      const Duration tsize = temporal[i % temporal.size()];
      cell.dir_name = sweep_dir_name(spatial, tsize);
      try {
        BuiltAreas areas =
            build_areas(config, data, spatial, format_duration(tsize));
        json echo = base_config_echo("score", config, data);
        echo["areas"] = areas.echo;
        echo["noise"] = noise ? noise_echo(*noise) : json(nullptr);

        SideResult side = compute_scores(data.dataset, areas.set, options,
                                         noise, config.emit_perturbed);
        Emitter emit;
        emit.root = fs::path(config.out_dir) / cell.dir_name;
        emit_score_outputs(emit, side, areas.set, echo);
        json manifest = make_manifest("score", echo, config, data, emit.outputs);
        const std::string manifest_text = manifest.dump(2) + "\n";
        write_text_file((emit.root / "manifest.json").string(), manifest_text);
        cell.outputs = std::move(emit.outputs);
        cell.outputs["manifest.json"] = {{"sha256", sha256_hex(manifest_text)},
                                         {"bytes", manifest_text.size()}};
        cell.raw_stairs = side.raw.staircases;
        cell.anon_stairs = std::move(side.anon_staircases);
      } catch (const ExitError& e) {
        cell.failed = true;
        cell.exit_code = e.code;
        cell.message = e.what();
      } catch (const IoError& e) {
        cell.failed = true;
        cell.exit_code = kExitIo;
        cell.message = e.what();
      } catch (const std::exception& e) {
        cell.failed = true;
        cell.exit_code = kExitConfig;
        cell.message = e.what();
      }
    }
  };

  const std::uint32_t jobs =
      std::max<std::uint32_t>(1, std::min<std::uint32_t>(
                                     config.jobs, static_cast<std::uint32_t>(n_cells)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::uint32_t j = 0; j < jobs; ++j) threads.emplace_back(worker);
    for (std::thread& th : threads) th.join();
  }

  for (const CellOutcome& cell : outcomes) {
    if (cell.failed) {
      throw ExitError(cell.exit_code, cell.dir_name + ": " + cell.message);
    }
  }

  // Combined per-metric staircase panels across all configurations.
  Emitter emit;
  emit.root = config.out_dir;
  for (const CellOutcome& cell : outcomes) {
    emit.merge(cell.dir_name + "/", cell.outputs);
  }

  std::vector<std::string> row_labels, col_labels;
  for (double s : config.spatial_sizes) {
    row_labels.push_back("spatial " + format_score(s) + " deg");
  }
  for (Duration t : temporal) {
    col_labels.push_back("temporal " + format_duration(t));
  }
  for (const char* name : kStairMetrics) {
    std::vector<std::vector<StaircaseSeries>> cells;
    bool any = false;
    for (const CellOutcome& cell : outcomes) {
      std::vector<StaircaseSeries> series;
      const Staircase& raw = cell.raw_stairs.at(name);
      if (!raw.empty()) series.push_back({"raw", raw});
      if (noise) {
        auto it = cell.anon_stairs.find(name);
        if (it != cell.anon_stairs.end() && !it->second.empty()) {
          series.push_back({"anonymized", it->second});
        }
      }
      any = any || !series.empty();
      cells.push_back(std::move(series));
    }
    if (!any) continue;
    emit.write(std::string("sweep_") + name + ".svg",
               sweep_panel_svg(std::string("per-trajectory ") + name +
                                   " across grid configurations",
                               row_labels, col_labels, cells));
  }

  json echo = base_config_echo("sweep", config, data);
  json spatial_json = json::array();
  for (double s : config.spatial_sizes) spatial_json.push_back(s);
  json temporal_json = json::array();
  for (Duration t : temporal) temporal_json.push_back(t);
  echo["sweep"] = {{"spatial_sizes_deg", spatial_json},
                   {"temporal_sizes_s", temporal_json},
                   {"jobs", config.jobs}};
  echo["noise"] = noise ? noise_echo(*noise) : json(nullptr);
  json manifest = make_manifest("sweep", echo, config, data, emit.outputs);
  write_text_file((fs::path(config.out_dir) / "manifest.json").string(),
                  manifest.dump(2) + "\n");
  std::cerr << "trajrisk: sweep wrote " << n_cells << " configurations to "
            << config.out_dir << "\n";
  return 0;
}

int run_compare(const RunConfig& base, const std::string& raw_config_path,
                const std::string& anon_config_path) {
  require_out_dir(base);
  RunConfig raw_cfg = base;
  RunConfig anon_cfg = base;
  apply_config_file(raw_cfg, raw_config_path);
  apply_config_file(anon_cfg, anon_config_path);

  // Both sides must describe the same area source; the set itself is built
  // once, from the raw side, so the diff is area-by-area meaningful.
  const bool same_source = raw_cfg.grid_size == anon_cfg.grid_size &&
                           raw_cfg.twindow == anon_cfg.twindow &&
                           raw_cfg.areas_path == anon_cfg.areas_path &&
                           raw_cfg.bbox == anon_cfg.bbox &&
                           raw_cfg.time_origin == anon_cfg.time_origin &&
                           raw_cfg.time_range == anon_cfg.time_range;
  if (!same_source) {
    config_error("raw and anon configs disagree on the area source");
  }

  LoadedData raw_data = load_and_filter(raw_cfg);
  log_load(raw_cfg, raw_data);
  ensure_not_empty(raw_data);
  BuiltAreas areas = build_areas(raw_cfg, raw_data, std::nullopt, "");

  ScoreOptions raw_options;
  raw_options.drop_self_loops = raw_cfg.drop_self_loops;
  ScoreResult raw_scores = score_area_set(raw_data.dataset, areas.set, raw_options);

  LoadedData anon_data = load_and_filter(anon_cfg);
  ensure_not_empty(anon_data);
  NoiseConfig noise = resolve_noise(anon_cfg);
  ScoreOptions anon_options;
  anon_options.drop_self_loops = anon_cfg.drop_self_loops;
  SideResult anon = compute_scores(anon_data.dataset, areas.set, anon_options,
                                   noise, /*keep_perturbed=*/false);

  json raw_echo = base_config_echo("compare/raw", raw_cfg, raw_data);
  raw_echo["areas"] = areas.echo;
  raw_echo["noise"] = json(nullptr);
  json anon_echo = base_config_echo("compare/anon", anon_cfg, anon_data);
  anon_echo["areas"] = areas.echo;
  anon_echo["noise"] = noise_echo(noise);

  Emitter emit;
  emit.root = base.out_dir;
  emit.write("raw/report.json", report_json(raw_scores, raw_echo.dump()));
  emit.write("anon/report_averaged.json",
             averaged_report_json(*anon.averaged, anon_echo.dump()));
  for (Metric m : {Metric::k, Metric::l, Metric::t}) {
    emit.write(std::string("diff_") + metric_name(m) + ".geojson",
               diff_geojson(raw_scores, *anon.averaged, areas.set, m));
  }

  json echo = {{"command", "compare"},
               {"raw_config", raw_config_path},
               {"anon_config", anon_config_path},
               {"raw", raw_echo},
               {"anon", anon_echo}};
  json manifest = make_manifest("compare", echo, raw_cfg, raw_data, emit.outputs);
  write_text_file((fs::path(base.out_dir) / "manifest.json").string(),
                  manifest.dump(2) + "\n");
  std::cerr << "trajrisk: compare wrote " << emit.outputs.size() + 1
            << " files to " << base.out_dir << "\n";
  return 0;
}

}  // namespace trajrisk::cli
