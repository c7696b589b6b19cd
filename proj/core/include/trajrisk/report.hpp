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
// Emitters turn score results into GeoJSON / CSV / SVG / JSON text. All of
// them are deterministic: map iteration gives stable ordering, and every
// score is printed with at most 6 decimals, trailing zeros trimmed. Missing
// values serialize as JSON null or an empty CSV cell, never as 0.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "trajrisk/areas.hpp"
#include "trajrisk/metrics.hpp"
#include "trajrisk/perturb.hpp"

namespace trajrisk {

enum class Metric { k, l, t };

const char* metric_name(Metric m);

// Accepts "k", "l" or "t"; throws on anything else.
Metric parse_metric(std::string_view name);

// Fixed-point with 6 decimals, trailing zeros then a trailing dot trimmed:
// 0.2 -> "0.2", 3.0 -> "3", 1e-9 -> "0". Never "-0".
std::string format_score(double value);

// GeoJSON FeatureCollection with one feature per scored area, sorted by
// area_id. Properties: area_id, label, k, l, t (null when undefined),
// matched_count, and "metric" naming the requested choropleth column.
std::string area_scores_geojson(const ScoreResult& scores, const AreaSet& areas,
                                Metric metric);

// Per-area before/after for one metric: properties raw, anon and
// delta = anon - raw. A value missing on either side makes the delta null.
std::string diff_geojson(const ScoreResult& raw, const ScoreResult& anon,
                         const AreaSet& areas, Metric metric);
std::string diff_geojson(const ScoreResult& raw, const AveragedScoreResult& anon,
                         const AreaSet& areas, Metric metric);

// "fraction,threshold" CSV rows, one per staircase point.
// Throws on an empty staircase.
std::string staircase_csv(const Staircase& staircase);

struct StaircaseSeries {
  std::string label;
  Staircase staircase;
};

// Self-contained SVG step plot of one or more series on shared axes.
// Throws when every series is empty.
std::string staircase_svg(const std::string& title,
                          const std::vector<StaircaseSeries>& series);

// Panel of step plots: one cell per (row, col), cells in row-major order,
// mirroring a parameter sweep (rows = spatial sizes, cols = temporal sizes).
// Empty cells render as blank axes.
std::string sweep_panel_svg(const std::string& title,
                            const std::vector<std::string>& row_labels,
                            const std::vector<std::string>& col_labels,
                            const std::vector<std::vector<StaircaseSeries>>& cells);

// Full machine-readable report. config_json_text must be a JSON object (or
// empty for {}); it is echoed under "config". Scores are rounded to 6
// decimals; undefined ones are null.
std::string report_json(const ScoreResult& scores, std::string_view config_json_text);
std::string averaged_report_json(const AveragedScoreResult& scores,
                                 std::string_view config_json_text);

// Atomically-ish write (truncate + write + flush); throws IoError on failure.
void write_text_file(const std::string& path, std::string_view content);

}  // namespace trajrisk
