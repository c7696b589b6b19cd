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

#include "trajrisk/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "trajrisk/error.hpp"

namespace trajrisk {
namespace {

using json = nlohmann::json;

double round6(double v) {
  double r = std::round(v * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;  // normalize -0
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  std::string s(buf);
  if (s.find('.') != std::string::npos) {
    std::size_t last = s.find_last_not_of('0');
    if (s[last] == '.') --last;
    s.erase(last + 1);
  }
  if (s == "-0") s = "0";
  return s;
}

json ring_to_json(const Ring& ring) {
  json out = json::array();
  for (const LonLat& p : ring) out.push_back(json::array({p.lon, p.lat}));
  out.push_back(json::array({ring.front().lon, ring.front().lat}));
  return out;
}

json geometry_to_json(const EquivalenceArea& area) {
  auto poly_json = [](const Polygon& poly) {
    json rings = json::array();
    rings.push_back(ring_to_json(poly.outer));
    for (const Ring& hole : poly.holes) rings.push_back(ring_to_json(hole));
    return rings;
  };
  if (area.parts.size() == 1) {
    return {{"type", "Polygon"}, {"coordinates", poly_json(area.parts[0])}};
  }
  json polys = json::array();
  for (const Polygon& part : area.parts) polys.push_back(poly_json(part));
  return {{"type", "MultiPolygon"}, {"coordinates", polys}};
}

EquivalenceArea area_geometry(const AreaSet& areas, const std::string& id) {
  std::optional<AreaRef> ref = areas.ref_of(id);
  if (!ref) throw Error("scored area '" + id + "' not found in area set");
  return areas.materialize(*ref);
}

std::optional<double> metric_value(const AreaScores& a, Metric m) {
  switch (m) {
    case Metric::k: return static_cast<double>(a.k);
    case Metric::l: return static_cast<double>(a.l);
    case Metric::t: return a.t;
  }
  return std::nullopt;
}

std::optional<double> metric_value(const AveragedAreaScores& a, Metric m) {
  switch (m) {
    case Metric::k: return a.k;
    case Metric::l: return a.l;
    case Metric::t: return a.t;
  }
  return std::nullopt;
}

json opt_json(const std::optional<double>& v) {
  return v ? json(round6(*v)) : json(nullptr);
}

template <typename RawMap, typename AnonMap>
std::string diff_impl(const RawMap& raw, const AnonMap& anon,
                      const AreaSet& areas, Metric metric) {
  std::vector<std::string> ids;
  for (const auto& [id, _] : raw) ids.push_back(id);
  for (const auto& [id, _] : anon) {
    if (!raw.count(id)) ids.push_back(id);
  }
  std::sort(ids.begin(), ids.end());

  json features = json::array();
  for (const std::string& id : ids) {
    EquivalenceArea area = area_geometry(areas, id);
    std::optional<double> before, after;
    auto rit = raw.find(id);
    if (rit != raw.end()) before = metric_value(rit->second, metric);
    auto ait = anon.find(id);
    if (ait != anon.end()) after = metric_value(ait->second, metric);
    std::optional<double> delta;
    if (before && after) delta = *after - *before;

    json props = {{"area_id", id},
                  {"label", area.label},
                  {"metric", metric_name(metric)},
                  {"raw", opt_json(before)},
                  {"anon", opt_json(after)},
                  {"delta", opt_json(delta)}};
    features.push_back({{"type", "Feature"},
                        {"properties", props},
                        {"geometry", geometry_to_json(area)}});
  }
  json doc = {{"type", "FeatureCollection"}, {"features", features}};
  return doc.dump(2) + "\n";
}

json staircase_to_json(const Staircase& sc) {
  json points = json::array();
  for (const StairPoint& p : sc.points) {
    points.push_back(json::array({round6(p.fraction), round6(p.score)}));
  }
  return {{"sample_count", sc.sample_count}, {"points", points}};
}

json parse_config_echo(std::string_view config_json_text) {
  if (config_json_text.empty()) return json::object();
  json cfg;
  try {
    cfg = json::parse(config_json_text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("config echo is not valid JSON: ") + e.what());
  }
  if (!cfg.is_object()) throw Error("config echo must be a JSON object");
  return cfg;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#8c564b",
                                    "#17becf", "#7f7f7f", "#bcbd22"};

std::string svg_num(double v) { return format_fixed(v, 2); }

// One plot box with axes, ticks and ECDF-style step curves. The staircase
// points give (fraction strictly below v, v); the familiar cumulative curve
// through them holds fraction <= v on [v_i, v_{i+1}), reaching 1 at the top.
void render_plot(std::ostringstream& svg, double ox, double oy, double width,
                 double height, const std::string& subtitle,
                 const std::vector<StaircaseSeries>& series, bool legend) {
  const double ml = 46, mr = 12, mt = subtitle.empty() ? 10 : 26, mb = 32;
  const double px = ox + ml, py = oy + mt;
  const double pw = width - ml - mr, ph = height - mt - mb;

  double xmin = 0.0, xmax = 1.0;
  bool any = false;
  for (const StaircaseSeries& s : series) {
    for (const StairPoint& p : s.staircase.points) {
      if (!any) {
        xmin = xmax = p.score;
        any = true;
      } else {
        xmin = std::min(xmin, p.score);
        xmax = std::max(xmax, p.score);
      }
    }
  }
  if (xmax - xmin < 1e-12) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  const double pad = 0.05 * (xmax - xmin);
  xmin -= pad;
  xmax += pad;

  auto X = [&](double v) { return px + (v - xmin) / (xmax - xmin) * pw; };
  auto Y = [&](double f) { return py + (1.0 - f) * ph; };

  svg << "<rect x=\"" << svg_num(px) << "\" y=\"" << svg_num(py) << "\" width=\""
      << svg_num(pw) << "\" height=\"" << svg_num(ph)
      << "\" fill=\"white\" stroke=\"#444\"/>\n";
  if (!subtitle.empty()) {
    svg << "<text x=\"" << svg_num(px + pw / 2) << "\" y=\"" << svg_num(py - 8)
        << "\" text-anchor=\"middle\" font-size=\"12\">" << xml_escape(subtitle)
        << "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 4.0;
    const double yf = i / 4.0;
    svg << "<line x1=\"" << svg_num(X(xv)) << "\" y1=\"" << svg_num(py + ph)
        << "\" x2=\"" << svg_num(X(xv)) << "\" y2=\"" << svg_num(py + ph + 4)
        << "\" stroke=\"#444\"/>\n"
        << "<text x=\"" << svg_num(X(xv)) << "\" y=\"" << svg_num(py + ph + 16)
        << "\" text-anchor=\"middle\" font-size=\"10\">"
        << format_score(round6(xv)) << "</text>\n"
        << "<line x1=\"" << svg_num(px - 4) << "\" y1=\"" << svg_num(Y(yf))
        << "\" x2=\"" << svg_num(px) << "\" y2=\"" << svg_num(Y(yf))
        << "\" stroke=\"#444\"/>\n"
        << "<text x=\"" << svg_num(px - 6) << "\" y=\"" << svg_num(Y(yf) + 3)
        << "\" text-anchor=\"end\" font-size=\"10\">" << format_score(yf)
        << "</text>\n";
  }

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& points = series[si].staircase.points;
    if (points.empty()) continue;
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    std::ostringstream d;
    d << "M " << svg_num(px) << " " << svg_num(Y(0));
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double cum = i + 1 < points.size() ? points[i + 1].fraction : 1.0;
      d << " H " << svg_num(X(points[i].score)) << " V " << svg_num(Y(cum));
    }
    d << " H " << svg_num(px + pw);
    svg << "<path d=\"" << d.str() << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\"/>\n";
    if (legend && !series[si].label.empty()) {
      const double ly = py + 14 + 14 * static_cast<double>(si);
      svg << "<line x1=\"" << svg_num(px + 8) << "\" y1=\"" << svg_num(ly - 3)
          << "\" x2=\"" << svg_num(px + 26) << "\" y2=\"" << svg_num(ly - 3)
          << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n"
          << "<text x=\"" << svg_num(px + 30) << "\" y=\"" << svg_num(ly)
          << "\" font-size=\"10\">" << xml_escape(series[si].label)
          << "</text>\n";
    }
  }
}

}  // namespace

const char* metric_name(Metric m) {
  switch (m) {
    case Metric::k: return "k";
    case Metric::l: return "l";
    case Metric::t: return "t";
  }
  return "?";
}

Metric parse_metric(std::string_view name) {
  if (name == "k") return Metric::k;
  if (name == "l") return Metric::l;
  if (name == "t") return Metric::t;
  throw Error("unknown metric '" + std::string(name) + "' (expected k, l or t)");
}

std::string format_score(double value) { return format_fixed(value, 6); }

std::string area_scores_geojson(const ScoreResult& scores, const AreaSet& areas,
                                Metric metric) {
  json features = json::array();
  for (const auto& [id, a] : scores.areas) {
    EquivalenceArea area = area_geometry(areas, id);
    json props = {{"area_id", id},
                  {"label", area.label},
                  {"metric", metric_name(metric)},
                  {"k", a.k},
                  {"l", a.l},
                  {"t", opt_json(a.t)},
                  {"matched_count", a.matched_count}};
    features.push_back({{"type", "Feature"},
                        {"properties", props},
                        {"geometry", geometry_to_json(area)}});
  }
  json doc = {{"type", "FeatureCollection"}, {"features", features}};
  return doc.dump(2) + "\n";
}

std::string diff_geojson(const ScoreResult& raw, const ScoreResult& anon,
                         const AreaSet& areas, Metric metric) {
  return diff_impl(raw.areas, anon.areas, areas, metric);
}

std::string diff_geojson(const ScoreResult& raw, const AveragedScoreResult& anon,
                         const AreaSet& areas, Metric metric) {
  return diff_impl(raw.areas, anon.areas, areas, metric);
}

std::string staircase_csv(const Staircase& staircase) {
  if (staircase.empty()) throw Error("staircase is empty");
  std::string out = "fraction,threshold\n";
  for (const StairPoint& p : staircase.points) {
    out += format_score(round6(p.fraction));
    out += ',';
    out += format_score(round6(p.score));
    out += '\n';
  }
  return out;
}

std::string staircase_svg(const std::string& title,
                          const std::vector<StaircaseSeries>& series) {
  bool any = false;
  for (const StaircaseSeries& s : series) any = any || !s.staircase.empty();
  if (!any) throw Error("staircase is empty");

  const double width = 460, height = 330;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\" font-family=\"sans-serif\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << svg_num(width / 2)
      << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">"
      << xml_escape(title) << "</text>\n";
  render_plot(svg, 0, 24, width, height - 24, "", series, /*legend=*/true);
  svg << "</svg>\n";
  return svg.str();
}

std::string sweep_panel_svg(const std::string& title,
                            const std::vector<std::string>& row_labels,
                            const std::vector<std::string>& col_labels,
                            const std::vector<std::vector<StaircaseSeries>>& cells) {
  const std::size_t rows = row_labels.size();
  const std::size_t cols = col_labels.size();
  if (rows == 0 || cols == 0) throw Error("sweep panel needs rows and columns");
  if (cells.size() != rows * cols) {
    throw Error("sweep panel expects one cell per (row, column) pair");
  }

  const double cw = 320, ch = 240, left = 70, top = 52;
  const double width = left + cw * static_cast<double>(cols) + 16;
  const double height = top + ch * static_cast<double>(rows) + 16;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << svg_num(width)
      << " " << svg_num(height) << "\" font-family=\"sans-serif\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << svg_num(width / 2)
      << "\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">"
      << xml_escape(title) << "</text>\n";

  for (std::size_t c = 0; c < cols; ++c) {
    svg << "<text x=\"" << svg_num(left + cw * (static_cast<double>(c) + 0.5))
        << "\" y=\"42\" text-anchor=\"middle\" font-size=\"12\">"
        << xml_escape(col_labels[c]) << "</text>\n";
  }
  for (std::size_t r = 0; r < rows; ++r) {
    const double cy = top + ch * (static_cast<double>(r) + 0.5);
    svg << "<text x=\"16\" y=\"" << svg_num(cy)
        << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
        << svg_num(cy) << ")\">" << xml_escape(row_labels[r]) << "</text>\n";
  }

  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const auto& series = cells[r * cols + c];
      render_plot(svg, left + cw * static_cast<double>(c),
                  top + ch * static_cast<double>(r), cw, ch, "", series,
                  /*legend=*/r == 0 && c == 0);
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

namespace {

json trajectory_to_json(const TrajectoryScores& ts) {
  json out;
  out["k"] = ts.k_origin ? json(*ts.k_origin) : json(nullptr);
  out["l"] = ts.l_origin ? json(*ts.l_origin) : json(nullptr);
  out["strict_k"] = ts.strict_k ? json(*ts.strict_k) : json(nullptr);
  out["t"] = opt_json(ts.t_origin);
  return out;
}

}  // namespace

std::string report_json(const ScoreResult& scores,
                        std::string_view config_json_text) {
  json doc;
  doc["config"] = parse_config_echo(config_json_text);
  json areas = json::object();
  for (const auto& [id, a] : scores.areas) {
    areas[id] = {{"k", a.k},
                 {"l", a.l},
                 {"t", opt_json(a.t)},
                 {"matched_count", a.matched_count}};
  }
  doc["areas"] = areas;
  json trajs = json::object();
  for (const auto& [id, ts] : scores.trajectories) {
    trajs[id] = trajectory_to_json(ts);
  }
  doc["trajectories"] = trajs;
  json stairs = json::object();
  for (const auto& [name, sc] : scores.staircases) {
    stairs[name] = staircase_to_json(sc);
  }
  doc["staircases"] = stairs;
  doc["unmatched"] = {{"origin", scores.unmatched_origin},
                      {"dest", scores.unmatched_dest}};
  doc["t_max"] = opt_json(scores.t_max);
  return doc.dump(2) + "\n";
}

std::string averaged_report_json(const AveragedScoreResult& scores,
                                 std::string_view config_json_text) {
  json doc;
  doc["config"] = parse_config_echo(config_json_text);
  doc["repetitions"] = scores.repetitions;
  json areas = json::object();
  for (const auto& [id, a] : scores.areas) {
    areas[id] = {{"k", round6(a.k)},
                 {"l", round6(a.l)},
                 {"t", opt_json(a.t)},
                 {"matched_count", round6(a.matched_count)}};
  }
  doc["areas"] = areas;
  doc["unmatched"] = {{"origin", round6(scores.unmatched_origin)},
                      {"dest", round6(scores.unmatched_dest)}};
  doc["t_max"] = opt_json(scores.t_max);
  return doc.dump(2) + "\n";
}

void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out.good()) throw IoError("failed writing '" + path + "'");
}

}  // namespace trajrisk
