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

#include "trajrisk/trip_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "trajrisk/csv.hpp"
#include "trajrisk/error.hpp"

namespace trajrisk {
namespace {

std::optional<double> parse_double(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

std::size_t find_column(const std::vector<std::string>& header,
                        const std::string& name) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw SchemaError("schema: column '" + name + "' not found in header");
  }
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

CsvSchema canonical_schema() {
  CsvSchema schema;
  schema.id = "id";
  return schema;
}

std::pair<Dataset, TripParseReport> parse_dataset(std::istream& in,
                                                  const CsvSchema& schema,
                                                  const TripParseOptions& opts) {
  CsvReader reader(in);
  auto header = reader.next_row();
  if (!header) throw SchemaError("schema: empty input, header row required");
  {
    std::unordered_set<std::string_view> seen;
    for (const std::string& name : *header) {
      if (!seen.insert(name).second) {
        throw SchemaError("schema: duplicate column '" + name + "' in header");
      }
    }
  }

  const std::size_t col_pt = find_column(*header, schema.pickup_time);
  const std::size_t col_dt = find_column(*header, schema.dropoff_time);
  const std::size_t col_plon = find_column(*header, schema.pickup_lon);
  const std::size_t col_plat = find_column(*header, schema.pickup_lat);
  const std::size_t col_dlon = find_column(*header, schema.dropoff_lon);
  const std::size_t col_dlat = find_column(*header, schema.dropoff_lat);
  std::optional<std::size_t> col_id;
  if (schema.id) col_id = find_column(*header, *schema.id);

  std::vector<std::size_t> extra_cols;
  for (std::size_t i = 0; i < header->size(); ++i) {
    if (i == col_pt || i == col_dt || i == col_plon || i == col_plat ||
        i == col_dlon || i == col_dlat || (col_id && i == *col_id)) {
      continue;
    }
    extra_cols.push_back(i);
  }

  Dataset dataset;
  dataset.provenance = "trip-record csv";
  TripParseReport report;
  std::unordered_set<std::string> ids;

  auto fail = [&](std::uint64_t line, const std::string& reason) {
    if (opts.strict) {
      throw ParseError("row at line " + std::to_string(line) + ": " + reason);
    }
    ++report.parse_errors;
  };

  std::uint64_t data_row = 0;
  while (auto row = reader.next_row()) {
    ++data_row;
    ++report.rows_read;
    const std::uint64_t line = reader.line();
    if (row->size() != header->size()) {
      fail(line, "expected " + std::to_string(header->size()) + " fields, got " +
                     std::to_string(row->size()));
      continue;
    }
    auto pickup_t = parse_timestamp((*row)[col_pt]);
    auto dropoff_t = parse_timestamp((*row)[col_dt]);
    auto pickup_lon = parse_double((*row)[col_plon]);
    auto pickup_lat = parse_double((*row)[col_plat]);
    auto dropoff_lon = parse_double((*row)[col_dlon]);
    auto dropoff_lat = parse_double((*row)[col_dlat]);
    if (!pickup_t || !dropoff_t) {
      fail(line, "unparseable timestamp");
      continue;
    }
    if (!pickup_lon || !pickup_lat || !dropoff_lon || !dropoff_lat) {
      fail(line, "unparseable coordinate");
      continue;
    }
    if (std::abs(*pickup_lat) > 90.0 || std::abs(*dropoff_lat) > 90.0 ||
        std::abs(*pickup_lon) > 180.0 || std::abs(*dropoff_lon) > 180.0) {
      fail(line, "coordinate out of range");
      continue;
    }
    if (*dropoff_t < *pickup_t) {
      fail(line, "dropoff before pickup");
      continue;
    }
    std::string id =
        col_id ? (*row)[*col_id] : "t" + std::to_string(data_row);
    if (id.empty()) {
      fail(line, "empty trajectory id");
      continue;
    }

    Trajectory trajectory;
    trajectory.id = std::move(id);
    trajectory.qi_index = 0;
    trajectory.sa_index = 1;
    Record origin;
    origin.t = *pickup_t;
    origin.pos = {*pickup_lon, *pickup_lat};
    for (std::size_t col : extra_cols) {
      origin.extras.emplace((*header)[col], (*row)[col]);
    }
    Record destination;
    destination.t = *dropoff_t;
    destination.pos = {*dropoff_lon, *dropoff_lat};
    trajectory.records.push_back(std::move(origin));
    trajectory.records.push_back(std::move(destination));

    if (!ids.insert(trajectory.id).second) {
      fail(line, "duplicate trajectory id '" + trajectory.id + "'");
      continue;
    }
    dataset.trajectories.push_back(std::move(trajectory));
  }
  return {std::move(dataset), report};
}

void write_canonical_csv(std::ostream& out, const Dataset& dataset) {
  std::set<std::string> extra_keys;
  for (const Trajectory& trajectory : dataset.trajectories) {
    for (const Record& record : trajectory.records) {
      for (const auto& [key, value] : record.extras) extra_keys.insert(key);
    }
  }

  std::vector<std::string> row = {"id",          "pickup_time", "pickup_lon",
                                  "pickup_lat",  "dropoff_time", "dropoff_lon",
                                  "dropoff_lat"};
  row.insert(row.end(), extra_keys.begin(), extra_keys.end());
  write_csv_row(out, row);

  auto coord = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return std::string(buf);
  };

  for (const Trajectory& trajectory : dataset.trajectories) {
    row.clear();
    row.push_back(trajectory.id);
    const Record& origin = trajectory.qi();
    const Record& destination = trajectory.sa();
    row.push_back(format_timestamp(origin.t));
    row.push_back(coord(origin.pos.lon));
    row.push_back(coord(origin.pos.lat));
    row.push_back(format_timestamp(destination.t));
    row.push_back(coord(destination.pos.lon));
    row.push_back(coord(destination.pos.lat));
    for (const std::string& key : extra_keys) {
      const std::string* value = nullptr;
      for (const Record& record : trajectory.records) {
        auto it = record.extras.find(key);
        if (it != record.extras.end()) {
          value = &it->second;
          break;
        }
      }
      row.push_back(value ? *value : std::string());
    }
    write_csv_row(out, row);
  }
}

std::string canonical_csv(const Dataset& dataset) {
  std::ostringstream out;
  write_canonical_csv(out, dataset);
  return out.str();
}

}  // namespace trajrisk
