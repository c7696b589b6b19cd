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
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>

#include "trajrisk/model.hpp"

namespace trajrisk {

// Maps the logical trip-record fields to column names in the input CSV.
// Defaults match the canonical emitter, so canonical files parse without
// configuration. When `id` is unset, sequential pseudonyms "t1", "t2", ...
// (numbered by input data row) are synthesized.
struct CsvSchema {
  std::string pickup_time = "pickup_time";
  std::string dropoff_time = "dropoff_time";
  std::string pickup_lon = "pickup_lon";
  std::string pickup_lat = "pickup_lat";
  std::string dropoff_lon = "dropoff_lon";
  std::string dropoff_lat = "dropoff_lat";
  std::optional<std::string> id;
};

// Canonical schema including the `id` column, as written by
// write_canonical_csv.
CsvSchema canonical_schema();

struct TripParseOptions {
  // Strict mode aborts on the first malformed row instead of counting it.
  bool strict = false;
};

struct TripParseReport {
  std::uint64_t rows_read = 0;
  std::uint64_t parse_errors = 0;
};

// Reads a header-first trip-record CSV and builds one two-record trajectory
// per row (origin = QI, destination = SA). Unmapped columns are carried as
// extras on the origin record. Malformed rows (bad syntax, out-of-range or
// non-finite coordinates, dropoff before pickup, empty or duplicate id) are
// counted and skipped, or raise ParseError in strict mode. A mapped column
// missing from the header raises SchemaError.
std::pair<Dataset, TripParseReport> parse_dataset(
    std::istream& in, const CsvSchema& schema, const TripParseOptions& opts = {});

// Canonical trip CSV: columns id,pickup_time,pickup_lon,pickup_lat,
// dropoff_time,dropoff_lon,dropoff_lat followed by the union of extras keys
// in lexicographic order. Coordinates with 6 decimal places, timestamps
// ISO-8601 UTC. The QI record maps to pickup and the SA record to dropoff.
// Serializing and re-parsing a canonical file is byte-stable.
void write_canonical_csv(std::ostream& out, const Dataset& dataset);

std::string canonical_csv(const Dataset& dataset);

}  // namespace trajrisk
