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
#include <optional>
#include <string>
#include <string_view>

namespace trajrisk {

// Seconds since the Unix epoch. Everything in the library is UTC at second
// resolution.
using Timestamp = std::int64_t;

// Seconds.
using Duration = std::int64_t;

// Accepts "YYYY-MM-DDTHH:MM:SS" and "YYYY-MM-DD HH:MM:SS", with an optional
// trailing "Z" or "+HH:MM"/"-HH:MM"/"+HHMM" offset and optional fractional
// seconds (truncated). Returns nullopt on anything else.
std::optional<Timestamp> parse_timestamp(std::string_view text);

// ISO-8601 UTC with a trailing Z, e.g. "2009-01-05T07:00:00Z".
std::string format_timestamp(Timestamp t);

// "90" (bare seconds), "90s", "10m", "2h". Whole non-negative numbers only.
std::optional<Duration> parse_duration(std::string_view text);

// Shortest whole unit: "2h", "10m" or "90s".
std::string format_duration(Duration d);

// Midnight UTC of the day containing t.
Timestamp floor_to_day(Timestamp t);

// Division rounding toward negative infinity; b must be positive.
constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  return (a % b != 0 && (a < 0) != (b < 0)) ? q - 1 : q;
}

// Days since 1970-01-01 for a proleptic Gregorian civil date.
std::int64_t days_from_civil(int year, unsigned month, unsigned day);

}  // namespace trajrisk
