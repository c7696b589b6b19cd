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

#include "trajrisk/time.hpp"

#include <array>
#include <cctype>
#include <cstdio>

namespace trajrisk {
namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::optional<int> to_int(std::string_view s) {
  if (!all_digits(s)) return std::nullopt;
  int v = 0;
  for (char c : s) {
    if (v > 100000000) return std::nullopt;
    v = v * 10 + (c - '0');
  }
  return v;
}

unsigned days_in_month(int year, unsigned month) {
  static constexpr std::array<unsigned, 12> kDays = {31, 28, 31, 30, 31, 30,
                                                     31, 31, 30, 31, 30, 31};
  if (month == 2) {
    bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    return leap ? 29 : 28;
  }
  return kDays[month - 1];
}

struct Civil {
  int year;
  unsigned month, day;
};

// Inverse of days_from_civil (Howard Hinnant's civil_from_days).
Civil civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return {static_cast<int>(y + (m <= 2)), m, d};
}

}  // namespace

std::int64_t days_from_civil(int year, unsigned month, unsigned day) {
  year -= month <= 2;
  const std::int64_t era = (year >= 0 ? year : year - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(year - era * 400);
  const unsigned doy = (153 * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
    text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
    text.remove_suffix(1);
  // Minimal form: YYYY-MM-DD?HH:MM:SS (19 chars).
  if (text.size() < 19) return std::nullopt;
  if (text[4] != '-' || text[7] != '-' ||
      (text[10] != 'T' && text[10] != ' ') || text[13] != ':' ||
      text[16] != ':') {
    return std::nullopt;
  }
  auto year = to_int(text.substr(0, 4));
  auto month = to_int(text.substr(5, 2));
  auto day = to_int(text.substr(8, 2));
  auto hour = to_int(text.substr(11, 2));
  auto minute = to_int(text.substr(14, 2));
  auto second = to_int(text.substr(17, 2));
  if (!year || !month || !day || !hour || !minute || !second) return std::nullopt;
  if (*month < 1 || *month > 12) return std::nullopt;
  if (*day < 1 || *day > static_cast<int>(days_in_month(*year, *month)))
    return std::nullopt;
  if (*hour > 23 || *minute > 59 || *second > 59) return std::nullopt;

  std::string_view rest = text.substr(19);
  if (!rest.empty() && rest[0] == '.') {
    size_t i = 1;
    while (i < rest.size() && std::isdigit(static_cast<unsigned char>(rest[i])))
      ++i;
    if (i == 1) return std::nullopt;  // "." with no digits
    rest.remove_prefix(i);
  }

  std::int64_t offset = 0;
  if (!rest.empty()) {
    if (rest == "Z") {
      rest = {};
    } else if (rest[0] == '+' || rest[0] == '-') {
      int sign = rest[0] == '+' ? 1 : -1;
      std::string_view o = rest.substr(1);
      std::optional<int> oh, om;
      if (o.size() == 5 && o[2] == ':') {
        oh = to_int(o.substr(0, 2));
        om = to_int(o.substr(3, 2));
      } else if (o.size() == 4) {
        oh = to_int(o.substr(0, 2));
        om = to_int(o.substr(2, 2));
      } else if (o.size() == 2) {
        oh = to_int(o);
        om = 0;
      }
      if (!oh || !om || *oh > 23 || *om > 59) return std::nullopt;
      offset = sign * (*oh * 3600LL + *om * 60LL);
      rest = {};
    } else {
      return std::nullopt;
    }
  }

  std::int64_t days = days_from_civil(*year, static_cast<unsigned>(*month),
                                      static_cast<unsigned>(*day));
  return days * 86400 + *hour * 3600 + *minute * 60 + *second - offset;
}

std::string format_timestamp(Timestamp t) {
  std::int64_t days = floor_div(t, 86400);
  std::int64_t secs = t - days * 86400;
  Civil c = civil_from_days(days);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ", c.year,
                c.month, c.day, static_cast<int>(secs / 3600),
                static_cast<int>((secs / 60) % 60), static_cast<int>(secs % 60));
  return buf;
}

std::optional<Duration> parse_duration(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
    text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
    text.remove_suffix(1);
  if (text.empty()) return std::nullopt;
  std::int64_t mult = 1;
  char suffix = text.back();
  if (suffix == 's' || suffix == 'm' || suffix == 'h') {
    mult = suffix == 's' ? 1 : suffix == 'm' ? 60 : 3600;
    text.remove_suffix(1);
  }
  if (!all_digits(text) || text.size() > 12) return std::nullopt;
  std::int64_t v = 0;
  for (char c : text) v = v * 10 + (c - '0');
  return v * mult;
}

std::string format_duration(Duration d) {
  if (d % 3600 == 0 && d != 0) return std::to_string(d / 3600) + "h";
  if (d % 60 == 0 && d != 0) return std::to_string(d / 60) + "m";
  return std::to_string(d) + "s";
}

Timestamp floor_to_day(Timestamp t) { return floor_div(t, 86400) * 86400; }

}  // namespace trajrisk
