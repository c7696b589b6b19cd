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

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trajrisk {

// RFC 4180 reader: quoted fields, embedded separators and line breaks,
// CRLF or LF records. A UTF-8 BOM on the first record is stripped.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Next record, or nullopt at end of stream. Throws ParseError on an
  // unterminated quoted field.
  std::optional<std::vector<std::string>> next_row();

  // 1-based line number where the last returned record started.
  std::uint64_t line() const { return row_start_line_; }

 private:
  std::istream& in_;
  std::uint64_t current_line_ = 1;
  std::uint64_t row_start_line_ = 1;
  bool first_row_ = true;
};

// Quotes a field only when it contains a separator, quote or line break.
std::string csv_escape(std::string_view field);

void write_csv_row(std::ostream& out, std::span<const std::string> fields);

}  // namespace trajrisk
