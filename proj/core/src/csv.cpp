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

#include "trajrisk/csv.hpp"

#include <istream>
#include <ostream>

#include "trajrisk/error.hpp"

namespace trajrisk {

std::optional<std::vector<std::string>> CsvReader::next_row() {
  int c = in_.get();
  if (c == std::istream::traits_type::eof()) return std::nullopt;

  row_start_line_ = current_line_;
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool field_quoted = false;  // a quoted field's trailing CR is data, not CRLF

  if (first_row_) {
    first_row_ = false;
    // UTF-8 BOM
    if (c == 0xEF) {
      int c2 = in_.get();
      int c3 = in_.get();
      if (c2 == 0xBB && c3 == 0xBF) {
        c = in_.get();
        if (c == std::istream::traits_type::eof()) return std::nullopt;
      } else {
        throw ParseError("csv: invalid byte sequence at start of stream");
      }
    }
  }

  while (true) {
    if (c == std::istream::traits_type::eof()) {
      if (quoted) {
        throw ParseError("csv: unterminated quoted field at line " +
                         std::to_string(row_start_line_));
      }
      fields.push_back(std::move(field));
      return fields;
    }
    char ch = static_cast<char>(c);
    if (quoted) {
      if (ch == '"') {
        int next = in_.peek();
        if (next == '"') {
          in_.get();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++current_line_;
        field.push_back(ch);
      }
    } else if (ch == '"' && field.empty()) {
      quoted = true;
      field_quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
      field_quoted = false;
    } else if (ch == '\n') {
      ++current_line_;
      if (!field_quoted && !field.empty() && field.back() == '\r') field.pop_back();
      fields.push_back(std::move(field));
      return fields;
    } else {
      field.push_back(ch);
    }
    c = in_.get();
  }
}

std::string csv_escape(std::string_view field) {
  bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_csv_row(std::ostream& out, std::span<const std::string> fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.put(',');
    out << csv_escape(fields[i]);
  }
  out.put('\n');
}

}  // namespace trajrisk
