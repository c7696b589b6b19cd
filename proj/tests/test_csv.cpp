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

#include <doctest.h>

#include <random>
#include <sstream>

#include "trajrisk/error.hpp"

using namespace trajrisk;

namespace {

std::vector<std::vector<std::string>> read_all(const std::string& text) {
  std::istringstream in(text);
  CsvReader reader(in);
  std::vector<std::vector<std::string>> rows;
  while (auto row = reader.next_row()) rows.push_back(*row);
  return rows;
}

}  // namespace

TEST_CASE("csv reads plain rows") {
  auto rows = read_all("a,b,c\n1,2,3\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"a", "b", "c"});
  CHECK(rows[1] == std::vector<std::string>{"1", "2", "3"});
}

TEST_CASE("csv handles a missing final newline") {
  auto rows = read_all("a,b\n1,2");
  REQUIRE(rows.size() == 2);
  CHECK(rows[1] == std::vector<std::string>{"1", "2"});
}

TEST_CASE("csv strips CR from CRLF line endings") {
  auto rows = read_all("a,b\r\n1,2\r\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"a", "b"});
  CHECK(rows[1] == std::vector<std::string>{"1", "2"});
}

TEST_CASE("csv parses quoted fields with separators, quotes and newlines") {
  auto rows = read_all("\"a,b\",\"he said \"\"hi\"\"\",\"two\nlines\"\n");
  REQUIRE(rows.size() == 1);
  REQUIRE(rows[0].size() == 3);
  CHECK(rows[0][0] == "a,b");
  CHECK(rows[0][1] == "he said \"hi\"");
  CHECK(rows[0][2] == "two\nlines");
}

TEST_CASE("csv preserves empty fields") {
  auto rows = read_all(",,\na,,b\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"", "", ""});
  CHECK(rows[1] == std::vector<std::string>{"a", "", "b"});
}

TEST_CASE("csv blank line is a single empty field") {
  auto rows = read_all("a\n\nb\n");
  REQUIRE(rows.size() == 3);
  CHECK(rows[1] == std::vector<std::string>{""});
}

TEST_CASE("csv strips a UTF-8 BOM") {
  auto rows = read_all("\xEF\xBB\xBFid,x\n1,2\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0][0] == "id");
}

TEST_CASE("csv throws on an unterminated quoted field") {
  CHECK_THROWS_AS(read_all("a,\"unclosed\n"), ParseError);
}

TEST_CASE("csv reports the starting line of multi-line records") {
  std::istringstream in("a\n\"x\ny\"\nb\n");
  CsvReader reader(in);
  REQUIRE(reader.next_row());
  CHECK(reader.line() == 1);
  REQUIRE(reader.next_row());
  CHECK(reader.line() == 2);  // the quoted record spans lines 2-3
  REQUIRE(reader.next_row());
  CHECK(reader.line() == 4);
}

TEST_CASE("csv escape quotes only when needed") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("with,comma") == "\"with,comma\"");
  CHECK(csv_escape("with\"quote") == "\"with\"\"quote\"");
  CHECK(csv_escape("with\nnewline") == "\"with\nnewline\"");
  CHECK(csv_escape("") == "");
}

TEST_CASE("csv write and read round-trip arbitrary fields") {
  std::mt19937_64 rng(7);
  const char alphabet[] = "ab,\"\n\r x";
  for (int iteration = 0; iteration < 50; ++iteration) {
    std::vector<std::vector<std::string>> rows;
    std::ostringstream out;
    const int row_count = 1 + static_cast<int>(rng() % 5);
    for (int r = 0; r < row_count; ++r) {
      std::vector<std::string> row;
      const int field_count = 2 + static_cast<int>(rng() % 4);
      for (int f = 0; f < field_count; ++f) {
        std::string field;
        const int len = static_cast<int>(rng() % 8);
        for (int i = 0; i < len; ++i) {
          field.push_back(alphabet[rng() % (sizeof(alphabet) - 1)]);
        }
        // A field that is pure CR would be eaten by CRLF handling when it
        // lands unquoted at end of row; the writer quotes it, so it survives.
        row.push_back(std::move(field));
      }
      rows.push_back(row);
      write_csv_row(out, rows.back());
    }
    CHECK(read_all(out.str()) == rows);
  }
}
