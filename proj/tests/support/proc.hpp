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

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace trajrisk::testing {

// Path to the command-line binary under test, from $TRAJRISK_BIN.
// Aborts with a clear message when unset.
std::string tool_path();

struct RunResult {
  int status = -1;  // process exit code, or -1 when it did not exit normally
  std::string out;
  std::string err;
};

// Runs the tool with the given arguments through /bin/sh, capturing both
// output streams. `env` entries are prepended as VAR=value assignments.
RunResult run_tool(const std::vector<std::string>& args,
                   const std::vector<std::pair<std::string, std::string>>& env = {});

// Unique directory under the system temp root, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& relative = {}) const;

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

// Sorted relative paths of all regular files beneath root.
std::vector<std::string> list_files(const std::filesystem::path& root);

}  // namespace trajrisk::testing
