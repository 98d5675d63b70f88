// Copyright (c) 2026 The Projection Authors. All Rights Reserved
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

namespace projection {

class Engine;

/// One line of a corpus file: {"title": ..., "url": ..., "text": ...}.
struct CorpusRecord {
  std::string title;
  std::string url;
  std::string text;
};

class CorpusError : public std::runtime_error {
 public:
  CorpusError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Parses one JSON Lines record. Throws CorpusError tagged with `line`.
CorpusRecord ParseCorpusLine(const std::string& text, std::size_t line);

/// Reads every record; whitespace-only lines are skipped.
std::vector<CorpusRecord> ReadCorpus(std::istream& in);
std::vector<CorpusRecord> ReadCorpus(const std::filesystem::path& path);

/// Adds every record as a document through the engine. All lines are parsed
/// before the first one is added, so a malformed file adds nothing.
std::size_t IngestCorpus(Engine& engine, const std::filesystem::path& path);

}  // namespace projection
