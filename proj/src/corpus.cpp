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

#include "projection/corpus.hpp"

#include <fstream>

#include "json.hpp"
#include "projection/embedder.hpp"
#include "projection/engine.hpp"

namespace projection {

CorpusRecord ParseCorpusLine(const std::string& text, std::size_t line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw CorpusError(line, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw CorpusError(line, "record must be a JSON object");

  auto field = [&](const char* key, bool required) -> std::string {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
      if (required) throw CorpusError(line, std::string("missing field \"") + key + "\"");
      return {};
    }
    if (!it->is_string()) throw CorpusError(line, std::string("field \"") + key + "\" must be a string");
    return it->get<std::string>();
  };
  CorpusRecord record{field("title", false), field("url", false), field("text", true)};
  if (!HasContent(record.text)) throw CorpusError(line, "empty text");
  return record;
}

std::vector<CorpusRecord> ReadCorpus(std::istream& in) {
  std::vector<CorpusRecord> records;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!HasContent(line)) continue;
    records.push_back(ParseCorpusLine(line, line_no));
  }
  return records;
}

std::vector<CorpusRecord> ReadCorpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError(0, "cannot open " + path.string());
  return ReadCorpus(in);
}

std::size_t IngestCorpus(Engine& engine, const std::filesystem::path& path) {
  const auto records = ReadCorpus(path);
  for (const auto& r : records) engine.AddDocument(r.title, r.url, r.text);
  return records.size();
}

}  // namespace projection
