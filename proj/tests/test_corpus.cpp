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

#include <fstream>
#include <sstream>

#include "doctest.h"
#include "projection/corpus.hpp"
#include "projection/engine.hpp"

using namespace projection;

namespace {

const std::filesystem::path kFixtures = PROJECTION_FIXTURES;

std::size_t LineCount(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

std::size_t FailingLine(const std::string& content) {
  std::istringstream in(content);
  try {
    ReadCorpus(in);
  } catch (const CorpusError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("fixture files") {
  Engine empty{EngineConfig{}};
  CHECK(IngestCorpus(empty, kFixtures / "empty.jsonl") == 0);
  CHECK(empty.index().size() == 0);

  Engine three{EngineConfig{}};
  CHECK(IngestCorpus(three, kFixtures / "corpus_3.jsonl") == 3);
  CHECK(three.index().size() == 3);
  CHECK(three.store().GetDocument("doc-3").title == "");

  Engine many{EngineConfig{}};
  CHECK(IngestCorpus(many, kFixtures / "corpus_200.jsonl") == LineCount(kFixtures / "corpus_200.jsonl"));
  CHECK(many.store().document_count() == 200);
}

TEST_CASE("a malformed file names its line and adds nothing") {
  Engine engine{EngineConfig{}};
  try {
    IngestCorpus(engine, kFixtures / "malformed.jsonl");
    FAIL("expected CorpusError");
  } catch (const CorpusError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).rfind("line 3:", 0) == 0);
  }
  CHECK(engine.store().document_count() == 0);
}

TEST_CASE("record validation") {
  CHECK(FailingLine("{\"text\":\"a\"}\n\n  \n[1,2]\n") == 4);
  CHECK(FailingLine("{\"title\":\"t\"}") == 1);
  CHECK(FailingLine("{\"text\":\"ok\"}\n{\"text\":\"   \"}") == 2);
  CHECK(FailingLine("{\"text\":\"ok\",\"url\":5}") == 1);
  CHECK(FailingLine("{\"text\":\"ok\",\"url\":null}") == 0);

  const auto r = ParseCorpusLine(R"({"title":"T","url":"https://e","text":"body","extra":1})", 1);
  CHECK(r.title == "T");
  CHECK(r.url == "https://e");
  CHECK(r.text == "body");
}

TEST_CASE("missing file") {
  CHECK_THROWS_AS(ReadCorpus(kFixtures / "does-not-exist.jsonl"), CorpusError);
}
