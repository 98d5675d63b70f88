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

#include <atomic>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "doctest.h"
#include "oracles.hpp"
#include "projection/error.hpp"
#include "projection/vector_index.hpp"

using namespace projection;

namespace {

std::vector<oracle::Item> RandomItems(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
  std::vector<oracle::Item> items;
  for (std::size_t i = 0; i < n; ++i) {
    items.push_back({"item-" + std::to_string(i), i % 3 == 0 ? ItemKind::kEntity : ItemKind::kDocument,
                     oracle::RandomUnitVector(rng, dim)});
  }
  return items;
}

void Fill(VectorIndex& index, const std::vector<oracle::Item>& items) {
  for (const auto& it : items) index.Add({it.id, it.kind, it.vector});
}

EmbeddingVector Unit(std::vector<float> v) { return EmbeddingVector(std::move(v)); }

}  // namespace

TEST_CASE("add, duplicate, dimension mismatch") {
  VectorIndex index(2);
  CHECK(index.size() == 0);
  index.Add({"a", ItemKind::kDocument, Unit({1.0f, 0.0f})});
  CHECK(index.size() == 1);
  CHECK_THROWS_WITH_AS(index.Add({"a", ItemKind::kDocument, Unit({0.0f, 1.0f})}), doctest::Contains("duplicate"), Error);
  try {
    index.Add({"b", ItemKind::kDocument, Unit({1.0f, 0.0f, 0.0f})});
    FAIL("expected mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDimensionMismatch);
  }
  CHECK_THROWS_AS(index.Query(Unit({1.0f, 0.0f, 0.0f}), 1), Error);
}

TEST_CASE("self-similarity, truncation, empty index") {
  std::mt19937_64 rng(3);
  const auto items = RandomItems(rng, 3, 16);
  VectorIndex index(16);
  CHECK(index.Query(items[0].vector, 5).empty());
  Fill(index, items);
  const auto hits = index.Query(items[1].vector, 10);
  CHECK(hits.size() == 3);
  CHECK(hits[0].item_id == "item-1");
  CHECK(hits[0].score == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("thousand items match the brute-force oracle") {
  std::mt19937_64 rng(11);
  const auto items = RandomItems(rng, 1000, 64);
  VectorIndex index(64);
  Fill(index, items);
  CHECK(index.size() == 1000);
  for (const auto& it : items) CHECK(index.contains(it.id));
  for (int q = 0; q < 50; ++q) {
    const auto query = oracle::RandomUnitVector(rng, 64);
    const auto got = index.Query(query, 10);
    CHECK(oracle::Ids(got) == oracle::Ids(oracle::BruteForceTopK(items, query, 10)));
    for (std::size_t i = 1; i < got.size(); ++i) CHECK_FALSE(RanksBefore(got[i], got[i - 1]));
    for (const auto& h : got) {
      CHECK(h.score <= 1.0 + 1e-6);
      CHECK(h.score >= -1.0 - 1e-6);
    }
  }
}

TEST_CASE("ties break by ascending id") {
  VectorIndex index(2);
  index.Add({"zeta", ItemKind::kDocument, Unit({1.0f, 0.0f})});
  index.Add({"alpha", ItemKind::kDocument, Unit({1.0f, 0.0f})});
  index.Add({"mid", ItemKind::kDocument, Unit({0.0f, 1.0f})});
  const auto hits = index.Query(Unit({1.0f, 0.0f}), 3);
  CHECK(oracle::Ids(hits) == std::vector<std::string>{"alpha", "zeta", "mid"});
}

TEST_CASE("restriction, kind filter and exclusion") {
  std::mt19937_64 rng(21);
  const auto items = RandomItems(rng, 200, 32);
  VectorIndex index(32);
  Fill(index, items);

  IdSet restrict_small;
  IdSet restrict_large;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i % 17 == 0) restrict_small.insert(items[i].id);
    if (i % 2 == 0) restrict_large.insert(items[i].id);
  }
  restrict_small.insert("not-in-index");

  for (int q = 0; q < 20; ++q) {
    const auto query = oracle::RandomUnitVector(rng, 32);
    for (const IdSet* r : {&restrict_small, &restrict_large}) {
      QueryOptions opts;
      opts.restrict_to = r;
      const auto got = index.Query(query, 8, opts);
      for (const auto& h : got) CHECK(r->contains(h.item_id));
      CHECK(oracle::Ids(got) == oracle::Ids(oracle::BruteForceTopK(items, query, 8, r)));
    }

    QueryOptions by_kind;
    by_kind.kind = ItemKind::kEntity;
    std::vector<oracle::Item> entities;
    for (const auto& it : items) {
      if (it.kind == ItemKind::kEntity) entities.push_back(it);
    }
    CHECK(oracle::Ids(index.Query(query, 8, by_kind)) == oracle::Ids(oracle::BruteForceTopK(entities, query, 8)));

    IdSet excluded = {items[0].id, items[1].id, items[2].id};
    QueryOptions excl;
    excl.exclude = &excluded;
    CHECK(oracle::Ids(index.Query(query, 8, excl)) ==
          oracle::Ids(oracle::BruteForceTopK(items, query, 8, nullptr, &excluded)));
  }
}

TEST_CASE("monotone truncation") {
  std::mt19937_64 rng(8);
  const auto items = RandomItems(rng, 300, 16);
  VectorIndex index(16);
  Fill(index, items);
  const auto query = oracle::RandomUnitVector(rng, 16);
  const auto full = index.Query(query, 25);
  for (std::size_t j = 1; j <= 25; ++j) {
    const auto prefix = index.Query(query, j);
    CHECK(prefix == std::vector<Hit>(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(j)));
  }
}

TEST_CASE("remove") {
  VectorIndex index(2);
  index.Add({"a", ItemKind::kDocument, Unit({1.0f, 0.0f})});
  index.Remove("a");
  CHECK(index.Query(Unit({1.0f, 0.0f}), 5).empty());
  try {
    index.Remove("a");
    FAIL("expected UnknownId");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnknownId);
  }

  std::mt19937_64 rng(4);
  auto items = RandomItems(rng, 100, 16);
  VectorIndex big(16);
  Fill(big, items);
  std::vector<oracle::Item> remaining;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i % 2 == 0) {
      big.Remove(items[i].id);
    } else {
      remaining.push_back(items[i]);
    }
  }
  CHECK(big.size() == 50);
  for (int q = 0; q < 20; ++q) {
    const auto query = oracle::RandomUnitVector(rng, 16);
    CHECK(oracle::Ids(big.Query(query, 10)) == oracle::Ids(oracle::BruteForceTopK(remaining, query, 10)));
  }
}

TEST_CASE("snapshot round-trips bit-exactly") {
  std::mt19937_64 rng(77);
  const auto items = RandomItems(rng, 40, 12);
  VectorIndex index(12);
  Fill(index, items);
  index.Remove("item-5");
  const auto path = std::filesystem::temp_directory_path() / "projection_index_roundtrip.bin";
  index.Save(path);
  const auto loaded = VectorIndex::Load(path);
  CHECK(loaded->dimension() == 12);
  CHECK(loaded->Ids() == index.Ids());
  for (const auto& id : index.Ids()) {
    const auto a = index.Get(id);
    const auto b = loaded->Get(id);
    CHECK(a.kind == b.kind);
    CHECK(std::memcmp(a.vector.values().data(), b.vector.values().data(), 12 * sizeof(float)) == 0);
  }
  // Saving the loaded copy reproduces the same bytes.
  const auto again = std::filesystem::temp_directory_path() / "projection_index_roundtrip2.bin";
  loaded->Save(again);
  std::ifstream fa(path, std::ios::binary), fb(again, std::ios::binary);
  std::string ba((std::istreambuf_iterator<char>(fa)), {}), bb((std::istreambuf_iterator<char>(fb)), {});
  CHECK(ba == bb);
  std::filesystem::remove(path);
  std::filesystem::remove(again);

  std::ofstream junk(path, std::ios::binary);
  junk << "nope";
  junk.close();
  CHECK_THROWS_AS(VectorIndex::Load(path), Error);
  std::filesystem::remove(path);
}

TEST_CASE("concurrent readers during writes see whole items") {
  VectorIndex index(8);
  std::mt19937_64 rng(1);
  std::vector<oracle::Item> items = RandomItems(rng, 200, 8);
  std::atomic<bool> stop{false};
  std::atomic<int> bad{0};
  std::thread reader([&] {
    while (!stop) {
      const auto hits = index.Query(items[0].vector, 5);
      for (std::size_t i = 1; i < hits.size(); ++i) {
        if (RanksBefore(hits[i], hits[i - 1])) ++bad;
      }
    }
  });
  for (const auto& it : items) index.Add({it.id, it.kind, it.vector});
  for (std::size_t i = 0; i < items.size(); i += 3) index.Remove(items[i].id);
  stop = true;
  reader.join();
  CHECK(bad == 0);
}
