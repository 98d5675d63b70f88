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

#include <map>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "projection/context_search.hpp"
#include "projection/error.hpp"

using namespace projection;

namespace {

const std::vector<std::string> kWords = {
    "investing", "stocks", "bonds", "value", "growth", "dividend", "market", "index", "fund",
    "zebra", "migration", "savanna", "lion", "herd", "river", "climate", "rain", "forest",
    "neural", "network", "training", "gradient", "model", "layer", "data", "vector", "search"};

struct Corpus {
  std::vector<oracle::Item> items;
  std::unique_ptr<VectorIndex> index;
};

Corpus MakeCorpus(const Embedder& embedder, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, kWords.size() - 1);
  Corpus c;
  c.index = std::make_unique<VectorIndex>(embedder.dimension());
  for (std::size_t i = 0; i < n; ++i) {
    std::string text = kWords[pick(rng)] + " " + kWords[pick(rng)] + " " + kWords[pick(rng)];
    const auto kind = i % 4 == 0 ? ItemKind::kEntity : ItemKind::kDocument;
    c.items.push_back({"doc-" + std::to_string(i), kind, embedder.Embed(text)});
    c.index->Add({c.items.back().id, kind, c.items.back().vector});
  }
  return c;
}

EntityTreeNode Node(std::string id, std::string text, std::vector<EntityTreeNode> children = {}) {
  return {std::move(id), std::move(text), std::move(children), std::nullopt};
}

// Reference: materialize each level's candidate set explicitly.
void NaiveSearch(const EntityTreeNode& node, const std::unordered_set<std::string>* candidates,
                 const Corpus& corpus, const Embedder& embedder, const ContextSearchParams& params,
                 std::vector<std::pair<std::string, std::vector<std::string>>>& out) {
  const auto q = embedder.Embed(node.text);
  const auto neighborhood = oracle::BruteForceTopK(corpus.items, q, params.root_breadth, candidates);
  auto ids = oracle::Ids(neighborhood);
  std::unordered_set<std::string> own(ids.begin(), ids.end());
  if (ids.size() > params.per_node_k) ids.resize(params.per_node_k);
  out.emplace_back(node.node_id, ids);
  for (const auto& child : node.children) NaiveSearch(child, &own, corpus, embedder, params, out);
}

}  // namespace

TEST_CASE("single node equals a flat query") {
  LocalEmbedder embedder(EmbedderConfig{});
  const auto corpus = MakeCorpus(embedder, 80, 1);
  ContextSearchParams params;
  params.root_breadth = 30;
  params.per_node_k = 7;
  const auto results = SearchTree(Node("root", "value investing"), params, *corpus.index, embedder);
  REQUIRE(results.size() == 1);
  CHECK(results[0].node_id == "root");
  CHECK_FALSE(results[0].parent_id.has_value());
  CHECK(results[0].hits == corpus.index->Query(embedder.Embed("value investing"), 7));
}

TEST_CASE("children stay inside the parent's neighborhood") {
  LocalEmbedder embedder(EmbedderConfig{});
  const auto corpus = MakeCorpus(embedder, 200, 2);
  ContextSearchParams params;
  params.root_breadth = 25;
  params.per_node_k = 10;
  const auto tree = Node("root", "market investing",
                         {Node("a", "dividend bonds"), Node("b", "zebra herd"), Node("c", "neural vector")});
  const auto results = SearchTree(tree, params, *corpus.index, embedder);
  REQUIRE(results.size() == 4);

  const auto root_ids = oracle::Ids(oracle::BruteForceTopK(corpus.items, embedder.Embed("market investing"), 25));
  const std::unordered_set<std::string> root_set(root_ids.begin(), root_ids.end());
  for (std::size_t i = 1; i < results.size(); ++i) {
    CHECK(results[i].parent_id == std::optional<std::string>("root"));
    CHECK(results[i].hits.size() == 10);
    for (const auto& h : results[i].hits) CHECK(root_set.count(h.item_id) == 1);
  }
}

TEST_CASE("three-level chain matches the naive reference") {
  LocalEmbedder embedder(EmbedderConfig{});
  const auto corpus = MakeCorpus(embedder, 50, 3);
  ContextSearchParams params;
  params.root_breadth = 20;
  params.per_node_k = 5;
  const auto tree = Node("root", "forest climate", {Node("a", "rain river", {Node("b", "lion savanna")})});
  const auto results = SearchTree(tree, params, *corpus.index, embedder);

  std::vector<std::pair<std::string, std::vector<std::string>>> expected;
  NaiveSearch(tree, nullptr, corpus, embedder, params, expected);
  REQUIRE(results.size() == expected.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    CHECK(results[i].node_id == expected[i].first);
    CHECK(oracle::Ids(results[i].hits) == expected[i].second);
  }
}

TEST_CASE("depth-first order and sibling independence") {
  LocalEmbedder embedder(EmbedderConfig{});
  const auto corpus = MakeCorpus(embedder, 120, 4);
  ContextSearchParams params;
  params.root_breadth = 40;
  params.per_node_k = 6;
  const auto tree = Node("r", "data model",
                         {Node("x", "gradient training", {Node("x1", "layer network")}), Node("y", "stocks fund")});
  const auto results = SearchTree(tree, params, *corpus.index, embedder);
  std::vector<std::string> order;
  for (const auto& r : results) order.push_back(r.node_id);
  CHECK(order == std::vector<std::string>{"r", "x", "x1", "y"});

  const auto swapped = Node("r", "data model",
                            {Node("y", "stocks fund"), Node("x", "gradient training", {Node("x1", "layer network")})});
  const auto again = SearchTree(swapped, params, *corpus.index, embedder);
  std::map<std::string, Neighborhood> by_id;
  for (const auto& r : results) by_id[r.node_id] = r.hits;
  for (const auto& r : again) CHECK(by_id.at(r.node_id) == r.hits);

  // Determinism.
  const auto third = SearchTree(tree, params, *corpus.index, embedder);
  for (std::size_t i = 0; i < results.size(); ++i) CHECK(third[i].hits == results[i].hits);
}

TEST_CASE("kind filter and exclusion apply at every level") {
  LocalEmbedder embedder(EmbedderConfig{});
  const auto corpus = MakeCorpus(embedder, 100, 5);
  ContextSearchParams params;
  params.root_breadth = 30;
  params.per_node_k = 8;
  params.kind_filter = ItemKind::kEntity;
  params.exclude = {"doc-0", "doc-4"};
  const auto results =
      SearchTree(Node("r", "search vector", {Node("c", "index data")}), params, *corpus.index, embedder);
  for (const auto& r : results) {
    for (const auto& h : r.hits) {
      CHECK(corpus.index->Get(h.item_id).kind == ItemKind::kEntity);
      CHECK(params.exclude.count(h.item_id) == 0);
    }
  }
}

TEST_CASE("tree validation") {
  LocalEmbedder embedder(EmbedderConfig{});
  const auto corpus = MakeCorpus(embedder, 10, 6);
  ContextSearchParams params;
  params.root_breadth = 5;
  params.per_node_k = 3;

  try {
    SearchTree(Node("r", "a", {Node("r", "b")}), params, *corpus.index, embedder);
    FAIL("expected InvalidTree");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidTree);
  }
  CHECK_THROWS_AS(SearchTree(Node("r", "a", {Node("c", "   ")}), params, *corpus.index, embedder), EmptyTextError);

  ContextSearchParams bad = params;
  bad.per_node_k = 6;
  CHECK_THROWS_AS(SearchTree(Node("r", "a"), bad, *corpus.index, embedder), Error);

  VectorIndex other(8);
  try {
    SearchTree(Node("r", "a"), params, other, embedder);
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDimensionMismatch);
  }
}

TEST_CASE("group search") {
  LocalEmbedder embedder(EmbedderConfig{});
  const auto corpus = MakeCorpus(embedder, 30, 7);

  SUBCASE("singleton equals a query with the member excluded") {
    const auto& member = corpus.items[3];
    const auto got = GroupSearch({member.id}, 5, *corpus.index);
    IdSet excluded = {member.id};
    const auto expected = oracle::BruteForceTopK(corpus.items, member.vector, 5, nullptr, &excluded);
    CHECK(oracle::Ids(got) == oracle::Ids(expected));
  }

  SUBCASE("repeated member collapses to the singleton") {
    CHECK(GroupSearch({"doc-3", "doc-3"}, 5, *corpus.index) == GroupSearch({"doc-3"}, 5, *corpus.index));
  }

  SUBCASE("identical vectors give the singleton's direction") {
    VectorIndex index(embedder.dimension());
    for (const auto& it : corpus.items) index.Add({it.id, it.kind, it.vector});
    index.Add({"twin", ItemKind::kDocument, corpus.items[3].vector});
    const auto pair = GroupSearch({"doc-3", "twin"}, 5, index);
    auto single = GroupSearch({"doc-3"}, 6, index);
    single.erase(std::remove_if(single.begin(), single.end(), [](const Hit& h) { return h.item_id == "twin"; }),
                 single.end());
    single.resize(5);
    CHECK(oracle::Ids(pair) == oracle::Ids(single));
  }

  SUBCASE("group of three matches the centroid scan oracle") {
    const std::vector<std::string> members = {"doc-1", "doc-8", "doc-20"};
    std::vector<double> centroid(embedder.dimension(), 0.0);
    for (const auto& id : members) {
      const auto& v = std::find_if(corpus.items.begin(), corpus.items.end(), [&](const auto& it) { return it.id == id; })->vector;
      for (std::size_t d = 0; d < centroid.size(); ++d) centroid[d] += v[d];
    }
    double norm = 0.0;
    for (double c : centroid) norm += c * c;
    norm = std::sqrt(norm);
    std::vector<float> unit(centroid.size());
    for (std::size_t d = 0; d < unit.size(); ++d) unit[d] = static_cast<float>(centroid[d] / norm);
    IdSet excluded(members.begin(), members.end());
    const auto expected = oracle::BruteForceTopK(corpus.items, EmbeddingVector(unit), 10, nullptr, &excluded);
    const auto got = GroupSearch(members, 10, *corpus.index);
    CHECK(oracle::Ids(got) == oracle::Ids(expected));
    for (const auto& h : got) CHECK(excluded.count(h.item_id) == 0);
  }

  SUBCASE("errors") {
    try {
      GroupSearch({"missing"}, 3, *corpus.index);
      FAIL("expected UnknownId");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kUnknownId);
    }
    VectorIndex index(2);
    index.Add({"up", ItemKind::kDocument, EmbeddingVector({0.0f, 1.0f})});
    index.Add({"down", ItemKind::kDocument, EmbeddingVector({0.0f, -1.0f})});
    try {
      GroupSearch({"up", "down"}, 1, index);
      FAIL("expected DegenerateCentroid");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kDegenerateCentroid);
    }
  }
}
