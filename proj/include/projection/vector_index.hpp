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
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "projection/embedder.hpp"

namespace projection {

enum class ItemKind : std::uint8_t { kDocument = 0, kEntity = 1 };

std::string_view ItemKindName(ItemKind kind);
std::optional<ItemKind> ParseItemKind(std::string_view name);

struct IndexedItem {
  std::string item_id;
  ItemKind kind = ItemKind::kDocument;
  EmbeddingVector vector;
};

struct Hit {
  std::string item_id;
  double score = 0.0;

  friend bool operator==(const Hit&, const Hit&) = default;
};

/// Hits sorted by descending score, ties by ascending item id.
using Neighborhood = std::vector<Hit>;

/// Ordering used by every ranked list in the engine.
inline bool RanksBefore(const Hit& a, const Hit& b) {
  return a.score != b.score ? a.score > b.score : a.item_id < b.item_id;
}

using IdSet = std::unordered_set<std::string>;

struct QueryOptions {
  const IdSet* restrict_to = nullptr;  // candidates must be members when set
  std::optional<ItemKind> kind;        // candidates must have this kind when set
  const IdSet* exclude = nullptr;      // never returned when set
};

/// Exact inner-product index over unit vectors. Readers share a lock and see
/// a consistent snapshot; add/remove take it exclusively.
class VectorIndex {
 public:
  explicit VectorIndex(std::size_t dimension);

  VectorIndex(const VectorIndex&) = delete;
  VectorIndex& operator=(const VectorIndex&) = delete;

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const;
  bool contains(std::string_view item_id) const;

  void Add(IndexedItem item);
  void Remove(std::string_view item_id);
  /// Replaces the vector of an existing item.
  void Update(std::string_view item_id, const EmbeddingVector& vector);

  Neighborhood Query(const EmbeddingVector& query, std::size_t k, const QueryOptions& options = {}) const;

  /// Copy of one stored item; throws kUnknownId.
  IndexedItem Get(std::string_view item_id) const;
  std::vector<std::string> Ids() const;

  /// Binary snapshot; see docs/formats.md for the layout.
  void Save(const std::filesystem::path& path) const;
  static std::unique_ptr<VectorIndex> Load(const std::filesystem::path& path);

 private:
  std::size_t RowOf(std::string_view item_id) const;
  void CheckDimension(std::size_t dim) const;

  std::size_t dimension_;
  mutable std::shared_mutex mutex_;
  std::vector<std::string> ids_;
  std::vector<ItemKind> kinds_;
  std::vector<float> rows_;  // ids_.size() * dimension_
  std::unordered_map<std::string, std::size_t> row_of_;
};

}  // namespace projection
