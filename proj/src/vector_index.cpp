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

#include "projection/vector_index.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <mutex>

#include "projection/error.hpp"
#include "projection/kernels.hpp"

namespace projection {
namespace {

constexpr std::array<char, 4> kSnapshotMagic = {'P', 'J', 'V', 'X'};
constexpr std::uint32_t kSnapshotVersion = 1;

template <typename T>
void WriteLe(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes;
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T ReadLe(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes;
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw Error(ErrorCode::kCorruptData, "truncated index snapshot");
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(bytes[i]) << (8 * i);
  return value;
}

}  // namespace

std::string_view ItemKindName(ItemKind kind) {
  return kind == ItemKind::kDocument ? "document" : "entity";
}

std::optional<ItemKind> ParseItemKind(std::string_view name) {
  if (name == "document") return ItemKind::kDocument;
  if (name == "entity") return ItemKind::kEntity;
  return std::nullopt;
}

VectorIndex::VectorIndex(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) throw Error(ErrorCode::kInvalidArgument, "index dimension must be positive");
}

std::size_t VectorIndex::size() const {
  std::shared_lock lock(mutex_);
  return ids_.size();
}

bool VectorIndex::contains(std::string_view item_id) const {
  std::shared_lock lock(mutex_);
  return row_of_.contains(std::string(item_id));
}

void VectorIndex::CheckDimension(std::size_t dim) const {
  if (dim != dimension_) {
    throw Error(ErrorCode::kDimensionMismatch, "vector dimension " + std::to_string(dim) +
                                                   " does not match index dimension " +
                                                   std::to_string(dimension_));
  }
}

std::size_t VectorIndex::RowOf(std::string_view item_id) const {
  auto it = row_of_.find(std::string(item_id));
  if (it == row_of_.end()) throw Error(ErrorCode::kUnknownId, "unknown item id: " + std::string(item_id));
  return it->second;
}

void VectorIndex::Add(IndexedItem item) {
  if (item.item_id.empty()) throw Error(ErrorCode::kInvalidArgument, "item id must be non-empty");
  CheckDimension(item.vector.dimension());
  std::unique_lock lock(mutex_);
  if (row_of_.contains(item.item_id)) {
    throw Error(ErrorCode::kDuplicateId, "duplicate item id: " + item.item_id);
  }
  const auto values = item.vector.values();
  rows_.insert(rows_.end(), values.begin(), values.end());
  row_of_.emplace(item.item_id, ids_.size());
  ids_.push_back(std::move(item.item_id));
  kinds_.push_back(item.kind);
}

void VectorIndex::Remove(std::string_view item_id) {
  const std::string key(item_id);
  std::unique_lock lock(mutex_);
  const std::size_t row = RowOf(key);
  const std::size_t last = ids_.size() - 1;
  if (row != last) {
    std::copy_n(rows_.begin() + last * dimension_, dimension_, rows_.begin() + row * dimension_);
    ids_[row] = std::move(ids_[last]);
    kinds_[row] = kinds_[last];
    row_of_[ids_[row]] = row;
  }
  row_of_.erase(key);
  ids_.pop_back();
  kinds_.pop_back();
  rows_.resize(last * dimension_);
}

void VectorIndex::Update(std::string_view item_id, const EmbeddingVector& vector) {
  CheckDimension(vector.dimension());
  std::unique_lock lock(mutex_);
  const std::size_t row = RowOf(item_id);
  std::copy(vector.values().begin(), vector.values().end(), rows_.begin() + row * dimension_);
}

IndexedItem VectorIndex::Get(std::string_view item_id) const {
  std::shared_lock lock(mutex_);
  const std::size_t row = RowOf(item_id);
  const auto begin = rows_.begin() + row * dimension_;
  return {ids_[row], kinds_[row], EmbeddingVector(std::vector<float>(begin, begin + dimension_))};
}

std::vector<std::string> VectorIndex::Ids() const {
  std::shared_lock lock(mutex_);
  return ids_;
}

Neighborhood VectorIndex::Query(const EmbeddingVector& query, std::size_t k,
                                const QueryOptions& options) const {
  CheckDimension(query.dimension());
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be positive");

  std::shared_lock lock(mutex_);
  const std::size_t n = ids_.size();
  auto admissible = [&](std::size_t row) {
    if (options.kind && kinds_[row] != *options.kind) return false;
    if (options.exclude && options.exclude->contains(ids_[row])) return false;
    return true;
  };

  std::vector<std::pair<double, std::size_t>> scored;
  const bool sparse = options.restrict_to != nullptr && options.restrict_to->size() * 4 < n;
  if (sparse) {
    scored.reserve(options.restrict_to->size());
    for (const auto& id : *options.restrict_to) {
      auto it = row_of_.find(id);
      if (it == row_of_.end() || !admissible(it->second)) continue;
      double score = 0.0;
      kernels::serial::InnerProducts(std::span(rows_).subspan(it->second * dimension_, dimension_),
                                     dimension_, query.values(), std::span(&score, 1));
      scored.emplace_back(score, it->second);
    }
  } else {
    std::vector<double> scores(n);
    kernels::parallel::InnerProducts(rows_, dimension_, query.values(), scores);
    scored.reserve(n);
    for (std::size_t row = 0; row < n; ++row) {
      if (options.restrict_to && !options.restrict_to->contains(ids_[row])) continue;
      if (!admissible(row)) continue;
      scored.emplace_back(scores[row], row);
    }
  }

  auto before = [&](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : ids_[a.second] < ids_[b.second];
  };
  const std::size_t take = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(), before);

  Neighborhood hits;
  hits.reserve(take);
  for (std::size_t i = 0; i < take; ++i) hits.push_back({ids_[scored[i].second], scored[i].first});
  return hits;
}

void VectorIndex::Save(const std::filesystem::path& path) const {
  std::shared_lock lock(mutex_);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string() + " for writing");
  out.write(kSnapshotMagic.data(), kSnapshotMagic.size());
  WriteLe<std::uint32_t>(out, kSnapshotVersion);
  WriteLe<std::uint32_t>(out, static_cast<std::uint32_t>(dimension_));
  WriteLe<std::uint64_t>(out, ids_.size());
  for (std::size_t row = 0; row < ids_.size(); ++row) {
    WriteLe<std::uint32_t>(out, static_cast<std::uint32_t>(ids_[row].size()));
    out.write(ids_[row].data(), static_cast<std::streamsize>(ids_[row].size()));
    WriteLe<std::uint8_t>(out, static_cast<std::uint8_t>(kinds_[row]));
    for (std::size_t d = 0; d < dimension_; ++d) {
      WriteLe<std::uint32_t>(out, std::bit_cast<std::uint32_t>(rows_[row * dimension_ + d]));
    }
  }
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path.string());
}

std::unique_ptr<VectorIndex> VectorIndex::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kSnapshotMagic) throw Error(ErrorCode::kCorruptData, "not an index snapshot");
  if (ReadLe<std::uint32_t>(in) != kSnapshotVersion) {
    throw Error(ErrorCode::kCorruptData, "unsupported index snapshot version");
  }
  const auto dim = ReadLe<std::uint32_t>(in);
  const auto count = ReadLe<std::uint64_t>(in);
  auto index = std::make_unique<VectorIndex>(dim);
  for (std::uint64_t r = 0; r < count; ++r) {
    const auto len = ReadLe<std::uint32_t>(in);
    std::string id(len, '\0');
    in.read(id.data(), len);
    const auto kind = ReadLe<std::uint8_t>(in);
    if (kind > 1) throw Error(ErrorCode::kCorruptData, "bad item kind in index snapshot");
    std::vector<float> values(dim);
    for (auto& v : values) v = std::bit_cast<float>(ReadLe<std::uint32_t>(in));
    index->Add({std::move(id), static_cast<ItemKind>(kind), EmbeddingVector(std::move(values))});
  }
  return index;
}

}  // namespace projection
