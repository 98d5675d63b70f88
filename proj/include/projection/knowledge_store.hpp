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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "projection/geometry.hpp"

namespace projection {

struct MenuState {
  std::optional<std::string> selected_map_id;
};

struct MapRecord {
  std::string map_id;
  std::string name;
  std::vector<std::string> entity_ids;
};

struct EntityRecord {
  std::string entity_id;
  std::string map_id;
  std::optional<std::string> parent_entity_id;
  std::vector<std::string> children_entity_ids;
  Point2 coordinates;
  std::string text;
};

struct DocumentRecord {
  std::string document_id;
  std::string title;
  std::string url;
  std::string text;
};

struct MapView {
  MapRecord map;
  std::vector<EntityRecord> entities;  // in map.entity_ids order
};

nlohmann::json ToJson(const MapRecord& map);
nlohmann::json ToJson(const EntityRecord& entity);
nlohmann::json ToJson(const DocumentRecord& document);
nlohmann::json ToJson(const MenuState& menu);

/// Maps, entities (a forest per map), documents and menu selection.
///
/// Opened on a directory, every acknowledged mutation is appended to
/// `mutations.log` (one JSON object per line) before it is applied; every
/// `compact_every` mutations the full state is written to `snapshot.json`
/// and the log is truncated. Reopening loads the snapshot and replays the
/// log entries with a later sequence number. See docs/formats.md.
class KnowledgeStore {
 public:
  /// In-memory store with no persistence.
  KnowledgeStore();
  ~KnowledgeStore();

  static std::unique_ptr<KnowledgeStore> Open(const std::filesystem::path& directory,
                                              std::size_t compact_every = 1000);

  KnowledgeStore(const KnowledgeStore&) = delete;
  KnowledgeStore& operator=(const KnowledgeStore&) = delete;

  MapRecord CreateMap(const std::string& name);
  EntityRecord CreateEntity(const std::string& map_id, const std::string& text, Point2 coordinates,
                            const std::optional<std::string>& parent_entity_id = std::nullopt);
  void AttachChild(const std::string& parent_id, const std::string& child_id);
  void Detach(const std::string& child_id);
  /// Children of the deleted entity take its place under its parent (or become roots).
  void DeleteEntity(const std::string& entity_id);
  void MoveEntity(const std::string& entity_id, Point2 coordinates);
  void RetextEntity(const std::string& entity_id, const std::string& text);
  DocumentRecord AddDocument(const std::string& title, const std::string& url, const std::string& text);
  MenuState SelectMap(const std::string& map_id);

  MapView GetMap(const std::string& map_id) const;
  std::vector<MapRecord> ListMaps() const;
  EntityRecord GetEntity(const std::string& entity_id) const;
  DocumentRecord GetDocument(const std::string& document_id) const;
  std::vector<DocumentRecord> Documents() const;
  std::vector<EntityRecord> Entities() const;
  MenuState Menu() const;
  std::optional<std::string> TextOf(std::string_view item_id) const;
  bool HasMap(const std::string& map_id) const;

  std::size_t document_count() const;
  std::size_t entity_count() const;

  /// Every violated invariant, empty when the store is consistent.
  std::vector<std::string> CheckIntegrity() const;

  /// Canonical full state; equal dumps mean equivalent stores.
  nlohmann::json Dump() const;

  /// Writes the snapshot and truncates the log now.
  void Compact();

 private:
  using Commit = std::function<void()>;

  void Mutate(nlohmann::json mutation);
  void Apply(const nlohmann::json& mutation, const Commit& commit);
  void Replay(const nlohmann::json& mutation);
  void LoadState(const nlohmann::json& state);
  void CompactLocked();
  nlohmann::json DumpLocked() const;
  void AppendLog(const nlohmann::json& mutation);

  EntityRecord& EntityOrThrow(const std::string& id);
  const EntityRecord& EntityOrThrow(const std::string& id) const;
  MapRecord& MapOrThrow(const std::string& id);
  const MapRecord& MapOrThrow(const std::string& id) const;
  void Unlink(EntityRecord& child);

  mutable std::shared_mutex mutex_;

  std::unordered_map<std::string, MapRecord> maps_;
  std::vector<std::string> map_order_;
  std::unordered_map<std::string, EntityRecord> entities_;
  std::unordered_map<std::string, DocumentRecord> documents_;
  std::vector<std::string> document_order_;
  MenuState menu_;
  std::uint64_t next_map_ = 1;
  std::uint64_t next_entity_ = 1;
  std::uint64_t next_document_ = 1;
  std::uint64_t sequence_ = 0;

  std::optional<std::filesystem::path> directory_;
  std::ofstream log_;
  std::size_t compact_every_ = 1000;
  std::size_t since_compaction_ = 0;
};

}  // namespace projection
