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

#include "projection/knowledge_store.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <unordered_set>

#include "projection/embedder.hpp"
#include "projection/error.hpp"

namespace projection {
namespace {

using nlohmann::json;

constexpr const char* kSnapshotFile = "snapshot.json";
constexpr const char* kLogFile = "mutations.log";

std::uint64_t IdNumber(const std::string& id, std::string_view prefix) {
  if (id.rfind(prefix, 0) != 0) return 0;
  try {
    return std::stoull(id.substr(prefix.size()));
  } catch (const std::exception&) {
    return 0;
  }
}

std::optional<std::string> OptionalString(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

}  // namespace

json ToJson(const MapRecord& map) {
  return {{"mapId", map.map_id}, {"name", map.name}, {"entityIds", map.entity_ids}};
}

json ToJson(const EntityRecord& e) {
  return {{"entityId", e.entity_id},
          {"mapId", e.map_id},
          {"parentEntityId", e.parent_entity_id ? json(*e.parent_entity_id) : json(nullptr)},
          {"childrenEntityIds", e.children_entity_ids},
          {"coordinates", {e.coordinates.x, e.coordinates.y}},
          {"text", e.text}};
}

json ToJson(const DocumentRecord& d) {
  return {{"documentId", d.document_id}, {"title", d.title}, {"url", d.url}, {"text", d.text}};
}

json ToJson(const MenuState& menu) {
  return {{"selectedMapId", menu.selected_map_id ? json(*menu.selected_map_id) : json(nullptr)}};
}

KnowledgeStore::KnowledgeStore() = default;
KnowledgeStore::~KnowledgeStore() = default;

std::unique_ptr<KnowledgeStore> KnowledgeStore::Open(const std::filesystem::path& directory,
                                                     std::size_t compact_every) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + directory.string() + ": " + ec.message());

  auto store = std::make_unique<KnowledgeStore>();
  store->compact_every_ = std::max<std::size_t>(compact_every, 1);

  const auto snapshot_path = directory / kSnapshotFile;
  if (std::filesystem::exists(snapshot_path)) {
    std::ifstream in(snapshot_path);
    try {
      store->LoadState(json::parse(in));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kCorruptData, std::string("unreadable snapshot: ") + e.what());
    }
  }

  const auto log_path = directory / kLogFile;
  if (std::filesystem::exists(log_path)) {
    std::ifstream in(log_path);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) {
      if (!line.empty()) lines.push_back(std::move(line));
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
      json mutation;
      try {
        mutation = json::parse(lines[i]);
      } catch (const json::exception&) {
        // A torn final line is an unacknowledged write; anything earlier is damage.
        if (i + 1 == lines.size()) break;
        throw Error(ErrorCode::kCorruptData, "malformed mutation log line " + std::to_string(i + 1));
      }
      store->Replay(mutation);
    }
  }

  store->directory_ = directory;
  store->log_.open(log_path, std::ios::app);
  if (!store->log_) throw Error(ErrorCode::kIoError, "cannot open " + log_path.string());
  return store;
}

void KnowledgeStore::Replay(const json& mutation) {
  const auto seq = mutation.at("seq").get<std::uint64_t>();
  if (seq <= sequence_) return;  // already folded into the snapshot
  Apply(mutation, [] {});
  sequence_ = seq;
}

void KnowledgeStore::AppendLog(const json& mutation) {
  if (!directory_) return;
  log_ << mutation.dump() << '\n';
  log_.flush();
  if (!log_) throw Error(ErrorCode::kIoError, "failed to append to mutation log");
}

void KnowledgeStore::Mutate(json mutation) {
  mutation["seq"] = sequence_ + 1;
  Apply(mutation, [&] { AppendLog(mutation); });
  ++sequence_;
  if (directory_ && ++since_compaction_ >= compact_every_) CompactLocked();
}

EntityRecord& KnowledgeStore::EntityOrThrow(const std::string& id) {
  auto it = entities_.find(id);
  if (it == entities_.end()) throw Error(ErrorCode::kUnknownId, "unknown entity " + id);
  return it->second;
}

const EntityRecord& KnowledgeStore::EntityOrThrow(const std::string& id) const {
  auto it = entities_.find(id);
  if (it == entities_.end()) throw Error(ErrorCode::kUnknownId, "unknown entity " + id);
  return it->second;
}

MapRecord& KnowledgeStore::MapOrThrow(const std::string& id) {
  auto it = maps_.find(id);
  if (it == maps_.end()) throw Error(ErrorCode::kUnknownMap, "unknown map " + id);
  return it->second;
}

const MapRecord& KnowledgeStore::MapOrThrow(const std::string& id) const {
  auto it = maps_.find(id);
  if (it == maps_.end()) throw Error(ErrorCode::kUnknownMap, "unknown map " + id);
  return it->second;
}

namespace {

// JSON has no encoding for NaN or infinity, so they could never be replayed.
Point2 Coordinates(const json& m) {
  const auto& x = m.at("x");
  const auto& y = m.at("y");
  if (!x.is_number() || !y.is_number() || !std::isfinite(x.get<double>()) || !std::isfinite(y.get<double>())) {
    throw Error(ErrorCode::kInvalidArgument, "coordinates must be finite numbers");
  }
  return {x.get<double>(), y.get<double>()};
}

}  // namespace

void KnowledgeStore::Unlink(EntityRecord& child) {
  if (!child.parent_entity_id) return;
  auto& siblings = EntityOrThrow(*child.parent_entity_id).children_entity_ids;
  siblings.erase(std::remove(siblings.begin(), siblings.end(), child.entity_id), siblings.end());
  child.parent_entity_id.reset();
}

// Every handler validates completely before calling `commit` and only then
// mutates, so a rejected mutation leaves no trace in memory or in the log.
void KnowledgeStore::Apply(const json& m, const Commit& commit) {
  const std::string op = m.at("op").get<std::string>();

  if (op == "create_map") {
    const auto id = m.at("map_id").get<std::string>();
    const auto name = m.at("name").get<std::string>();
    if (!HasContent(name)) throw Error(ErrorCode::kInvalidArgument, "map name must be non-empty");
    if (maps_.contains(id)) throw Error(ErrorCode::kDuplicateId, "duplicate map id " + id);
    commit();
    maps_.emplace(id, MapRecord{id, name, {}});
    map_order_.push_back(id);
    next_map_ = std::max(next_map_, IdNumber(id, "map-") + 1);

  } else if (op == "create_entity") {
    const auto id = m.at("entity_id").get<std::string>();
    const auto map_id = m.at("map_id").get<std::string>();
    const auto text = m.at("text").get<std::string>();
    const auto parent = OptionalString(m, "parent_id");
    auto& map = MapOrThrow(map_id);
    if (!HasContent(text)) throw Error(ErrorCode::kEmptyText, "entity text must be non-empty");
    if (entities_.contains(id)) throw Error(ErrorCode::kDuplicateId, "duplicate entity id " + id);
    if (parent && EntityOrThrow(*parent).map_id != map_id) {
      throw Error(ErrorCode::kCrossMapLink, "parent " + *parent + " belongs to another map");
    }
    const Point2 at = Coordinates(m);
    commit();
    EntityRecord e{id, map_id, parent, {}, at, text};
    entities_.emplace(id, std::move(e));
    map.entity_ids.push_back(id);
    if (parent) EntityOrThrow(*parent).children_entity_ids.push_back(id);
    next_entity_ = std::max(next_entity_, IdNumber(id, "ent-") + 1);

  } else if (op == "attach_child") {
    const auto parent_id = m.at("parent_id").get<std::string>();
    const auto child_id = m.at("child_id").get<std::string>();
    auto& parent = EntityOrThrow(parent_id);
    auto& child = EntityOrThrow(child_id);
    if (parent.map_id != child.map_id) {
      throw Error(ErrorCode::kCrossMapLink, "cannot link entities on different maps");
    }
    for (std::optional<std::string> cur = parent_id; cur; cur = EntityOrThrow(*cur).parent_entity_id) {
      if (*cur == child_id) {
        throw Error(ErrorCode::kCycleDetected, "attaching " + child_id + " under " + parent_id + " creates a cycle");
      }
    }
    commit();
    Unlink(child);
    child.parent_entity_id = parent_id;
    parent.children_entity_ids.push_back(child_id);

  } else if (op == "detach") {
    auto& child = EntityOrThrow(m.at("child_id").get<std::string>());
    commit();
    Unlink(child);

  } else if (op == "delete_entity") {
    const auto id = m.at("entity_id").get<std::string>();
    auto& entity = EntityOrThrow(id);
    commit();
    const auto grandparent = entity.parent_entity_id;
    const auto children = entity.children_entity_ids;
    for (const auto& c : children) EntityOrThrow(c).parent_entity_id = grandparent;
    if (grandparent) {
      auto& siblings = EntityOrThrow(*grandparent).children_entity_ids;
      auto pos = std::find(siblings.begin(), siblings.end(), id);
      pos = siblings.erase(pos);
      siblings.insert(pos, children.begin(), children.end());
    }
    auto& ids = MapOrThrow(entity.map_id).entity_ids;
    ids.erase(std::remove(ids.begin(), ids.end(), id), ids.end());
    entities_.erase(id);

  } else if (op == "move_entity") {
    auto& entity = EntityOrThrow(m.at("entity_id").get<std::string>());
    const Point2 to = Coordinates(m);
    commit();
    entity.coordinates = to;

  } else if (op == "retext_entity") {
    auto& entity = EntityOrThrow(m.at("entity_id").get<std::string>());
    const auto text = m.at("text").get<std::string>();
    if (!HasContent(text)) throw Error(ErrorCode::kEmptyText, "entity text must be non-empty");
    commit();
    entity.text = text;

  } else if (op == "add_document") {
    const auto id = m.at("document_id").get<std::string>();
    const auto text = m.at("text").get<std::string>();
    if (!HasContent(text)) throw Error(ErrorCode::kEmptyText, "document text must be non-empty");
    if (documents_.contains(id)) throw Error(ErrorCode::kDuplicateId, "duplicate document id " + id);
    commit();
    documents_.emplace(id, DocumentRecord{id, m.at("title").get<std::string>(), m.at("url").get<std::string>(), text});
    document_order_.push_back(id);
    next_document_ = std::max(next_document_, IdNumber(id, "doc-") + 1);

  } else if (op == "select_map") {
    const auto id = m.at("map_id").get<std::string>();
    MapOrThrow(id);
    commit();
    menu_.selected_map_id = id;

  } else {
    throw Error(ErrorCode::kCorruptData, "unknown mutation op " + op);
  }
}

MapRecord KnowledgeStore::CreateMap(const std::string& name) {
  std::unique_lock lock(mutex_);
  const std::string id = "map-" + std::to_string(next_map_);
  Mutate({{"op", "create_map"}, {"map_id", id}, {"name", name}});
  return maps_.at(id);
}

EntityRecord KnowledgeStore::CreateEntity(const std::string& map_id, const std::string& text,
                                          Point2 coordinates,
                                          const std::optional<std::string>& parent_entity_id) {
  std::unique_lock lock(mutex_);
  const std::string id = "ent-" + std::to_string(next_entity_);
  json m = {{"op", "create_entity"}, {"entity_id", id}, {"map_id", map_id}, {"text", text},
            {"x", coordinates.x}, {"y", coordinates.y}};
  if (parent_entity_id) m["parent_id"] = *parent_entity_id;
  Mutate(std::move(m));
  return entities_.at(id);
}

void KnowledgeStore::AttachChild(const std::string& parent_id, const std::string& child_id) {
  std::unique_lock lock(mutex_);
  Mutate({{"op", "attach_child"}, {"parent_id", parent_id}, {"child_id", child_id}});
}

void KnowledgeStore::Detach(const std::string& child_id) {
  std::unique_lock lock(mutex_);
  Mutate({{"op", "detach"}, {"child_id", child_id}});
}

void KnowledgeStore::DeleteEntity(const std::string& entity_id) {
  std::unique_lock lock(mutex_);
  Mutate({{"op", "delete_entity"}, {"entity_id", entity_id}});
}

void KnowledgeStore::MoveEntity(const std::string& entity_id, Point2 coordinates) {
  std::unique_lock lock(mutex_);
  Mutate({{"op", "move_entity"}, {"entity_id", entity_id}, {"x", coordinates.x}, {"y", coordinates.y}});
}

void KnowledgeStore::RetextEntity(const std::string& entity_id, const std::string& text) {
  std::unique_lock lock(mutex_);
  Mutate({{"op", "retext_entity"}, {"entity_id", entity_id}, {"text", text}});
}

DocumentRecord KnowledgeStore::AddDocument(const std::string& title, const std::string& url,
                                           const std::string& text) {
  std::unique_lock lock(mutex_);
  const std::string id = "doc-" + std::to_string(next_document_);
  Mutate({{"op", "add_document"}, {"document_id", id}, {"title", title}, {"url", url}, {"text", text}});
  return documents_.at(id);
}

MenuState KnowledgeStore::SelectMap(const std::string& map_id) {
  std::unique_lock lock(mutex_);
  Mutate({{"op", "select_map"}, {"map_id", map_id}});
  return menu_;
}

MapView KnowledgeStore::GetMap(const std::string& map_id) const {
  std::shared_lock lock(mutex_);
  MapView view{MapOrThrow(map_id), {}};
  for (const auto& id : view.map.entity_ids) view.entities.push_back(entities_.at(id));
  return view;
}

std::vector<MapRecord> KnowledgeStore::ListMaps() const {
  std::shared_lock lock(mutex_);
  std::vector<MapRecord> out;
  for (const auto& id : map_order_) out.push_back(maps_.at(id));
  return out;
}

EntityRecord KnowledgeStore::GetEntity(const std::string& entity_id) const {
  std::shared_lock lock(mutex_);
  return EntityOrThrow(entity_id);
}

DocumentRecord KnowledgeStore::GetDocument(const std::string& document_id) const {
  std::shared_lock lock(mutex_);
  auto it = documents_.find(document_id);
  if (it == documents_.end()) throw Error(ErrorCode::kUnknownId, "unknown document " + document_id);
  return it->second;
}

std::vector<DocumentRecord> KnowledgeStore::Documents() const {
  std::shared_lock lock(mutex_);
  std::vector<DocumentRecord> out;
  out.reserve(document_order_.size());
  for (const auto& id : document_order_) out.push_back(documents_.at(id));
  return out;
}

std::vector<EntityRecord> KnowledgeStore::Entities() const {
  std::shared_lock lock(mutex_);
  std::vector<EntityRecord> out;
  for (const auto& map_id : map_order_) {
    for (const auto& id : maps_.at(map_id).entity_ids) out.push_back(entities_.at(id));
  }
  return out;
}

MenuState KnowledgeStore::Menu() const {
  std::shared_lock lock(mutex_);
  return menu_;
}

std::optional<std::string> KnowledgeStore::TextOf(std::string_view item_id) const {
  std::shared_lock lock(mutex_);
  const std::string key(item_id);
  if (auto it = documents_.find(key); it != documents_.end()) return it->second.text;
  if (auto it = entities_.find(key); it != entities_.end()) return it->second.text;
  return std::nullopt;
}

bool KnowledgeStore::HasMap(const std::string& map_id) const {
  std::shared_lock lock(mutex_);
  return maps_.contains(map_id);
}

std::size_t KnowledgeStore::document_count() const {
  std::shared_lock lock(mutex_);
  return documents_.size();
}

std::size_t KnowledgeStore::entity_count() const {
  std::shared_lock lock(mutex_);
  return entities_.size();
}

std::vector<std::string> KnowledgeStore::CheckIntegrity() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> problems;
  auto report = [&](std::string p) { problems.push_back(std::move(p)); };

  if (menu_.selected_map_id && !maps_.contains(*menu_.selected_map_id)) {
    report("menu selects missing map " + *menu_.selected_map_id);
  }

  std::unordered_set<std::string> listed;
  for (const auto& [map_id, map] : maps_) {
    std::unordered_set<std::string> seen;
    for (const auto& id : map.entity_ids) {
      if (!seen.insert(id).second) report("map " + map_id + " lists " + id + " twice");
      auto it = entities_.find(id);
      if (it == entities_.end()) {
        report("map " + map_id + " lists missing entity " + id);
      } else if (it->second.map_id != map_id) {
        report("entity " + id + " listed on " + map_id + " but belongs to " + it->second.map_id);
      }
      listed.insert(id);
    }
  }

  for (const auto& [id, e] : entities_) {
    if (!listed.contains(id)) report("entity " + id + " is not listed on its map");
    if (!maps_.contains(e.map_id)) report("entity " + id + " on missing map " + e.map_id);
    if (!HasContent(e.text)) report("entity " + id + " has empty text");
    if (e.parent_entity_id) {
      auto p = entities_.find(*e.parent_entity_id);
      if (p == entities_.end()) {
        report("entity " + id + " has missing parent " + *e.parent_entity_id);
      } else {
        const auto& siblings = p->second.children_entity_ids;
        if (std::count(siblings.begin(), siblings.end(), id) != 1) {
          report("parent " + p->first + " does not list child " + id + " exactly once");
        }
        if (p->second.map_id != e.map_id) report("cross-map link " + p->first + " -> " + id);
      }
    }
    for (const auto& c : e.children_entity_ids) {
      auto ch = entities_.find(c);
      if (ch == entities_.end()) {
        report("entity " + id + " lists missing child " + c);
      } else if (ch->second.parent_entity_id != id) {
        report("child " + c + " of " + id + " points at another parent");
      }
    }
    // Walking up must terminate within |entities| steps.
    std::size_t steps = 0;
    for (auto cur = e.parent_entity_id; cur; ++steps) {
      if (steps > entities_.size()) {
        report("cycle through entity " + id);
        break;
      }
      auto p = entities_.find(*cur);
      if (p == entities_.end()) break;
      cur = p->second.parent_entity_id;
    }
  }

  for (const auto& [id, d] : documents_) {
    if (!HasContent(d.text)) report("document " + id + " has empty text");
  }
  return problems;
}

json KnowledgeStore::Dump() const {
  std::shared_lock lock(mutex_);
  return DumpLocked();
}

json KnowledgeStore::DumpLocked() const {
  json maps = json::array();
  for (const auto& map_id : map_order_) {
    const auto& map = maps_.at(map_id);
    json entities = json::array();
    for (const auto& id : map.entity_ids) entities.push_back(ToJson(entities_.at(id)));
    json m = ToJson(map);
    m["entities"] = std::move(entities);
    maps.push_back(std::move(m));
  }
  json documents = json::array();
  for (const auto& id : document_order_) documents.push_back(ToJson(documents_.at(id)));
  return {{"format", "projection-store/1"},
          {"sequence", sequence_},
          {"counters", {{"map", next_map_}, {"entity", next_entity_}, {"document", next_document_}}},
          {"menu", ToJson(menu_)},
          {"maps", std::move(maps)},
          {"documents", std::move(documents)}};
}

void KnowledgeStore::LoadState(const json& state) {
  if (state.value("format", "") != "projection-store/1") {
    throw Error(ErrorCode::kCorruptData, "unknown snapshot format");
  }
  for (const auto& m : state.at("maps")) {
    MapRecord map{m.at("mapId"), m.at("name"), m.at("entityIds").get<std::vector<std::string>>()};
    for (const auto& e : m.at("entities")) {
      EntityRecord rec;
      rec.entity_id = e.at("entityId");
      rec.map_id = e.at("mapId");
      rec.parent_entity_id = OptionalString(e, "parentEntityId");
      rec.children_entity_ids = e.at("childrenEntityIds").get<std::vector<std::string>>();
      rec.coordinates = {e.at("coordinates").at(0).get<double>(), e.at("coordinates").at(1).get<double>()};
      rec.text = e.at("text");
      entities_.emplace(rec.entity_id, std::move(rec));
    }
    map_order_.push_back(map.map_id);
    maps_.emplace(map.map_id, std::move(map));
  }
  for (const auto& d : state.at("documents")) {
    DocumentRecord rec{d.at("documentId"), d.at("title"), d.at("url"), d.at("text")};
    document_order_.push_back(rec.document_id);
    documents_.emplace(rec.document_id, std::move(rec));
  }
  menu_.selected_map_id = OptionalString(state.at("menu"), "selectedMapId");
  const auto& counters = state.at("counters");
  next_map_ = counters.at("map");
  next_entity_ = counters.at("entity");
  next_document_ = counters.at("document");
  sequence_ = state.at("sequence");
}

void KnowledgeStore::Compact() {
  std::unique_lock lock(mutex_);
  CompactLocked();
}

void KnowledgeStore::CompactLocked() {
  if (!directory_) return;
  since_compaction_ = 0;
  const auto tmp = *directory_ / (std::string(kSnapshotFile) + ".tmp");
  const json state = DumpLocked();
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << state.dump() << '\n';
    if (!out) throw Error(ErrorCode::kIoError, "failed writing snapshot");
  }
  std::filesystem::rename(tmp, *directory_ / kSnapshotFile);
  // Entries up to `sequence_` are now in the snapshot and skipped on replay,
  // so a crash before this truncation is harmless.
  log_.close();
  log_.open(*directory_ / kLogFile, std::ios::trunc);
  if (!log_) throw Error(ErrorCode::kIoError, "cannot reopen mutation log");
}

}  // namespace projection
