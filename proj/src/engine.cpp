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

#include "projection/engine.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <unordered_map>

#include "projection/error.hpp"
#include "projection/spatial_projection.hpp"

namespace projection {

Engine::Engine(EngineConfig config) : Engine(config, MakeEmbedder(config.embedder)) {}

Engine::Engine(EngineConfig config, std::unique_ptr<Embedder> embedder)
    : config_(std::move(config)), embedder_(std::move(embedder)) {
  config_.tsne.seed = config_.seed;
  config_.tsne.Validate();
  store_ = config_.data_dir ? KnowledgeStore::Open(*config_.data_dir, config_.compact_every)
                            : std::make_unique<KnowledgeStore>();
  index_ = std::make_unique<VectorIndex>(embedder_->dimension());
  RebuildIndex();
}

void Engine::RebuildIndex() {
  const auto documents = store_->Documents();
  const auto entities = store_->Entities();
  std::vector<std::string> texts;
  texts.reserve(documents.size() + entities.size());
  for (const auto& d : documents) texts.push_back(d.text);
  for (const auto& e : entities) texts.push_back(e.text);
  auto vectors = embedder_->EmbedBatch(texts);
  for (std::size_t i = 0; i < documents.size(); ++i) {
    index_->Add({documents[i].document_id, ItemKind::kDocument, std::move(vectors[i])});
  }
  for (std::size_t i = 0; i < entities.size(); ++i) {
    index_->Add({entities[i].entity_id, ItemKind::kEntity, std::move(vectors[documents.size() + i])});
  }
}

DocumentRecord Engine::AddDocument(const std::string& title, const std::string& url, const std::string& text) {
  // Embed before touching the store so a failed embedding leaves no record.
  auto vector = embedder_->Embed(text);
  std::unique_lock lock(mutex_);
  auto record = store_->AddDocument(title, url, text);
  index_->Add({record.document_id, ItemKind::kDocument, std::move(vector)});
  return record;
}

MapRecord Engine::CreateMap(const std::string& name) {
  std::unique_lock lock(mutex_);
  return store_->CreateMap(name);
}

MenuState Engine::SelectMap(const std::string& map_id) {
  std::unique_lock lock(mutex_);
  return store_->SelectMap(map_id);
}

EntityRecord Engine::CreateEntity(const std::string& map_id, const std::string& text, Point2 coordinates,
                                  const std::optional<std::string>& parent) {
  if (!HasContent(text)) throw EmptyTextError(0);
  auto vector = embedder_->Embed(text);
  std::unique_lock lock(mutex_);
  auto record = store_->CreateEntity(map_id, text, coordinates, parent);
  index_->Add({record.entity_id, ItemKind::kEntity, std::move(vector)});
  return record;
}

EntityRecord Engine::PatchEntity(const std::string& entity_id, const EntityPatch& patch) {
  if (patch.coordinates && (!std::isfinite(patch.coordinates->x) || !std::isfinite(patch.coordinates->y))) {
    throw Error(ErrorCode::kInvalidArgument, "coordinates must be finite numbers");
  }
  std::optional<EmbeddingVector> vector;
  if (patch.text) vector = embedder_->Embed(*patch.text);

  std::unique_lock lock(mutex_);
  const auto current = store_->GetEntity(entity_id);
  // Structural change first: it is the only step that can be rejected on
  // grounds other than a missing id.
  if (patch.parent) {
    if (*patch.parent) {
      if (current.parent_entity_id != **patch.parent) store_->AttachChild(**patch.parent, entity_id);
    } else if (current.parent_entity_id) {
      store_->Detach(entity_id);
    }
  }
  if (patch.coordinates) store_->MoveEntity(entity_id, *patch.coordinates);
  if (patch.text) {
    store_->RetextEntity(entity_id, *patch.text);
    index_->Update(entity_id, *vector);
  }
  return store_->GetEntity(entity_id);
}

void Engine::DeleteEntity(const std::string& entity_id) {
  std::unique_lock lock(mutex_);
  store_->DeleteEntity(entity_id);
  index_->Remove(entity_id);
}

Neighborhood Engine::GroupSearch(const std::vector<std::string>& member_ids, std::size_t k,
                                 std::optional<ItemKind> kind) const {
  std::shared_lock lock(mutex_);
  return projection::GroupSearch(member_ids, k, *index_, kind);
}

QueryResponse Engine::Query(const QueryRequest& request) const {
  if (!(request.radius > 0.0)) throw Error(ErrorCode::kInvalidArgument, "radius must be positive");
  if (request.target_clusters && *request.target_clusters == 0) {
    throw Error(ErrorCode::kInvalidArgument, "target_clusters must be positive");
  }
  ValidateTree(request.tree);

  std::shared_lock lock(mutex_);
  const MapView map = store_->GetMap(request.map_id);

  std::unordered_map<std::string, Point2> entity_position;
  for (const auto& e : map.entities) entity_position.emplace(e.entity_id, e.coordinates);

  // Entities from other maps and the querying entities themselves are never suggestions.
  ContextSearchParams params = request.params;
  for (const auto& e : store_->Entities()) {
    if (e.map_id != request.map_id) params.exclude.insert(e.entity_id);
  }
  const auto flat = FlattenDepthFirst(request.tree);
  for (const auto* node : flat) {
    if (entity_position.contains(node->node_id)) params.exclude.insert(node->node_id);
  }

  const auto results = SearchTree(request.tree, params, *index_, *embedder_);

  // Anchors: explicit, else the entity's own position, else derived from the parent.
  std::unordered_map<std::string, Point2> anchor_of;
  std::unordered_map<std::string, std::size_t> child_slot;
  for (const auto* node : flat) {
    for (std::size_t c = 0; c < node->children.size(); ++c) child_slot[node->children[c].node_id] = c;
  }
  for (std::size_t i = 0; i < flat.size(); ++i) {
    const auto* node = flat[i];
    Point2 anchor;
    if (node->anchor) {
      anchor = *node->anchor;
    } else if (auto it = entity_position.find(node->node_id); it != entity_position.end()) {
      anchor = it->second;
    } else if (results[i].parent_id) {
      anchor = ChildAnchor(anchor_of.at(*results[i].parent_id), child_slot.at(node->node_id), request.radius);
    }
    anchor_of[node->node_id] = anchor;
  }

  // Label statistics run over everything this response puts on the map.
  std::vector<std::string> background_ids;
  {
    IdSet seen;
    for (const auto& r : results) {
      for (const auto& h : r.hits) {
        if (seen.insert(h.item_id).second) background_ids.push_back(h.item_id);
      }
    }
  }
  std::vector<std::string> background_texts;
  std::unordered_map<std::string, std::string> text_of;
  for (const auto& id : background_ids) {
    auto text = store_->TextOf(id);
    if (!text) throw Error(ErrorCode::kUnknownId, "indexed item missing from store: " + id);
    background_texts.push_back(*text);
    text_of.emplace(id, std::move(*text));
  }
  const clustering::TermStatistics statistics(background_texts);

  QueryResponse response;
  response.map_id = request.map_id;
  response.seed = config_.seed;
  for (const auto& result : results) {
    NodeResponse node;
    node.node_id = result.node_id;
    node.parent_id = result.parent_id;
    node.anchor = anchor_of.at(result.node_id);

    std::vector<EmbeddingVector> vectors;
    for (const auto& hit : result.hits) {
      auto item = index_->Get(hit.item_id);
      node.hits.emplace_back(hit, item.kind);
      vectors.push_back(std::move(item.vector));
    }
    const std::size_t n = vectors.size();
    if (n > 0) {
      const auto layout = layout::TsneFit(vectors, config_.tsne);
      std::vector<LayoutPoint> laid_out;
      laid_out.reserve(n);
      for (std::size_t i = 0; i < n; ++i) laid_out.push_back({result.hits[i].item_id, layout[i].x, layout[i].y});

      const auto dendrogram = clustering::LinkageFit(laid_out);
      std::size_t target = request.target_clusters
                               ? std::min(*request.target_clusters, n)
                               : clustering::ClustersForZoom(n, request.zoom.value_or(request.max_zoom / 2.0),
                                                             request.max_zoom);
      node.clusters = clustering::CutDendrogram(dendrogram, target);
      node.merges = dendrogram.merges;

      const auto transform = FitProjection(layout, ProjectionSpec{node.anchor, request.radius});
      for (const auto& p : laid_out) {
        const Point2 q = transform.Apply(p.position());
        node.points.push_back({p.item_id, q.x, q.y});
      }
      for (auto& cluster : node.clusters.clusters) {
        cluster.centroid = transform.Apply(cluster.centroid);
        std::vector<std::string> member_texts;
        for (const auto& id : cluster.member_ids) member_texts.push_back(text_of.at(id));
        cluster.label = statistics.Label(member_texts);
      }
    }
    response.nodes.push_back(std::move(node));
  }
  return response;
}

std::vector<std::string> Engine::Validate() const {
  std::shared_lock lock(mutex_);
  auto problems = store_->CheckIntegrity();

  IdSet stored;
  for (const auto& d : store_->Documents()) stored.insert(d.document_id);
  for (const auto& e : store_->Entities()) stored.insert(e.entity_id);
  const auto indexed = index_->Ids();
  IdSet indexed_set(indexed.begin(), indexed.end());
  if (indexed_set.size() != indexed.size()) problems.push_back("index holds duplicate ids");
  for (const auto& id : stored) {
    if (!indexed_set.contains(id)) problems.push_back("stored item " + id + " has no index vector");
  }
  for (const auto& id : indexed_set) {
    if (!stored.contains(id)) problems.push_back("index vector " + id + " has no stored item");
  }
  return problems;
}

}  // namespace projection
