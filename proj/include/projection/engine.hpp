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

#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "projection/clusterer.hpp"
#include "projection/context_search.hpp"
#include "projection/embedder.hpp"
#include "projection/knowledge_store.hpp"
#include "projection/layout.hpp"
#include "projection/vector_index.hpp"

namespace projection {

struct EngineConfig {
  EmbedderConfig embedder;
  std::uint64_t seed = 42;  // t-SNE initialization seed, echoed to clients
  std::optional<std::filesystem::path> data_dir;
  std::size_t compact_every = 1000;
  layout::TsneParams tsne;  // seed is overridden by `seed`
};

struct QueryRequest {
  std::string map_id;
  EntityTreeNode tree;
  ContextSearchParams params;
  std::optional<std::size_t> target_clusters;
  std::optional<double> zoom;  // used when target_clusters is absent
  double max_zoom = 16.0;
  double radius = 1.0;
};

struct NodeResponse {
  std::string node_id;
  std::optional<std::string> parent_id;
  Point2 anchor;
  std::vector<std::pair<Hit, ItemKind>> hits;
  clustering::ClusterCut clusters;  // centroids in map space
  // Full merge sequence; leaf i is hits[i], so clients can cut at any level.
  std::vector<clustering::Merge> merges;
  std::vector<LayoutPoint> points;  // map space, in hit order
};

struct QueryResponse {
  std::string map_id;
  std::uint64_t seed = 0;
  std::vector<NodeResponse> nodes;
};

struct EntityPatch {
  std::optional<Point2> coordinates;
  std::optional<std::string> text;
  // Present: reparent under the id, or detach when the inner value is empty.
  std::optional<std::optional<std::string>> parent;
};

/// Owns the store, the index and the embedder and keeps them coherent.
/// Mutations are exclusive; queries run concurrently on a consistent state.
class Engine {
 public:
  explicit Engine(EngineConfig config);
  Engine(EngineConfig config, std::unique_ptr<Embedder> embedder);

  const EngineConfig& config() const noexcept { return config_; }
  std::uint64_t seed() const noexcept { return config_.seed; }
  const Embedder& embedder() const noexcept { return *embedder_; }
  const VectorIndex& index() const noexcept { return *index_; }
  const KnowledgeStore& store() const noexcept { return *store_; }

  DocumentRecord AddDocument(const std::string& title, const std::string& url, const std::string& text);
  MapRecord CreateMap(const std::string& name);
  MenuState SelectMap(const std::string& map_id);
  EntityRecord CreateEntity(const std::string& map_id, const std::string& text, Point2 coordinates,
                            const std::optional<std::string>& parent = std::nullopt);
  EntityRecord PatchEntity(const std::string& entity_id, const EntityPatch& patch);
  void DeleteEntity(const std::string& entity_id);

  QueryResponse Query(const QueryRequest& request) const;
  Neighborhood GroupSearch(const std::vector<std::string>& member_ids, std::size_t k,
                           std::optional<ItemKind> kind = std::nullopt) const;

  /// Store integrity plus store/index coherence; empty when consistent.
  std::vector<std::string> Validate() const;

 private:
  void RebuildIndex();

  EngineConfig config_;
  std::unique_ptr<Embedder> embedder_;
  std::unique_ptr<KnowledgeStore> store_;
  std::unique_ptr<VectorIndex> index_;
  mutable std::shared_mutex mutex_;
};

}  // namespace projection
