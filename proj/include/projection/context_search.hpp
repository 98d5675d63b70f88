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

#include <optional>
#include <string>
#include <vector>

#include "projection/embedder.hpp"
#include "projection/geometry.hpp"
#include "projection/vector_index.hpp"

namespace projection {

/// One node of a hierarchical natural-language query.
struct EntityTreeNode {
  std::string node_id;
  std::string text;
  std::vector<EntityTreeNode> children;
  std::optional<Point2> anchor;
};

struct ContextSearchParams {
  std::size_t root_breadth = 256;  // size of each node's candidate neighborhood
  std::size_t per_node_k = 20;     // hits reported per node
  std::optional<ItemKind> kind_filter;
  IdSet exclude;  // items never considered (e.g. other maps' entities)

  void Validate() const;
};

struct NodeResult {
  std::string node_id;
  std::optional<std::string> parent_id;
  Neighborhood hits;
};

/// Rejects empty or repeated node ids. Empty text is left to the embedder.
void ValidateTree(const EntityTreeNode& tree);

/// Tree nodes in depth-first pre-order (children in listed order).
std::vector<const EntityTreeNode*> FlattenDepthFirst(const EntityTreeNode& tree);

/// Hierarchical-context search. The root queries the whole index with breadth
/// B; every other node queries only within its parent's breadth-B
/// neighborhood, and its own (re-ranked) neighborhood restricts its children.
/// One result per node, in depth-first order.
std::vector<NodeResult> SearchTree(const EntityTreeNode& tree, const ContextSearchParams& params,
                                   const VectorIndex& index, const Embedder& embedder);

/// Items most similar to the normalized centroid of `member_ids`, members excluded.
Neighborhood GroupSearch(const std::vector<std::string>& member_ids, std::size_t k,
                         const VectorIndex& index, std::optional<ItemKind> kind = std::nullopt);

}  // namespace projection
