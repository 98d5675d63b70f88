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

#include "projection/context_search.hpp"

#include <cmath>
#include <unordered_set>

#include "projection/error.hpp"

namespace projection {

void ContextSearchParams::Validate() const {
  if (root_breadth == 0 || per_node_k == 0) {
    throw Error(ErrorCode::kInvalidArgument, "root_breadth and per_node_k must be positive");
  }
  if (per_node_k > root_breadth) {
    throw Error(ErrorCode::kInvalidArgument, "per_node_k must not exceed root_breadth");
  }
}

std::vector<const EntityTreeNode*> FlattenDepthFirst(const EntityTreeNode& tree) {
  std::vector<const EntityTreeNode*> order;
  std::vector<const EntityTreeNode*> stack{&tree};
  while (!stack.empty()) {
    const EntityTreeNode* node = stack.back();
    stack.pop_back();
    order.push_back(node);
    for (auto it = node->children.rbegin(); it != node->children.rend(); ++it) stack.push_back(&*it);
  }
  return order;
}

void ValidateTree(const EntityTreeNode& tree) {
  std::unordered_set<std::string_view> seen;
  for (const EntityTreeNode* node : FlattenDepthFirst(tree)) {
    if (node->node_id.empty()) throw Error(ErrorCode::kInvalidTree, "tree node with empty id");
    if (!seen.insert(node->node_id).second) {
      throw Error(ErrorCode::kInvalidTree, "repeated node id in tree: " + node->node_id);
    }
  }
}

std::vector<NodeResult> SearchTree(const EntityTreeNode& tree, const ContextSearchParams& params,
                                   const VectorIndex& index, const Embedder& embedder) {
  params.Validate();
  ValidateTree(tree);
  if (index.dimension() != embedder.dimension()) {
    throw Error(ErrorCode::kDimensionMismatch, "embedder and index dimensions differ");
  }

  const auto nodes = FlattenDepthFirst(tree);
  std::vector<std::string> texts;
  texts.reserve(nodes.size());
  for (const auto* node : nodes) texts.push_back(node->text);
  const auto vectors = embedder.EmbedBatch(texts);

  struct Frame {
    const EntityTreeNode* node;
    std::size_t flat;  // position in `nodes` / `vectors`
    std::optional<std::string> parent;
    std::shared_ptr<const IdSet> restriction;  // null at the root
  };

  std::unordered_map<const EntityTreeNode*, std::size_t> position;
  for (std::size_t i = 0; i < nodes.size(); ++i) position.emplace(nodes[i], i);

  std::vector<NodeResult> results;
  results.reserve(nodes.size());
  std::vector<Frame> stack{{&tree, 0, std::nullopt, nullptr}};
  while (!stack.empty()) {
    Frame frame = std::move(stack.back());
    stack.pop_back();

    QueryOptions options;
    options.restrict_to = frame.restriction.get();
    options.kind = params.kind_filter;
    options.exclude = params.exclude.empty() ? nullptr : &params.exclude;
    Neighborhood neighborhood = index.Query(vectors[frame.flat], params.root_breadth, options);

    auto own = std::make_shared<IdSet>();
    for (const auto& hit : neighborhood) own->insert(hit.item_id);

    if (neighborhood.size() > params.per_node_k) neighborhood.resize(params.per_node_k);
    results.push_back({frame.node->node_id, frame.parent, std::move(neighborhood)});

    const auto& children = frame.node->children;
    for (auto it = children.rbegin(); it != children.rend(); ++it) {
      stack.push_back({&*it, position.at(&*it), frame.node->node_id, own});
    }
  }
  return results;
}

Neighborhood GroupSearch(const std::vector<std::string>& member_ids, std::size_t k,
                         const VectorIndex& index, std::optional<ItemKind> kind) {
  if (member_ids.empty()) throw Error(ErrorCode::kInvalidArgument, "group search needs at least one member");

  std::vector<double> centroid(index.dimension(), 0.0);
  IdSet members;
  for (const auto& id : member_ids) {
    if (!members.insert(id).second) continue;
    const IndexedItem item = index.Get(id);
    for (std::size_t d = 0; d < centroid.size(); ++d) centroid[d] += item.vector[d];
  }
  double norm = 0.0;
  for (double v : centroid) norm += v * v;
  norm = std::sqrt(norm);
  if (norm < 1e-9) throw Error(ErrorCode::kDegenerateCentroid, "group centroid has (near) zero norm");

  std::vector<float> unit(centroid.size());
  for (std::size_t d = 0; d < centroid.size(); ++d) unit[d] = static_cast<float>(centroid[d] / norm);

  QueryOptions options;
  options.kind = kind;
  options.exclude = &members;
  return index.Query(EmbeddingVector(std::move(unit)), k, options);
}

}  // namespace projection
