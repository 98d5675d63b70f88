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

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "projection/error.hpp"
#include "projection/knowledge_store.hpp"

namespace oracle {

/// Reference model of the entity graph: entity -> (map, parent).
struct ForestModel {
  struct Node {
    std::string map_id;
    std::optional<std::string> parent;
  };
  std::map<std::string, Node> nodes;
  std::vector<std::string> maps;

  bool Reaches(std::optional<std::string> from, const std::string& target) const {
    for (; from; from = nodes.at(*from).parent) {
      if (*from == target) return true;
    }
    return false;
  }
};

struct FuzzReport {
  std::size_t steps = 0;
  std::size_t rejected = 0;
  std::string failure;  // empty on success
};

/// Drives `store` with `steps` random mutations, checking after each one that
/// rejections match the model, the parent relation matches the model, the
/// independent forest validator passes and the store's own check passes.
inline FuzzReport FuzzStore(projection::KnowledgeStore& store, std::uint64_t seed, std::size_t steps) {
  using projection::Error;
  using projection::ErrorCode;
  std::mt19937_64 rng(seed);
  ForestModel model;
  FuzzReport report;
  auto pick = [&](const auto& container) {
    auto it = container.begin();
    std::advance(it, std::uniform_int_distribution<std::size_t>(0, container.size() - 1)(rng));
    return it;
  };
  auto any_entity = [&]() -> std::string {
    if (model.nodes.empty() || rng() % 20 == 0) return "ent-missing";
    return pick(model.nodes)->first;
  };
  auto expect = [&](std::optional<ErrorCode> want, auto&& action) -> bool {
    try {
      action();
    } catch (const Error& e) {
      if (want && e.code() == *want) {
        ++report.rejected;
        return false;
      }
      report.failure = "unexpected error " + std::string(projection::ErrorCodeName(e.code())) + ": " + e.what();
      return false;
    }
    if (want) report.failure = "expected " + std::string(projection::ErrorCodeName(*want));
    return !want;
  };

  for (std::size_t step = 0; step < steps && report.failure.empty(); ++step) {
    report.steps = step + 1;
    const int op = model.maps.empty() ? 0 : static_cast<int>(rng() % 100);
    if (op < 3) {
      const auto m = store.CreateMap("map " + std::to_string(step));
      model.maps.push_back(m.map_id);
    } else if (op < 35) {
      const auto map_id = *pick(model.maps);
      std::optional<std::string> parent;
      if (!model.nodes.empty() && rng() % 2 == 0) parent = any_entity();
      std::optional<ErrorCode> want;
      if (parent && !model.nodes.count(*parent)) want = ErrorCode::kUnknownId;
      else if (parent && model.nodes.at(*parent).map_id != map_id) want = ErrorCode::kCrossMapLink;
      std::string id;
      if (expect(want, [&] { id = store.CreateEntity(map_id, "entity " + std::to_string(step), {0, 0}, parent).entity_id; })) {
        model.nodes[id] = {map_id, parent};
      }
    } else if (op < 60) {
      const auto parent = any_entity();
      const auto child = any_entity();
      std::optional<ErrorCode> want;
      if (!model.nodes.count(parent) || !model.nodes.count(child)) want = ErrorCode::kUnknownId;
      else if (model.nodes.at(parent).map_id != model.nodes.at(child).map_id) want = ErrorCode::kCrossMapLink;
      else if (model.Reaches(parent, child)) want = ErrorCode::kCycleDetected;
      if (expect(want, [&] { store.AttachChild(parent, child); })) model.nodes[child].parent = parent;
    } else if (op < 72) {
      const auto child = any_entity();
      const auto want = model.nodes.count(child) ? std::nullopt : std::optional(ErrorCode::kUnknownId);
      if (expect(want, [&] { store.Detach(child); })) model.nodes[child].parent.reset();
    } else if (op < 86) {
      const auto victim = any_entity();
      const auto want = model.nodes.count(victim) ? std::nullopt : std::optional(ErrorCode::kUnknownId);
      if (expect(want, [&] { store.DeleteEntity(victim); })) {
        const auto grandparent = model.nodes.at(victim).parent;
        for (auto& [id, node] : model.nodes) {
          if (node.parent == victim) node.parent = grandparent;
        }
        model.nodes.erase(victim);
      }
    } else if (op < 92) {
      const auto id = any_entity();
      const auto want = model.nodes.count(id) ? std::nullopt : std::optional(ErrorCode::kUnknownId);
      expect(want, [&] { store.MoveEntity(id, {static_cast<double>(step), -0.5}); });
    } else if (op < 96) {
      const auto id = any_entity();
      const auto want = model.nodes.count(id) ? std::nullopt : std::optional(ErrorCode::kUnknownId);
      expect(want, [&] { store.RetextEntity(id, "retext " + std::to_string(step)); });
    } else if (op < 98) {
      store.AddDocument("t", "u", "document " + std::to_string(step));
    } else {
      store.SelectMap(*pick(model.maps));
    }
    if (!report.failure.empty()) break;

    for (const auto& [id, node] : model.nodes) {
      const auto e = store.GetEntity(id);
      if (e.parent_entity_id != node.parent || e.map_id != node.map_id) {
        report.failure = "parent relation diverged at " + id;
        break;
      }
    }
    if (store.entity_count() != model.nodes.size()) report.failure = "entity count diverged";
    if (report.failure.empty()) report.failure = CheckForest(store.Dump());
    if (report.failure.empty()) {
      const auto problems = store.CheckIntegrity();
      if (!problems.empty()) report.failure = "integrity: " + problems.front();
    }
  }
  return report;
}

}  // namespace oracle
