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

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "projection/geometry.hpp"

namespace projection::clustering {

/// Cluster ids: leaves are 0..N-1, the k-th merge creates cluster N+k.
using ClusterId = std::size_t;

struct Merge {
  ClusterId left = 0;   // smaller id
  ClusterId right = 0;  // larger id
  double height = 0.0;
  ClusterId id = 0;

  friend bool operator==(const Merge&, const Merge&) = default;
};

struct Dendrogram {
  std::vector<std::string> leaves;
  std::vector<Point2> leaf_points;
  std::vector<Merge> merges;  // N - 1 entries, heights non-decreasing

  std::size_t size() const noexcept { return leaves.size(); }
};

struct Cluster {
  ClusterId id = 0;                      // dendrogram node the cluster corresponds to
  std::vector<std::string> member_ids;   // in leaf order
  Point2 centroid;
  std::string label;
};

/// Partition of the leaves; clusters ordered by their first leaf.
struct ClusterCut {
  std::vector<Cluster> clusters;
};

/// Average-linkage (UPGMA) agglomeration over 2D Euclidean distance. Ties go
/// to the pair with the lexicographically least (smaller id, larger id).
Dendrogram LinkageFit(std::span<const LayoutPoint> points);

/// Applies the first N - target_clusters merges. Throws kOutOfRange unless
/// 1 <= target_clusters <= N.
ClusterCut CutDendrogram(const Dendrogram& dendrogram, std::size_t target_clusters);

/// clamp(round(n^(zoom / max_zoom)), 1, n).
std::size_t ClustersForZoom(std::size_t n, double zoom, double max_zoom);

/// Lower-cased alphanumeric runs of at least three bytes.
std::vector<std::string> Tokenize(std::string_view text);

/// Document frequencies over a background collection of texts ("the map").
class TermStatistics {
 public:
  explicit TermStatistics(std::span<const std::string> background);

  /// Top three tokens of the member texts by (frequency in members /
  /// document frequency in background), ties lexicographic, joined by " · ".
  std::string Label(std::span<const std::string> member_texts) const;

 private:
  std::unordered_map<std::string, std::size_t> document_frequency_;
};

using TextLookup = std::function<std::optional<std::string>(std::string_view)>;

/// Resolves texts through `lookup` and labels `member_ids` against the
/// background `map_ids`. Throws kUnknownId for unresolvable ids.
std::string LabelCluster(std::span<const std::string> member_ids,
                         std::span<const std::string> map_ids, const TextLookup& lookup);

}  // namespace projection::clustering
