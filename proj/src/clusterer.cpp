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

#include "projection/clusterer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "projection/error.hpp"

namespace projection::clustering {

Dendrogram LinkageFit(std::span<const LayoutPoint> points) {
  const std::size_t n = points.size();
  Dendrogram out;
  out.leaves.reserve(n);
  out.leaf_points.reserve(n);
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite coordinates for " + p.item_id);
    }
    out.leaves.push_back(p.item_id);
    out.leaf_points.push_back(p.position());
  }
  if (n <= 1) return out;

  // Slot s holds one active cluster; merged clusters reuse the lower slot.
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      dist[i * n + j] = dist[j * n + i] = Distance(out.leaf_points[i], out.leaf_points[j]);
    }
  }
  std::vector<ClusterId> id_of(n);
  std::iota(id_of.begin(), id_of.end(), ClusterId{0});
  std::vector<std::size_t> size(n, 1);
  std::vector<std::size_t> active(n);
  std::iota(active.begin(), active.end(), std::size_t{0});

  out.merges.reserve(n - 1);
  for (ClusterId next = n; active.size() > 1; ++next) {
    std::size_t best_a = 0;
    std::size_t best_b = 0;
    double best = std::numeric_limits<double>::infinity();
    std::pair<ClusterId, ClusterId> best_key{};
    for (std::size_t x = 0; x < active.size(); ++x) {
      for (std::size_t y = x + 1; y < active.size(); ++y) {
        const std::size_t a = active[x];
        const std::size_t b = active[y];
        const double d = dist[a * n + b];
        const std::pair<ClusterId, ClusterId> key = std::minmax(id_of[a], id_of[b]);
        if (d < best || (d == best && key < best_key)) {
          best = d;
          best_key = key;
          best_a = a;
          best_b = b;
        }
      }
    }

    const std::size_t keep = std::min(best_a, best_b);
    const std::size_t drop = std::max(best_a, best_b);
    const double wk = static_cast<double>(size[keep]);
    const double wd = static_cast<double>(size[drop]);
    for (std::size_t other : active) {
      if (other == keep || other == drop) continue;
      const double merged = (wk * dist[keep * n + other] + wd * dist[drop * n + other]) / (wk + wd);
      dist[keep * n + other] = dist[other * n + keep] = merged;
    }
    out.merges.push_back({best_key.first, best_key.second, best, next});
    id_of[keep] = next;
    size[keep] += size[drop];
    active.erase(std::find(active.begin(), active.end(), drop));
  }
  return out;
}

ClusterCut CutDendrogram(const Dendrogram& dendrogram, std::size_t target_clusters) {
  const std::size_t n = dendrogram.size();
  if (target_clusters < 1 || target_clusters > n) {
    throw Error(ErrorCode::kOutOfRange, "target_clusters " + std::to_string(target_clusters) +
                                            " outside [1, " + std::to_string(n) + "]");
  }

  // members[c] for every dendrogram node c created so far.
  std::vector<std::vector<std::size_t>> members(n + dendrogram.merges.size());
  for (std::size_t i = 0; i < n; ++i) members[i] = {i};
  std::set<ClusterId> roots;
  for (std::size_t i = 0; i < n; ++i) roots.insert(i);

  const std::size_t keep = n - target_clusters;
  for (std::size_t m = 0; m < keep; ++m) {
    const Merge& merge = dendrogram.merges[m];
    auto& merged = members[merge.id];
    merged = members[merge.left];
    merged.insert(merged.end(), members[merge.right].begin(), members[merge.right].end());
    std::sort(merged.begin(), merged.end());
    roots.erase(merge.left);
    roots.erase(merge.right);
    roots.insert(merge.id);
  }

  ClusterCut cut;
  for (ClusterId root : roots) {
    Cluster cluster;
    cluster.id = root;
    Point2 sum;
    for (std::size_t leaf : members[root]) {
      cluster.member_ids.push_back(dendrogram.leaves[leaf]);
      sum = sum + dendrogram.leaf_points[leaf];
    }
    cluster.centroid = (1.0 / static_cast<double>(members[root].size())) * sum;
    cut.clusters.push_back(std::move(cluster));
  }
  std::sort(cut.clusters.begin(), cut.clusters.end(), [&](const Cluster& a, const Cluster& b) {
    return members[a.id].front() < members[b.id].front();
  });
  return cut;
}

std::size_t ClustersForZoom(std::size_t n, double zoom, double max_zoom) {
  if (n == 0) return 0;
  if (!(max_zoom > 0.0)) throw Error(ErrorCode::kInvalidArgument, "max zoom must be positive");
  const double z = std::clamp(zoom, 0.0, max_zoom);
  const double target = std::round(std::pow(static_cast<double>(n), z / max_zoom));
  return static_cast<std::size_t>(std::clamp(target, 1.0, static_cast<double>(n)));
}

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (current.size() >= 3) tokens.push_back(current);
    current.clear();
  };
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (u >= 0x80 || (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z')) {
      current.push_back(c);
    } else if (c >= 'A' && c <= 'Z') {
      current.push_back(static_cast<char>(c - 'A' + 'a'));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

TermStatistics::TermStatistics(std::span<const std::string> background) {
  for (const auto& text : background) {
    auto tokens = Tokenize(text);
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    for (auto& t : tokens) ++document_frequency_[std::move(t)];
  }
}

std::string TermStatistics::Label(std::span<const std::string> member_texts) const {
  std::map<std::string, std::size_t> term_frequency;
  for (const auto& text : member_texts) {
    for (auto& t : Tokenize(text)) ++term_frequency[std::move(t)];
  }

  std::vector<std::pair<double, std::string>> scored;
  scored.reserve(term_frequency.size());
  for (const auto& [token, tf] : term_frequency) {
    auto it = document_frequency_.find(token);
    // A member outside the background still counts as one document.
    const double df = it == document_frequency_.end() ? 1.0 : static_cast<double>(it->second);
    scored.emplace_back(static_cast<double>(tf) / df, token);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });

  std::string label;
  for (std::size_t i = 0; i < std::min<std::size_t>(3, scored.size()); ++i) {
    if (i > 0) label += " · ";
    label += scored[i].second;
  }
  return label;
}

std::string LabelCluster(std::span<const std::string> member_ids, std::span<const std::string> map_ids,
                         const TextLookup& lookup) {
  auto resolve = [&](std::span<const std::string> ids) {
    std::vector<std::string> texts;
    texts.reserve(ids.size());
    for (const auto& id : ids) {
      auto text = lookup(id);
      if (!text) throw Error(ErrorCode::kUnknownId, "cannot label unknown item " + id);
      texts.push_back(std::move(*text));
    }
    return texts;
  };
  const auto background = resolve(map_ids);
  return TermStatistics(background).Label(resolve(member_ids));
}

}  // namespace projection::clustering
