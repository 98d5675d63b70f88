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

#include <span>
#include <vector>

#include "projection/geometry.hpp"

namespace projection {

struct ProjectionSpec {
  Point2 anchor;
  double radius = 1.0;

  void Validate() const;
};

/// y = anchor + scale * (x - source_centroid). No rotation, so every pairwise
/// direction is preserved and every pairwise distance is scaled by `scale`.
struct SimilarityTransform {
  Point2 source_centroid;
  Point2 anchor;
  double scale = 1.0;

  Point2 Apply(Point2 p) const { return anchor + scale * (p - source_centroid); }
};

/// Transform that centers `points` on spec.anchor with the farthest point at
/// spec.radius. Coincident inputs (spread < 1e-12) keep scale 1.
SimilarityTransform FitProjection(std::span<const Point2> points, const ProjectionSpec& spec);

std::vector<LayoutPoint> ProjectNear(std::span<const LayoutPoint> points, const ProjectionSpec& spec);

/// Anchor for the `child_index`-th child of a node anchored at `parent`, used
/// when the child has no position of its own: 2 * radius along the compass
/// directions N, E, S, W, NE, SE, SW, NW, cycling.
Point2 ChildAnchor(Point2 parent, std::size_t child_index, double radius);

}  // namespace projection
