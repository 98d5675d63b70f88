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

#include "projection/spatial_projection.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "projection/error.hpp"

namespace projection {

void ProjectionSpec::Validate() const {
  if (!std::isfinite(radius) || !(radius > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "projection radius must be finite and positive");
  }
  if (!std::isfinite(anchor.x) || !std::isfinite(anchor.y)) {
    throw Error(ErrorCode::kInvalidArgument, "projection anchor must be finite");
  }
}

SimilarityTransform FitProjection(std::span<const Point2> points, const ProjectionSpec& spec) {
  spec.Validate();
  if (points.empty()) throw Error(ErrorCode::kTooFewPoints, "nothing to project");

  Point2 sum;
  for (const auto& p : points) sum = sum + p;
  const Point2 centroid = (1.0 / static_cast<double>(points.size())) * sum;

  double spread = 0.0;
  for (const auto& p : points) spread = std::max(spread, Distance(p, centroid));

  SimilarityTransform t;
  t.source_centroid = centroid;
  t.anchor = spec.anchor;
  t.scale = spread < 1e-12 ? 1.0 : spec.radius / spread;
  return t;
}

std::vector<LayoutPoint> ProjectNear(std::span<const LayoutPoint> points, const ProjectionSpec& spec) {
  std::vector<Point2> raw;
  raw.reserve(points.size());
  for (const auto& p : points) raw.push_back(p.position());
  const auto transform = FitProjection(raw, spec);

  std::vector<LayoutPoint> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    const Point2 q = transform.Apply(p.position());
    out.push_back({p.item_id, q.x, q.y});
  }
  return out;
}

Point2 ChildAnchor(Point2 parent, std::size_t child_index, double radius) {
  constexpr double kDiag = std::numbers::sqrt2 / 2.0;
  static constexpr std::array<Point2, 8> kCompass = {{
      {0.0, 1.0}, {1.0, 0.0}, {0.0, -1.0}, {-1.0, 0.0},
      {kDiag, kDiag}, {kDiag, -kDiag}, {-kDiag, -kDiag}, {-kDiag, kDiag},
  }};
  return parent + (2.0 * radius) * kCompass[child_index % kCompass.size()];
}

}  // namespace projection
