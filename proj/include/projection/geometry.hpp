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

#include <cmath>
#include <string>

namespace projection {

/// A point in 2D map space.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
  friend bool operator==(const Point2&, const Point2&) = default;
};

inline double Norm(Point2 p) { return std::hypot(p.x, p.y); }
inline double Distance(Point2 a, Point2 b) { return Norm(a - b); }

/// A laid-out item: an id with its 2D coordinates.
struct LayoutPoint {
  std::string item_id;
  double x = 0.0;
  double y = 0.0;

  Point2 position() const { return {x, y}; }
  friend bool operator==(const LayoutPoint&, const LayoutPoint&) = default;
};

}  // namespace projection
