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

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "projection/embedder.hpp"
#include "projection/geometry.hpp"

namespace projection::layout {

/// Symmetric joint affinities of a point set.
struct Affinities {
  std::size_t n = 0;
  double perplexity = 0.0;           // effective perplexity actually targeted
  std::vector<double> joint;         // n*n, symmetric, zero diagonal, sums to 1
  std::vector<double> betas;         // per-row precision from the calibration
  std::vector<double> entropies;     // achieved conditional entropies (nats)
  std::vector<double> sq_distances;  // n*n input-space squared distances

  double at(std::size_t i, std::size_t j) const { return joint[i * n + j]; }
};

struct TsneParams {
  double perplexity = 30.0;
  int iterations = 1000;
  double early_exaggeration = 12.0;
  int exaggeration_iterations = 250;
  std::optional<double> learning_rate;  // default max(N / 12, 50)
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  int momentum_switch_iteration = 250;
  double init_stddev = 1e-4;
  std::uint64_t seed = 42;

  void Validate() const;
};

/// min(perplexity, (N-1)/3) for N >= 4, min(perplexity, N-1) below that.
double EffectivePerplexity(double perplexity, std::size_t n);

/// Row-major n*dim copy of the vectors as floats. Throws on ragged input.
std::vector<float> PackVectors(std::span<const EmbeddingVector> vectors);

Affinities CalibrateAffinities(std::span<const EmbeddingVector> vectors, double perplexity);
Affinities CalibrateAffinities(std::span<const float> packed, std::size_t n, std::size_t dim,
                               double perplexity);

/// Analytic gradient of KL(P || Q) for a 2D layout `y` (n*2). Returns n*2.
std::vector<double> KlGradient(std::span<const double> p, std::span<const double> y);

/// KL(P || Q) for a 2D layout `y` (n*2).
double KlObjective(std::span<const double> p, std::span<const double> y);

/// Called after every iteration with the iteration index and the current
/// (recentered) layout.
using IterationObserver = std::function<void(int, std::span<const double>)>;

/// Exact t-SNE to 2D. Returns n*2 coordinates with zero mean.
std::vector<double> Fit(const Affinities& affinities, const TsneParams& params,
                        const IterationObserver& observer = {});

/// Embeds vectors in 2D. N = 1 yields the origin.
std::vector<Point2> TsneFit(std::span<const EmbeddingVector> vectors, const TsneParams& params,
                            const IterationObserver& observer = {});

}  // namespace projection::layout
