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

#include "projection/layout.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "projection/error.hpp"
#include "projection/kernels.hpp"

namespace projection::layout {
namespace {

// Box-Muller over mt19937_64 so the initial layout is identical on every
// standard library (std::normal_distribution is implementation-defined).
class PortableGaussian {
 public:
  explicit PortableGaussian(std::uint64_t seed) : engine_(seed) {}

  double operator()() {
    if (spare_) {
      const double v = *spare_;
      spare_.reset();
      return v;
    }
    const double u1 = Uniform();
    const double u2 = Uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    return radius * std::cos(angle);
  }

 private:
  // (0, 1]
  double Uniform() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

void Recenter(std::vector<double>& y, std::size_t n) {
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += y[2 * i];
    my += y[2 * i + 1];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[2 * i] -= mx;
    y[2 * i + 1] -= my;
  }
}

std::size_t PointCount(std::span<const double> p) {
  const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(p.size()))));
  if (n * n != p.size()) throw Error(ErrorCode::kInvalidArgument, "affinity matrix is not square");
  return n;
}

}  // namespace

void TsneParams::Validate() const {
  if (!(perplexity > 0.0)) throw Error(ErrorCode::kInvalidArgument, "perplexity must be positive");
  if (iterations <= 0) throw Error(ErrorCode::kInvalidArgument, "iterations must be positive");
  if (!(early_exaggeration >= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "early exaggeration must be >= 1");
  }
  if (learning_rate && !(*learning_rate > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "learning rate must be positive");
  }
}

double EffectivePerplexity(double perplexity, std::size_t n) {
  if (n >= 4) return std::min(perplexity, static_cast<double>(n - 1) / 3.0);
  return std::min(perplexity, static_cast<double>(n > 0 ? n - 1 : 0));
}

std::vector<float> PackVectors(std::span<const EmbeddingVector> vectors) {
  if (vectors.empty()) return {};
  const std::size_t dim = vectors.front().dimension();
  std::vector<float> packed;
  packed.reserve(vectors.size() * dim);
  for (const auto& v : vectors) {
    if (v.dimension() != dim) throw Error(ErrorCode::kDimensionMismatch, "vectors of mixed dimension");
    packed.insert(packed.end(), v.values().begin(), v.values().end());
  }
  return packed;
}

Affinities CalibrateAffinities(std::span<const EmbeddingVector> vectors, double perplexity) {
  const std::size_t dim = vectors.empty() ? 0 : vectors.front().dimension();
  const auto packed = PackVectors(vectors);
  return CalibrateAffinities(packed, vectors.size(), dim, perplexity);
}

Affinities CalibrateAffinities(std::span<const float> packed, std::size_t n, std::size_t dim,
                               double perplexity) {
  if (n < 2) throw Error(ErrorCode::kTooFewPoints, "affinity calibration needs at least 2 points");
  if (!(perplexity > 0.0)) throw Error(ErrorCode::kInvalidArgument, "perplexity must be positive");

  Affinities out;
  out.n = n;
  out.perplexity = EffectivePerplexity(perplexity, n);
  out.sq_distances = kernels::parallel::SquaredDistances(packed, n, dim);
  auto rows = kernels::parallel::CalibrateRows(out.sq_distances, n, std::log(out.perplexity));

  out.joint.assign(n * n, 0.0);
  double total = 0.0;
  const double denom = 2.0 * static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double v = (rows.conditional[i * n + j] + rows.conditional[j * n + i]) / denom;
      out.joint[i * n + j] = v;
      total += v;
    }
  }
  // Rows already sum to one; this only absorbs rounding.
  for (double& v : out.joint) v /= total;
  out.betas = std::move(rows.betas);
  out.entropies = std::move(rows.entropies);
  return out;
}

std::vector<double> KlGradient(std::span<const double> p, std::span<const double> y) {
  const std::size_t n = PointCount(p);
  if (y.size() != 2 * n) throw Error(ErrorCode::kInvalidArgument, "layout does not match affinities");
  std::vector<double> grad(2 * n);
  kernels::parallel::KlGradient(p, y, n, 1.0, grad);
  return grad;
}

double KlObjective(std::span<const double> p, std::span<const double> y) {
  const std::size_t n = PointCount(p);
  if (y.size() != 2 * n) throw Error(ErrorCode::kInvalidArgument, "layout does not match affinities");
  return kernels::parallel::KlDivergence(p, y, n);
}

std::vector<double> Fit(const Affinities& affinities, const TsneParams& params,
                        const IterationObserver& observer) {
  params.Validate();
  const std::size_t n = affinities.n;
  if (n == 0) throw Error(ErrorCode::kTooFewPoints, "t-SNE needs at least one point");
  if (n == 1) return {0.0, 0.0};

  const double learning_rate = params.learning_rate.value_or(std::max(static_cast<double>(n) / 12.0, 50.0));

  std::vector<double> y(2 * n);
  PortableGaussian gaussian(params.seed);
  for (double& v : y) v = params.init_stddev * gaussian();

  std::vector<double> grad(2 * n);
  std::vector<double> velocity(2 * n, 0.0);
  std::vector<double> gains(2 * n, 1.0);
  for (int iter = 0; iter < params.iterations; ++iter) {
    const double exaggeration = iter < params.exaggeration_iterations ? params.early_exaggeration : 1.0;
    const double momentum = iter < params.momentum_switch_iteration ? params.initial_momentum
                                                                    : params.final_momentum;
    kernels::parallel::KlGradient(affinities.joint, y, n, exaggeration, grad);

    // Delta-bar-delta gains: grow where the step keeps direction, shrink otherwise.
    for (std::size_t k = 0; k < 2 * n; ++k) {
      const bool same_sign = (grad[k] > 0.0) == (velocity[k] > 0.0);
      gains[k] = std::max(same_sign ? gains[k] * 0.8 : gains[k] + 0.2, 0.01);
      velocity[k] = momentum * velocity[k] - learning_rate * gains[k] * grad[k];
      y[k] += velocity[k];
    }
    Recenter(y, n);
    if (observer) observer(iter, y);
  }
  return y;
}

std::vector<Point2> TsneFit(std::span<const EmbeddingVector> vectors, const TsneParams& params,
                            const IterationObserver& observer) {
  params.Validate();
  if (vectors.empty()) throw Error(ErrorCode::kTooFewPoints, "t-SNE needs at least one point");
  if (vectors.size() == 1) return {Point2{}};

  const auto affinities = CalibrateAffinities(vectors, params.perplexity);
  const auto flat = Fit(affinities, params, observer);
  std::vector<Point2> out(vectors.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {flat[2 * i], flat[2 * i + 1]};
  return out;
}

}  // namespace projection::layout
