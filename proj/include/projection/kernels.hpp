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

// Dense numeric kernels behind the index scan and t-SNE.
//
// Every kernel exists twice: `serial::` is the reference loop, `parallel::`
// distributes independent rows across OpenMP threads. Each row is reduced by
// exactly one thread in a fixed order and cross-row totals are summed
// serially, so both variants return bitwise-identical results.
//
// Matrices are row-major; pair matrices are n*n, 2D layouts are n*2.

#include <cstddef>
#include <span>
#include <vector>

namespace projection::kernels {

struct CalibratedRows {
  std::vector<double> conditional;  // row i holds p_{j|i}; diagonal 0
  std::vector<double> betas;        // per-row precision 1/(2 sigma^2)
  std::vector<double> entropies;    // achieved Shannon entropy (nats)
};

inline constexpr int kCalibrationMaxSteps = 50;
inline constexpr double kCalibrationTolerance = 1e-5;

namespace serial {

/// out[r] = <rows[r], query>, accumulated in double.
void InnerProducts(std::span<const float> rows, std::size_t dim, std::span<const float> query,
                   std::span<double> out);

/// Squared Euclidean distances between all rows of an n*dim matrix.
std::vector<double> SquaredDistances(std::span<const float> points, std::size_t n, std::size_t dim);

/// Binary search on each row's precision so that the conditional
/// distribution p_{j|i} has Shannon entropy `target_entropy`.
CalibratedRows CalibrateRows(std::span<const double> sq_distances, std::size_t n,
                             double target_entropy);

/// w_ij = 1 / (1 + |y_i - y_j|^2), zero diagonal. Returns the off-diagonal sum.
double StudentTWeights(std::span<const double> y, std::size_t n, std::span<double> weights);

/// grad_i = 4 sum_j (p_scale * p_ij - q_ij) w_ij (y_i - y_j).
void KlGradient(std::span<const double> p, std::span<const double> y, std::size_t n,
                double p_scale, std::span<double> grad);

/// sum over p_ij > 0 of p_ij log(p_ij / q_ij).
double KlDivergence(std::span<const double> p, std::span<const double> y, std::size_t n);

}  // namespace serial

namespace parallel {

void InnerProducts(std::span<const float> rows, std::size_t dim, std::span<const float> query,
                   std::span<double> out);
std::vector<double> SquaredDistances(std::span<const float> points, std::size_t n, std::size_t dim);
CalibratedRows CalibrateRows(std::span<const double> sq_distances, std::size_t n,
                             double target_entropy);
double StudentTWeights(std::span<const double> y, std::size_t n, std::span<double> weights);
void KlGradient(std::span<const double> p, std::span<const double> y, std::size_t n,
                double p_scale, std::span<double> grad);
double KlDivergence(std::span<const double> p, std::span<const double> y, std::size_t n);

}  // namespace parallel

int ParallelThreads();

}  // namespace projection::kernels
