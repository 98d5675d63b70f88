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

#include "projection/kernels.hpp"

#include <cmath>
#include <limits>

#include <omp.h>

namespace projection::kernels {
namespace {

// Row routines shared by both variants. Anything that crosses rows is
// finished by the caller in row order.

double DotRow(const float* a, const float* b, std::size_t dim) {
  double sum = 0.0;
  for (std::size_t d = 0; d < dim; ++d) sum += static_cast<double>(a[d]) * static_cast<double>(b[d]);
  return sum;
}

void DistanceRow(std::span<const float> points, std::size_t n, std::size_t dim, std::size_t i,
                 double* out) {
  const float* pi = points.data() + i * dim;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) {
      out[j] = 0.0;
      continue;
    }
    const float* pj = points.data() + j * dim;
    double sum = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double diff = static_cast<double>(pi[d]) - static_cast<double>(pj[d]);
      sum += diff * diff;
    }
    out[j] = sum;
  }
}

// Entropy of the row distribution exp(-beta * shifted_j) (j != i), writing
// unnormalized probabilities into `prob`. Returns the entropy and sum.
struct RowEntropy {
  double entropy;
  double sum;
};

RowEntropy EvaluateRow(const double* shifted, std::size_t n, std::size_t i, double beta,
                       double* prob) {
  double sum = 0.0;
  double weighted = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) {
      prob[j] = 0.0;
      continue;
    }
    prob[j] = std::exp(-beta * shifted[j]);
    sum += prob[j];
    weighted += shifted[j] * prob[j];
  }
  return {std::log(sum) + beta * weighted / sum, sum};
}

void CalibrateRow(std::span<const double> sq_distances, std::size_t n, std::size_t i,
                  double target_entropy, CalibratedRows& out) {
  const double* row = sq_distances.data() + i * n;
  double* prob = out.conditional.data() + i * n;

  // Shift by the nearest-neighbour distance so large precisions do not
  // underflow; the normalized row and its entropy are unchanged.
  double nearest = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    if (j != i) nearest = std::min(nearest, row[j]);
  }
  std::vector<double> shifted(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) shifted[j] = j == i ? 0.0 : row[j] - nearest;

  constexpr double kInf = std::numeric_limits<double>::infinity();
  double beta = 1.0;
  double lo = -kInf;
  double hi = kInf;
  RowEntropy eval = EvaluateRow(shifted.data(), n, i, beta, prob);
  for (int step = 0; step < kCalibrationMaxSteps; ++step) {
    const double diff = eval.entropy - target_entropy;
    if (std::abs(diff) <= kCalibrationTolerance) break;
    if (diff > 0.0) {
      lo = beta;
      beta = hi == kInf ? beta * 2.0 : (beta + hi) / 2.0;
    } else {
      hi = beta;
      beta = lo == -kInf ? beta / 2.0 : (beta + lo) / 2.0;
    }
    eval = EvaluateRow(shifted.data(), n, i, beta, prob);
  }

  for (std::size_t j = 0; j < n; ++j) prob[j] /= eval.sum;
  out.betas[i] = beta;
  out.entropies[i] = eval.entropy;
}

double WeightRow(std::span<const double> y, std::size_t n, std::size_t i, double* w) {
  const double xi = y[2 * i];
  const double yi = y[2 * i + 1];
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) {
      w[j] = 0.0;
      continue;
    }
    const double dx = xi - y[2 * j];
    const double dy = yi - y[2 * j + 1];
    w[j] = 1.0 / (1.0 + dx * dx + dy * dy);
    sum += w[j];
  }
  return sum;
}

void GradientRow(std::span<const double> p, std::span<const double> y, std::span<const double> w,
                 std::size_t n, std::size_t i, double p_scale, double inv_z, double* g) {
  double gx = 0.0;
  double gy = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) continue;
    const double wij = w[i * n + j];
    const double coeff = (p_scale * p[i * n + j] - wij * inv_z) * wij;
    gx += coeff * (y[2 * i] - y[2 * j]);
    gy += coeff * (y[2 * i + 1] - y[2 * j + 1]);
  }
  g[0] = 4.0 * gx;
  g[1] = 4.0 * gy;
}

double KlRow(std::span<const double> p, std::span<const double> w, std::size_t n, std::size_t i,
             double log_z) {
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double pij = p[i * n + j];
    if (j == i || pij <= 0.0) continue;
    // log q_ij = log w_ij - log Z
    sum += pij * (std::log(pij) - (std::log(w[i * n + j]) - log_z));
  }
  return sum;
}

double SumInOrder(const std::vector<double>& parts) {
  double total = 0.0;
  for (double v : parts) total += v;
  return total;
}

CalibratedRows MakeCalibrated(std::size_t n) {
  return {std::vector<double>(n * n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
}

}  // namespace

namespace serial {

void InnerProducts(std::span<const float> rows, std::size_t dim, std::span<const float> query,
                   std::span<double> out) {
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = DotRow(rows.data() + r * dim, query.data(), dim);
}

std::vector<double> SquaredDistances(std::span<const float> points, std::size_t n, std::size_t dim) {
  std::vector<double> out(n * n);
  for (std::size_t i = 0; i < n; ++i) DistanceRow(points, n, dim, i, out.data() + i * n);
  return out;
}

CalibratedRows CalibrateRows(std::span<const double> sq_distances, std::size_t n,
                             double target_entropy) {
  CalibratedRows out = MakeCalibrated(n);
  for (std::size_t i = 0; i < n; ++i) CalibrateRow(sq_distances, n, i, target_entropy, out);
  return out;
}

double StudentTWeights(std::span<const double> y, std::size_t n, std::span<double> weights) {
  std::vector<double> sums(n);
  for (std::size_t i = 0; i < n; ++i) sums[i] = WeightRow(y, n, i, weights.data() + i * n);
  return SumInOrder(sums);
}

void KlGradient(std::span<const double> p, std::span<const double> y, std::size_t n,
                double p_scale, std::span<double> grad) {
  std::vector<double> w(n * n);
  const double inv_z = 1.0 / StudentTWeights(y, n, w);
  for (std::size_t i = 0; i < n; ++i) GradientRow(p, y, w, n, i, p_scale, inv_z, grad.data() + 2 * i);
}

double KlDivergence(std::span<const double> p, std::span<const double> y, std::size_t n) {
  std::vector<double> w(n * n);
  const double log_z = std::log(StudentTWeights(y, n, w));
  std::vector<double> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = KlRow(p, w, n, i, log_z);
  return SumInOrder(rows);
}

}  // namespace serial

namespace parallel {

using Index = std::ptrdiff_t;

void InnerProducts(std::span<const float> rows, std::size_t dim, std::span<const float> query,
                   std::span<double> out) {
  const Index count = static_cast<Index>(out.size());
#pragma omp parallel for schedule(static)
  for (Index r = 0; r < count; ++r) {
    out[r] = DotRow(rows.data() + static_cast<std::size_t>(r) * dim, query.data(), dim);
  }
}

std::vector<double> SquaredDistances(std::span<const float> points, std::size_t n, std::size_t dim) {
  std::vector<double> out(n * n);
  const Index count = static_cast<Index>(n);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < count; ++i) {
    DistanceRow(points, n, dim, static_cast<std::size_t>(i), out.data() + static_cast<std::size_t>(i) * n);
  }
  return out;
}

CalibratedRows CalibrateRows(std::span<const double> sq_distances, std::size_t n,
                             double target_entropy) {
  CalibratedRows out = MakeCalibrated(n);
  const Index count = static_cast<Index>(n);
#pragma omp parallel for schedule(dynamic, 4)
  for (Index i = 0; i < count; ++i) {
    CalibrateRow(sq_distances, n, static_cast<std::size_t>(i), target_entropy, out);
  }
  return out;
}

double StudentTWeights(std::span<const double> y, std::size_t n, std::span<double> weights) {
  std::vector<double> sums(n);
  const Index count = static_cast<Index>(n);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < count; ++i) {
    const auto row = static_cast<std::size_t>(i);
    sums[row] = WeightRow(y, n, row, weights.data() + row * n);
  }
  return SumInOrder(sums);
}

void KlGradient(std::span<const double> p, std::span<const double> y, std::size_t n,
                double p_scale, std::span<double> grad) {
  std::vector<double> w(n * n);
  const double inv_z = 1.0 / StudentTWeights(y, n, w);
  const Index count = static_cast<Index>(n);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < count; ++i) {
    const auto row = static_cast<std::size_t>(i);
    GradientRow(p, y, w, n, row, p_scale, inv_z, grad.data() + 2 * row);
  }
}

double KlDivergence(std::span<const double> p, std::span<const double> y, std::size_t n) {
  std::vector<double> w(n * n);
  const double log_z = std::log(StudentTWeights(y, n, w));
  std::vector<double> rows(n);
  const Index count = static_cast<Index>(n);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < count; ++i) {
    rows[static_cast<std::size_t>(i)] = KlRow(p, w, n, static_cast<std::size_t>(i), log_z);
  }
  return SumInOrder(rows);
}

}  // namespace parallel

int ParallelThreads() { return omp_get_max_threads(); }

}  // namespace projection::kernels
