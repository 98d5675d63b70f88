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

#include <cmath>
#include <random>

#include <omp.h>

#include "doctest.h"
#include "oracles.hpp"
#include "projection/kernels.hpp"

using namespace projection;

namespace {

std::vector<float> RandomFloats(std::mt19937_64& rng, std::size_t count) {
  std::normal_distribution<float> normal(0.0f, 1.0f);
  std::vector<float> out(count);
  for (auto& v : out) v = normal(rng);
  return out;
}

std::vector<double> RandomLayout(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> normal(0.0, 2.0);
  std::vector<double> y(2 * n);
  for (auto& v : y) v = normal(rng);
  return y;
}

struct ThreadScope {
  explicit ThreadScope(int n) : saved(omp_get_max_threads()) { omp_set_num_threads(n); }
  ~ThreadScope() { omp_set_num_threads(saved); }
  int saved;
};

}  // namespace

TEST_CASE("parallel kernels are bitwise identical to the serial reference") {
  ThreadScope threads(4);
  std::mt19937_64 rng(99);
  const std::size_t n = 37;
  const std::size_t dim = 24;
  const auto points = RandomFloats(rng, n * dim);

  SUBCASE("inner products") {
    const auto query = RandomFloats(rng, dim);
    std::vector<double> a(n), b(n);
    kernels::serial::InnerProducts(points, dim, query, a);
    kernels::parallel::InnerProducts(points, dim, query, b);
    CHECK(a == b);
  }

  SUBCASE("squared distances and calibration") {
    const auto da = kernels::serial::SquaredDistances(points, n, dim);
    const auto db = kernels::parallel::SquaredDistances(points, n, dim);
    CHECK(da == db);
    const auto ca = kernels::serial::CalibrateRows(da, n, std::log(7.0));
    const auto cb = kernels::parallel::CalibrateRows(db, n, std::log(7.0));
    CHECK(ca.conditional == cb.conditional);
    CHECK(ca.betas == cb.betas);
  }

  SUBCASE("student-t weights, gradient, objective") {
    const auto y = RandomLayout(rng, n);
    const auto p = oracle::RandomJoint(rng, n);
    std::vector<double> wa(n * n), wb(n * n);
    CHECK(kernels::serial::StudentTWeights(y, n, wa) == kernels::parallel::StudentTWeights(y, n, wb));
    CHECK(wa == wb);
    std::vector<double> ga(2 * n), gb(2 * n);
    kernels::serial::KlGradient(p, y, n, 12.0, ga);
    kernels::parallel::KlGradient(p, y, n, 12.0, gb);
    CHECK(ga == gb);
    CHECK(kernels::serial::KlDivergence(p, y, n) == kernels::parallel::KlDivergence(p, y, n));
  }
}

TEST_CASE("squared distances match a direct computation") {
  std::mt19937_64 rng(5);
  const std::size_t n = 6, dim = 5;
  const auto points = RandomFloats(rng, n * dim);
  const auto d = kernels::serial::SquaredDistances(points, n, dim);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(d[i * n + i] == 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double diff = double(points[i * dim + k]) - double(points[j * dim + k]);
        s += diff * diff;
      }
      CHECK(d[i * n + j] == doctest::Approx(s).epsilon(1e-12));
      CHECK(d[i * n + j] == d[j * n + i]);
    }
  }
}

TEST_CASE("calibrated rows hit the target entropy") {
  std::mt19937_64 rng(17);
  const std::size_t n = 30, dim = 10;
  const auto points = RandomFloats(rng, n * dim);
  const auto d = kernels::serial::SquaredDistances(points, n, dim);
  const auto rows = kernels::serial::CalibrateRows(d, n, std::log(8.0));
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += rows.conditional[i * n + j];
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rows.conditional[i * n + i] == 0.0);
    CHECK(std::abs(oracle::RowEntropy(d, n, i, rows.betas[i]) - std::log(8.0)) < 1e-5);
  }
}
