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

// Serial reference vs OpenMP kernels. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "projection/kernels.hpp"

namespace k = projection::kernels;

namespace {

std::vector<float> RandomFloats(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> normal(0.0f, 1.0f);
  std::vector<float> out(count);
  for (auto& v : out) v = normal(rng);
  return out;
}

std::vector<double> RandomLayout(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out(2 * n);
  for (auto& v : out) v = normal(rng);
  return out;
}

std::vector<double> UniformJoint(std::size_t n) {
  std::vector<double> p(n * n, 1.0 / static_cast<double>(n * (n - 1)));
  for (std::size_t i = 0; i < n; ++i) p[i * n + i] = 0.0;
  return p;
}

constexpr std::size_t kDim = 512;

template <auto Fn>
void BM_InnerProducts(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto rows = RandomFloats(n * kDim, 1);
  const auto query = RandomFloats(kDim, 2);
  std::vector<double> out(n);
  for (auto _ : state) {
    Fn(rows, kDim, query, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

template <auto Fn>
void BM_SquaredDistances(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto points = RandomFloats(n * kDim, 3);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(points, n, kDim));
}

template <auto Fn>
void BM_CalibrateRows(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto points = RandomFloats(n * kDim, 4);
  const auto sq = k::serial::SquaredDistances(points, n, kDim);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(sq, n, std::log(30.0)));
}

template <auto Fn>
void BM_StudentTWeights(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto y = RandomLayout(n, 5);
  std::vector<double> w(n * n);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(y, n, w));
}

template <auto Fn>
void BM_KlGradient(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto y = RandomLayout(n, 6);
  const auto p = UniformJoint(n);
  std::vector<double> grad(2 * n);
  for (auto _ : state) {
    Fn(p, y, n, 1.0, grad);
    benchmark::DoNotOptimize(grad.data());
  }
}

template <auto Fn>
void BM_KlDivergence(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto y = RandomLayout(n, 7);
  const auto p = UniformJoint(n);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(p, y, n));
}

}  // namespace

BENCHMARK(BM_InnerProducts<k::serial::InnerProducts>)->Name("InnerProducts/serial")->Arg(1000)->Arg(20000);
BENCHMARK(BM_InnerProducts<k::parallel::InnerProducts>)->Name("InnerProducts/parallel")->Arg(1000)->Arg(20000);
BENCHMARK(BM_SquaredDistances<k::serial::SquaredDistances>)->Name("SquaredDistances/serial")->Arg(100)->Arg(400);
BENCHMARK(BM_SquaredDistances<k::parallel::SquaredDistances>)->Name("SquaredDistances/parallel")->Arg(100)->Arg(400);
BENCHMARK(BM_CalibrateRows<k::serial::CalibrateRows>)->Name("CalibrateRows/serial")->Arg(100)->Arg(400);
BENCHMARK(BM_CalibrateRows<k::parallel::CalibrateRows>)->Name("CalibrateRows/parallel")->Arg(100)->Arg(400);
BENCHMARK(BM_StudentTWeights<k::serial::StudentTWeights>)->Name("StudentTWeights/serial")->Arg(100)->Arg(400);
BENCHMARK(BM_StudentTWeights<k::parallel::StudentTWeights>)->Name("StudentTWeights/parallel")->Arg(100)->Arg(400);
BENCHMARK(BM_KlGradient<k::serial::KlGradient>)->Name("KlGradient/serial")->Arg(100)->Arg(400);
BENCHMARK(BM_KlGradient<k::parallel::KlGradient>)->Name("KlGradient/parallel")->Arg(100)->Arg(400);
BENCHMARK(BM_KlDivergence<k::serial::KlDivergence>)->Name("KlDivergence/serial")->Arg(100)->Arg(400);
BENCHMARK(BM_KlDivergence<k::parallel::KlDivergence>)->Name("KlDivergence/parallel")->Arg(100)->Arg(400);

BENCHMARK_MAIN();
