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

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace projection {

/// Dense unit-norm vector representing the meaning of a text.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;
  explicit EmbeddingVector(std::vector<float> values) : values_(std::move(values)) {}

  std::size_t dimension() const noexcept { return values_.size(); }
  std::span<const float> values() const noexcept { return values_; }
  std::span<float> mutable_values() noexcept { return values_; }
  float operator[](std::size_t i) const { return values_[i]; }

  double norm() const;

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

 private:
  std::vector<float> values_;
};

double Dot(const EmbeddingVector& a, const EmbeddingVector& b);
double Cosine(const EmbeddingVector& a, const EmbeddingVector& b);

enum class EmbedderBackend { kDeterministicLocal, kRemoteService };

struct EmbedderConfig {
  std::size_t dimension = 512;
  std::uint64_t seed = 42;
  std::size_t ngram_min = 3;
  std::size_t ngram_max = 5;
  EmbedderBackend backend = EmbedderBackend::kDeterministicLocal;

  // Only consulted by the remote backend, e.g. "http://127.0.0.1:8080".
  std::string remote_url;
  std::chrono::milliseconds remote_timeout{5000};

  /// Throws Error(kInvalidArgument) when the config is unusable.
  void Validate() const;
};

/// Hashed n-gram bucket count of the local embedder (2^18).
inline constexpr std::size_t kNgramBuckets = std::size_t{1} << 18;

/// Lower-cases ASCII, collapses whitespace runs to one space and trims.
std::string NormalizeText(std::string_view text);

/// Bucket counts of the character n-grams of `text` (after normalization
/// and space padding). Sorted by bucket. Exposed for tests.
std::vector<std::pair<std::uint32_t, std::uint32_t>> NgramBuckets(std::string_view text,
                                                                  const EmbedderConfig& config);

class Embedder {
 public:
  virtual ~Embedder() = default;

  virtual std::size_t dimension() const noexcept = 0;
  virtual EmbeddingVector Embed(std::string_view text) const = 0;
  virtual std::vector<EmbeddingVector> EmbedBatch(std::span<const std::string> texts) const;
};

/// Hashed character n-grams projected through a seeded +-1/sqrt(D) matrix.
/// The projection matrix is never materialized; entry (bucket, d) is drawn
/// from a counter-based generator keyed on (seed, bucket).
class LocalEmbedder final : public Embedder {
 public:
  explicit LocalEmbedder(EmbedderConfig config);

  std::size_t dimension() const noexcept override { return config_.dimension; }
  EmbeddingVector Embed(std::string_view text) const override;

  const EmbedderConfig& config() const noexcept { return config_; }

 private:
  EmbedderConfig config_;
  float scale_;
};

/// Client for the POST /embed endpoint of a running api service.
class RemoteEmbedder final : public Embedder {
 public:
  explicit RemoteEmbedder(EmbedderConfig config);

  std::size_t dimension() const noexcept override { return config_.dimension; }
  EmbeddingVector Embed(std::string_view text) const override;
  std::vector<EmbeddingVector> EmbedBatch(std::span<const std::string> texts) const override;

 private:
  EmbedderConfig config_;
};

std::unique_ptr<Embedder> MakeEmbedder(const EmbedderConfig& config);

/// True when `text` has at least one non-whitespace character.
bool HasContent(std::string_view text);

}  // namespace projection
