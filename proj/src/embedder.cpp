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

#include "projection/embedder.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "httplib.h"
#include "json.hpp"
#include "projection/error.hpp"

namespace projection {
namespace {

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\v' || c == '\f' || c == '\r';
}

std::uint64_t Fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// SplitMix64 finalizer applied to a counter; stateless so any (seed, bucket,
// word) entry can be regenerated independently.
std::uint64_t CounterHash(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (counter + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

double EmbeddingVector::norm() const {
  double sum = 0.0;
  for (float v : values_) sum += static_cast<double>(v) * v;
  return std::sqrt(sum);
}

double Dot(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dimension() != b.dimension()) {
    throw Error(ErrorCode::kDimensionMismatch, "dot product of vectors with different dimensions");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.dimension(); ++i) sum += static_cast<double>(a[i]) * b[i];
  return sum;
}

double Cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  const double denom = a.norm() * b.norm();
  return denom == 0.0 ? 0.0 : Dot(a, b) / denom;
}

void EmbedderConfig::Validate() const {
  if (dimension < 2) throw Error(ErrorCode::kInvalidArgument, "embedding dimension must be >= 2");
  if (ngram_min == 0 || ngram_min > ngram_max) {
    throw Error(ErrorCode::kInvalidArgument, "n-gram range must satisfy 1 <= ngram_min <= ngram_max");
  }
  if (backend == EmbedderBackend::kRemoteService && remote_url.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "remote embedder requires a service url");
  }
}

bool HasContent(std::string_view text) {
  return std::any_of(text.begin(), text.end(), [](char c) { return !IsSpace(c); });
}

std::string NormalizeText(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (IsSpace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c);
  }
  return out;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> NgramBuckets(std::string_view text,
                                                                  const EmbedderConfig& config) {
  const std::string padded = " " + NormalizeText(text) + " ";
  std::map<std::uint32_t, std::uint32_t> counts;
  auto add = [&](std::string_view gram) {
    ++counts[static_cast<std::uint32_t>(Fnv1a(gram) & (kNgramBuckets - 1))];
  };
  if (padded.size() < config.ngram_min) {
    add(padded);
  } else {
    for (std::size_t n = config.ngram_min; n <= config.ngram_max && n <= padded.size(); ++n) {
      for (std::size_t i = 0; i + n <= padded.size(); ++i) add(std::string_view(padded).substr(i, n));
    }
  }
  return {counts.begin(), counts.end()};
}

std::vector<EmbeddingVector> Embedder::EmbedBatch(std::span<const std::string> texts) const {
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (!HasContent(texts[i])) throw EmptyTextError(i);
  }
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(Embed(t));
  return out;
}

LocalEmbedder::LocalEmbedder(EmbedderConfig config)
    : config_(std::move(config)),
      scale_(static_cast<float>(1.0 / std::sqrt(static_cast<double>(config_.dimension)))) {
  config_.Validate();
}

EmbeddingVector LocalEmbedder::Embed(std::string_view text) const {
  if (!HasContent(text)) throw EmptyTextError(0);

  const std::size_t dim = config_.dimension;
  const std::size_t words = (dim + 63) / 64;
  std::vector<double> acc(dim, 0.0);
  for (const auto& [bucket, count] : NgramBuckets(text, config_)) {
    const auto weight = static_cast<double>(count);
    for (std::size_t w = 0; w < words; ++w) {
      const std::uint64_t bits = CounterHash(config_.seed, std::uint64_t{bucket} * words + w);
      const std::size_t end = std::min(dim, (w + 1) * 64);
      for (std::size_t d = w * 64; d < end; ++d) {
        const bool positive = (bits >> (d - w * 64)) & 1U;
        acc[d] += positive ? weight : -weight;
      }
    }
  }

  double norm = 0.0;
  for (double& v : acc) {
    v *= scale_;
    norm += v * v;
  }
  norm = std::sqrt(norm);
  if (norm == 0.0) {
    throw Error(ErrorCode::kDegenerateVector, "n-gram projection cancelled to the zero vector");
  }
  std::vector<float> values(dim);
  for (std::size_t d = 0; d < dim; ++d) values[d] = static_cast<float>(acc[d] / norm);
  return EmbeddingVector(std::move(values));
}

RemoteEmbedder::RemoteEmbedder(EmbedderConfig config) : config_(std::move(config)) {
  config_.Validate();
}

EmbeddingVector RemoteEmbedder::Embed(std::string_view text) const {
  const std::string owned(text);
  return EmbedBatch(std::span<const std::string>(&owned, 1)).front();
}

std::vector<EmbeddingVector> RemoteEmbedder::EmbedBatch(std::span<const std::string> texts) const {
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (!HasContent(texts[i])) throw EmptyTextError(i);
  }
  if (texts.empty()) return {};

  httplib::Client client(config_.remote_url);
  const auto timeout = config_.remote_timeout;
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count(),
                                (timeout.count() % 1000) * 1000);
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count(),
                          (timeout.count() % 1000) * 1000);

  nlohmann::json request = {{"texts", std::vector<std::string>(texts.begin(), texts.end())}};
  auto result = client.Post("/embed", request.dump(), "application/json");
  if (!result) {
    throw Error(ErrorCode::kRemoteUnavailable,
                "embedding service " + config_.remote_url + " unreachable: " + httplib::to_string(result.error()));
  }
  if (result->status != 200) {
    throw Error(ErrorCode::kRemoteUnavailable,
                "embedding service returned HTTP " + std::to_string(result->status));
  }

  std::vector<EmbeddingVector> out;
  try {
    const auto body = nlohmann::json::parse(result->body);
    const auto& vectors = body.at("vectors");
    if (vectors.size() != texts.size()) {
      throw Error(ErrorCode::kCorruptData, "embedding service returned wrong number of vectors");
    }
    for (const auto& v : vectors) {
      auto values = v.get<std::vector<float>>();
      if (values.size() != config_.dimension) {
        throw Error(ErrorCode::kDimensionMismatch, "embedding service returned dimension " +
                                                       std::to_string(values.size()));
      }
      out.emplace_back(std::move(values));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptData, std::string("malformed embedding response: ") + e.what());
  }
  return out;
}

std::unique_ptr<Embedder> MakeEmbedder(const EmbedderConfig& config) {
  switch (config.backend) {
    case EmbedderBackend::kDeterministicLocal:
      return std::make_unique<LocalEmbedder>(config);
    case EmbedderBackend::kRemoteService:
      return std::make_unique<RemoteEmbedder>(config);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown embedder backend");
}

}  // namespace projection
