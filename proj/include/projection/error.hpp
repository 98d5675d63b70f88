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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace projection {

enum class ErrorCode {
  kEmptyText,
  kRemoteUnavailable,
  kDegenerateVector,
  kDuplicateId,
  kDimensionMismatch,
  kUnknownId,
  kDegenerateCentroid,
  kTooFewPoints,
  kOutOfRange,
  kInvalidTree,
  kInvalidArgument,
  kCycleDetected,
  kCrossMapLink,
  kUnknownMap,
  kCorruptData,
  kIoError,
};

std::string_view ErrorCodeName(ErrorCode code);

// All engine failures surface as this exception; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by batch embedding; `index` is the position of the offending text.
class EmptyTextError : public Error {
 public:
  explicit EmptyTextError(std::size_t index)
      : Error(ErrorCode::kEmptyText,
              "text at index " + std::to_string(index) + " is empty or whitespace-only"),
        index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace projection
