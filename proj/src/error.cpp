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

#include "projection/error.hpp"

namespace projection {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyText: return "EmptyText";
    case ErrorCode::kRemoteUnavailable: return "RemoteUnavailable";
    case ErrorCode::kDegenerateVector: return "DegenerateVector";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kUnknownId: return "UnknownId";
    case ErrorCode::kDegenerateCentroid: return "DegenerateCentroid";
    case ErrorCode::kTooFewPoints: return "TooFewPoints";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kInvalidTree: return "InvalidTree";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kCycleDetected: return "CycleDetected";
    case ErrorCode::kCrossMapLink: return "CrossMapLink";
    case ErrorCode::kUnknownMap: return "UnknownMap";
    case ErrorCode::kCorruptData: return "CorruptData";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace projection
