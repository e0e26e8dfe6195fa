// Copyright 2026 The FactorScope Authors
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

#include "factorscope/error.h"

namespace factorscope {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
    case ErrorCode::kMissingFile:
      return "MissingFile";
    case ErrorCode::kMissingDay:
      return "MissingDay";
    case ErrorCode::kUnknownFactor:
      return "UnknownFactor";
    case ErrorCode::kUnknownStock:
      return "UnknownStock";
    case ErrorCode::kMalformedRow:
      return "MalformedRow";
    case ErrorCode::kInvalidConfig:
      return "InvalidConfig";
    case ErrorCode::kDimensionMismatch:
      return "DimensionMismatch";
    case ErrorCode::kNonFiniteInput:
      return "NonFiniteInput";
    case ErrorCode::kTooFewSamples:
      return "TooFewSamples";
    case ErrorCode::kIndivisiblePeriod:
      return "IndivisiblePeriod";
    case ErrorCode::kInsufficientHistory:
      return "InsufficientHistory";
    case ErrorCode::kUnknownCycle:
      return "UnknownCycle";
    case ErrorCode::kEmptyScope:
      return "EmptyScope";
    case ErrorCode::kInvalidSpec:
      return "InvalidSpec";
    case ErrorCode::kHorizonExceedsData:
      return "HorizonExceedsData";
    case ErrorCode::kNotFound:
      return "NotFound";
  }
  return "Unknown";
}

}  // namespace factorscope
