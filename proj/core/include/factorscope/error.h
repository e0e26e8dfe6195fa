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

#ifndef FACTORSCOPE_ERROR_H_
#define FACTORSCOPE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace factorscope {

enum class ErrorCode {
  kInvalidArgument,
  kMissingFile,
  kMissingDay,
  kUnknownFactor,
  kUnknownStock,
  kMalformedRow,
  kInvalidConfig,
  kDimensionMismatch,
  kNonFiniteInput,
  kTooFewSamples,
  kIndivisiblePeriod,
  kInsufficientHistory,
  kUnknownCycle,
  kEmptyScope,
  kInvalidSpec,
  kHorizonExceedsData,
  kNotFound,
};

// Stable identifier used in API error payloads, e.g. "MissingDay".
std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace factorscope

#endif  // FACTORSCOPE_ERROR_H_
