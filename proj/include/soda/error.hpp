// Copyright 2026 The soda-ood Authors
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

#include <stdexcept>
#include <string>
#include <string_view>

namespace soda {

enum class ErrorCode {
  // input validation
  kBadMagic,
  kTruncatedFile,
  kNonFiniteEntry,
  kDuplicateIndex,
  kUnknownLabelToken,
  kMalformedCsv,
  kDimensionMismatch,
  kLengthMismatch,
  kIterationMismatch,
  kKTooLarge,
  kEmptyClass,
  kTooFewSamples,
  kDegenerateLabels,
  kInvalidScenario,
  kInvalidArgument,
  kConflictingFlags,
  kIoFailure,
  // numeric
  kZeroNormRow,
  kSingularCovariance,
  kNonFiniteScore,
  kEmptyNeighborhood,
};

std::string_view error_name(ErrorCode code);

/// True for failures caused by numeric degeneracy rather than malformed input.
bool is_numeric(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

  /// Process exit code: 2 for validation failures, 3 for numeric ones.
  int exit_code() const noexcept { return is_numeric(code_) ? 3 : 2; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace soda
