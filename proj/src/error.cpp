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

#include "soda/error.hpp"

namespace soda {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kNonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::kDuplicateIndex: return "DuplicateIndex";
    case ErrorCode::kUnknownLabelToken: return "UnknownLabelToken";
    case ErrorCode::kMalformedCsv: return "MalformedCsv";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kIterationMismatch: return "IterationMismatch";
    case ErrorCode::kKTooLarge: return "KTooLarge";
    case ErrorCode::kEmptyClass: return "EmptyClass";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kDegenerateLabels: return "DegenerateLabels";
    case ErrorCode::kInvalidScenario: return "InvalidScenario";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kConflictingFlags: return "ConflictingFlags";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kZeroNormRow: return "ZeroNormRow";
    case ErrorCode::kSingularCovariance: return "SingularCovariance";
    case ErrorCode::kNonFiniteScore: return "NonFiniteScore";
    case ErrorCode::kEmptyNeighborhood: return "EmptyNeighborhood";
  }
  return "Unknown";
}

bool is_numeric(ErrorCode code) {
  switch (code) {
    case ErrorCode::kZeroNormRow:
    case ErrorCode::kSingularCovariance:
    case ErrorCode::kNonFiniteScore:
    case ErrorCode::kEmptyNeighborhood:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(error_name(code)) + ": " + detail),
      code_(code),
      detail_(detail) {}

}  // namespace soda
