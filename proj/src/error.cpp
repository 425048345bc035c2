// Copyright 2026 The mdport Authors
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

#include "mdport/error.hpp"

namespace mdport {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kSpanDeficient: return "SpanDeficient";
    case ErrorCode::kTooManyScenarios: return "TooManyScenarios";
    case ErrorCode::kGuardExceeded: return "GuardExceeded";
    case ErrorCode::kUnsupported: return "Unsupported";
    case ErrorCode::kEmptyIntersection: return "EmptyIntersection";
    case ErrorCode::kUnboundedFace: return "UnboundedFace";
    case ErrorCode::kAssumptionB: return "AssumptionB";
    case ErrorCode::kZeroRiskPortfolio: return "ZeroRiskPortfolio";
    case ErrorCode::kNotAnIdentifier: return "NotAnIdentifier";
    case ErrorCode::kNumericUnderflow: return "NumericUnderflow";
    case ErrorCode::kIterationLimit: return "IterationLimit";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kUnbounded: return "Unbounded";
    case ErrorCode::kDichotomyViolation: return "DichotomyViolation";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParseError:
    case ErrorCode::kRankDeficient:
    case ErrorCode::kSpanDeficient:
    case ErrorCode::kUnsupported:
    case ErrorCode::kAssumptionB:
    case ErrorCode::kZeroRiskPortfolio:
      return true;
    default:
      return false;
  }
}

}  // namespace mdport
