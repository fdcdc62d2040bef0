// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mltc {

enum class ErrorCode {
  kNarrowingCast,
  kShapeMismatch,
  kAccumulatorOverflowRisk,
  kOverflow,
  kBroadcastError,
  kDivisionByZero,
  kInvalidAxis,
  kEmptyAxis,
  kIndexOutOfBounds,
  kInvalidDtype,
  kInvalidTensor,
  kSchemaError,
  kValidationError,
  kCyclicGraph,
  kDanglingReference,
  kUnresolvedKernel,
  kShapeInferenceFailure,
  kInputMismatch,
  kFeatureMismatch,
  kUsage,
  kIo,
  kVerificationFailed,
};

/// Stable snake_case identifier used in diagnostics (`error: <code>: <detail>`).
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mltc
