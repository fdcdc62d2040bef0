// SPDX-License-Identifier: Apache-2.0
#include "mltc/error.hpp"

namespace mltc {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNarrowingCast: return "narrowing_cast";
    case ErrorCode::kShapeMismatch: return "shape_mismatch";
    case ErrorCode::kAccumulatorOverflowRisk: return "accumulator_overflow_risk";
    case ErrorCode::kOverflow: return "overflow";
    case ErrorCode::kBroadcastError: return "broadcast_error";
    case ErrorCode::kDivisionByZero: return "division_by_zero";
    case ErrorCode::kInvalidAxis: return "invalid_axis";
    case ErrorCode::kEmptyAxis: return "empty_axis";
    case ErrorCode::kIndexOutOfBounds: return "index_out_of_bounds";
    case ErrorCode::kInvalidDtype: return "invalid_dtype";
    case ErrorCode::kInvalidTensor: return "invalid_tensor";
    case ErrorCode::kSchemaError: return "schema_error";
    case ErrorCode::kValidationError: return "validation_error";
    case ErrorCode::kCyclicGraph: return "cyclic_graph";
    case ErrorCode::kDanglingReference: return "dangling_reference";
    case ErrorCode::kUnresolvedKernel: return "unresolved_kernel";
    case ErrorCode::kShapeInferenceFailure: return "shape_inference_failure";
    case ErrorCode::kInputMismatch: return "input_mismatch";
    case ErrorCode::kFeatureMismatch: return "feature_mismatch";
    case ErrorCode::kUsage: return "usage";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kVerificationFailed: return "verification_failed";
  }
  return "unknown";
}

}  // namespace mltc
