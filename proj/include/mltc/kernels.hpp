// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "mltc/tensor.hpp"

namespace mltc {

/// Dimension index; must be below the rank of the tensor it is applied to.
struct Axis {
  std::size_t index = 0;
};

enum class BinaryOp { kAdd, kSub, kMul, kDiv, kGreater, kLess, kGreaterEqual, kLessEqual, kEqual };
enum class ReduceOp { kSum, kMean, kMax, kMin };
enum class MonotonicOp { kSigmoid, kSoftmax, kRelu, kTanh, kExp };
enum class NormKind { kL1, kL2, kMax };

inline constexpr bool is_comparison(BinaryOp op) {
  return op != BinaryOp::kAdd && op != BinaryOp::kSub && op != BinaryOp::kMul && op != BinaryOp::kDiv;
}

std::string_view binary_op_name(BinaryOp op);
std::string_view reduce_op_name(ReduceOp op);
std::string_view monotonic_op_name(MonotonicOp op);
std::string_view norm_kind_name(NormKind kind);

/// Lossless widening. Throws kNarrowingCast unless `target` >= t.dtype().
Tensor cast(const Tensor& t, DType target);

/// Re-types in either direction, failing with kNarrowingCast if any element changes value.
Tensor convert_exact(const Tensor& t, DType target);

/// Throws kAccumulatorOverflowRisk when inner * max_a * max_b exceeds the range of `out`.
void check_accumulator_bound(std::size_t inner, std::int64_t max_a, std::int64_t max_b, DType out);

/// Dense 2-D product accumulated in `out_dtype` (Float32 for float inputs, an integer type
/// otherwise). Each output element sums over the inner dimension in ascending order.
Tensor matmul(const Tensor& a, const Tensor& b, DType out_dtype);

/// `a` dense, `b` CSR. Bit-identical to matmul(a, densify(b), out_dtype) for finite inputs.
Tensor sparse_dense_matmul(const Tensor& a, const Tensor& b, DType out_dtype);

/// Broadcasting element-wise op. Arithmetic keeps the (promoted) input dtype; comparisons
/// return Bool.
Tensor ew_binary(BinaryOp op, const Tensor& a, const Tensor& b);

Tensor reduce(ReduceOp op, const Tensor& t, Axis axis);

/// Index of the first maximum along `axis`, as Int32.
Tensor argmax(const Tensor& t, Axis axis);

/// Row i of the result is table[indices[i]]. Indices may be 1-D or a single column.
Tensor gather_rows(const Tensor& table, const Tensor& indices);

/// Element-wise order-preserving function; softmax normalises along `axis`.
Tensor monotonic_apply(MonotonicOp op, const Tensor& t, Axis axis = {1});

/// Per-row norm as a (rows, 1) Float32 column. All-zero rows report 1.0.
Tensor row_norm(const Tensor& t, NormKind kind);

/// Stacks same-shaped tensors along a new leading axis.
Tensor stack(std::span<const Tensor> parts);

/// Repeats a (1, C) row `batch` times.
Tensor broadcast_rows(const Tensor& row, std::size_t batch);

}  // namespace mltc
