// SPDX-License-Identifier: Apache-2.0
#include "mltc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mltc {

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

const Tensor& require_dense(const Tensor& t, const char* kernel) {
  if (t.is_csr()) fail(ErrorCode::kInvalidTensor, std::string(kernel) + ": operand must be dense");
  return t;
}

void require_same_kernel_dtype(const Tensor& a, const Tensor& b, const char* kernel) {
  if (promote_for_kernel(a.dtype()) != promote_for_kernel(b.dtype())) {
    fail(ErrorCode::kInvalidDtype, std::string(kernel) + ": operand dtypes differ (" +
                                       std::string(dtype_name(a.dtype())) + " vs " +
                                       std::string(dtype_name(b.dtype())) + ")");
  }
}

template <class T>
std::span<const T> view(const Buffer& b) {
  return std::get<std::vector<T>>(b);
}

Buffer convert_buffer(const Buffer& src, DType target) {
  return std::visit(
      [&](const auto& in) {
        return dispatch_storage(target, [&]<class U>(std::type_identity<U>) {
          std::vector<U> out(in.size());
          for (std::size_t i = 0; i < in.size(); ++i) out[i] = static_cast<U>(in[i]);
          return Buffer(std::move(out));
        });
      },
      src);
}

Tensor retype(const Tensor& t, DType target) {
  if (t.is_csr()) {
    const auto& c = t.csr();
    return Tensor::csr(t.shape()[0], t.shape()[1], target, c.row_offsets, c.col_indices,
                       convert_buffer(c.values, target));
  }
  return Tensor::dense(t.shape(), target, convert_buffer(t.buffer(), target));
}

std::int64_t max_abs_integral(const Buffer& b) {
  return std::visit(
      [](const auto& v) {
        std::int64_t m = 0;
        for (auto x : v) m = std::max<std::int64_t>(m, std::llabs(static_cast<long long>(x)));
        return m;
      },
      b);
}

void check_matmul_dtypes(const Tensor& a, const Tensor& b, DType out_dtype, const char* kernel) {
  require_same_kernel_dtype(a, b, kernel);
  const DType in = promote_for_kernel(a.dtype());
  if (is_float(in)) {
    if (promote_for_kernel(out_dtype) != DType::Float32) {
      fail(ErrorCode::kInvalidDtype, std::string(kernel) + ": float operands accumulate in float32");
    }
  } else if (is_float(out_dtype) || !dtype_leq(in, out_dtype)) {
    fail(ErrorCode::kInvalidDtype, std::string(kernel) + ": accumulator " +
                                       std::string(dtype_name(out_dtype)) +
                                       " cannot hold products of " + std::string(dtype_name(in)));
  }
}

struct Extents {
  std::size_t outer = 1;
  std::size_t extent = 1;
  std::size_t inner = 1;
};

Extents split_at(const Shape& shape, Axis axis) {
  if (axis.index >= shape.size()) {
    fail(ErrorCode::kInvalidAxis, "axis " + std::to_string(axis.index) + " out of range for shape " +
                                      shape_string(shape));
  }
  Extents e;
  for (std::size_t i = 0; i < axis.index; ++i) e.outer *= shape[i];
  e.extent = shape[axis.index];
  for (std::size_t i = axis.index + 1; i < shape.size(); ++i) e.inner *= shape[i];
  return e;
}

Shape drop_axis(const Shape& shape, Axis axis) {
  Shape out = shape;
  out.erase(out.begin() + static_cast<std::ptrdiff_t>(axis.index));
  return out;
}

Shape broadcast_shape(const Shape& a, const Shape& b) {
  const std::size_t rank = std::max(a.size(), b.size());
  Shape out(rank);
  for (std::size_t i = 0; i < rank; ++i) {
    const std::size_t da = i < rank - a.size() ? 1 : a[i - (rank - a.size())];
    const std::size_t db = i < rank - b.size() ? 1 : b[i - (rank - b.size())];
    if (da != db && da != 1 && db != 1) {
      fail(ErrorCode::kBroadcastError,
           "cannot broadcast " + shape_string(a) + " with " + shape_string(b));
    }
    out[i] = da == 1 ? db : da;
  }
  return out;
}

// Row-major strides of `shape` aligned to `out_rank`, zero on broadcast dimensions.
std::vector<std::size_t> broadcast_strides(const Shape& shape, const Shape& out) {
  std::vector<std::size_t> strides(out.size(), 0);
  std::size_t stride = 1;
  for (std::size_t i = shape.size(); i-- > 0;) {
    const std::size_t o = i + (out.size() - shape.size());
    strides[o] = shape[i] == 1 ? 0 : stride;
    stride *= shape[i];
  }
  return strides;
}

template <class T>
bool compare(BinaryOp op, T x, T y) {
  switch (op) {
    case BinaryOp::kGreater:
      return x > y;
    case BinaryOp::kLess:
      return x < y;
    case BinaryOp::kGreaterEqual:
      return x >= y;
    case BinaryOp::kLessEqual:
      return x <= y;
    case BinaryOp::kEqual:
      return x == y;
    default:
      return false;
  }
}

float float_arith(BinaryOp op, float x, float y) {
  switch (op) {
    case BinaryOp::kAdd:
      return x + y;
    case BinaryOp::kSub:
      return x - y;
    case BinaryOp::kMul:
      return x * y;
    default:
      return x / y;
  }
}

std::int64_t int_arith(BinaryOp op, std::int64_t x, std::int64_t y) {
  switch (op) {
    case BinaryOp::kAdd:
      return x + y;
    case BinaryOp::kSub:
      return x - y;
    case BinaryOp::kMul:
      return x * y;
    default:
      if (y == 0) fail(ErrorCode::kDivisionByZero, "integer division by zero");
      return x / y;
  }
}

float apply_monotonic(MonotonicOp op, float x) {
  switch (op) {
    case MonotonicOp::kSigmoid:
      return 1.0f / (1.0f + std::exp(-x));
    case MonotonicOp::kRelu:
      return x > 0.0f ? x : 0.0f;
    case MonotonicOp::kTanh:
      return std::tanh(x);
    case MonotonicOp::kExp:
      return std::exp(x);
    case MonotonicOp::kSoftmax:
      break;
  }
  return x;
}

}  // namespace

std::string_view binary_op_name(BinaryOp op) {
  switch (op) {
    case BinaryOp::kAdd:
      return "add";
    case BinaryOp::kSub:
      return "sub";
    case BinaryOp::kMul:
      return "mul";
    case BinaryOp::kDiv:
      return "div";
    case BinaryOp::kGreater:
      return "greater";
    case BinaryOp::kLess:
      return "less";
    case BinaryOp::kGreaterEqual:
      return "greater_equal";
    case BinaryOp::kLessEqual:
      return "less_equal";
    case BinaryOp::kEqual:
      return "equal";
  }
  return "?";
}

std::string_view reduce_op_name(ReduceOp op) {
  switch (op) {
    case ReduceOp::kSum:
      return "sum";
    case ReduceOp::kMean:
      return "mean";
    case ReduceOp::kMax:
      return "max";
    case ReduceOp::kMin:
      return "min";
  }
  return "?";
}

std::string_view monotonic_op_name(MonotonicOp op) {
  switch (op) {
    case MonotonicOp::kSigmoid:
      return "sigmoid";
    case MonotonicOp::kSoftmax:
      return "softmax";
    case MonotonicOp::kRelu:
      return "relu";
    case MonotonicOp::kTanh:
      return "tanh";
    case MonotonicOp::kExp:
      return "exp";
  }
  return "?";
}

std::string_view norm_kind_name(NormKind kind) {
  switch (kind) {
    case NormKind::kL1:
      return "l1";
    case NormKind::kL2:
      return "l2";
    case NormKind::kMax:
      return "max";
  }
  return "?";
}

Tensor cast(const Tensor& t, DType target) {
  if (!dtype_leq(t.dtype(), target)) {
    fail(ErrorCode::kNarrowingCast, "cast from " + std::string(dtype_name(t.dtype())) + " to " +
                                        std::string(dtype_name(target)) + " would lose accuracy");
  }
  if (t.dtype() == target) return t;
  return retype(t, target);
}

Tensor convert_exact(const Tensor& t, DType target) {
  if (t.dtype() == target) return t;
  const Buffer& values = t.is_csr() ? t.csr().values : t.buffer();
  std::visit(
      [&](const auto& v) {
        for (auto x : v) {
          if (!representable(static_cast<double>(x), target)) {
            fail(ErrorCode::kNarrowingCast, "value " + std::to_string(static_cast<double>(x)) +
                                                " is not exactly representable in " +
                                                std::string(dtype_name(target)));
          }
        }
      },
      values);
  return retype(t, target);
}

void check_accumulator_bound(std::size_t inner, std::int64_t max_a, std::int64_t max_b, DType out) {
  if (is_float(out)) return;
  // Saturating product so the bound check itself cannot overflow.
  const long double bound = static_cast<long double>(inner) * static_cast<long double>(max_a) *
                            static_cast<long double>(max_b);
  if (bound > static_cast<long double>(dtype_max(promote_for_kernel(out)))) {
    fail(ErrorCode::kAccumulatorOverflowRisk,
         "accumulator " + std::string(dtype_name(out)) + " cannot hold " + std::to_string(inner) +
             " x " + std::to_string(max_a) + " x " + std::to_string(max_b));
  }
}

Tensor matmul(const Tensor& a, const Tensor& b, DType out_dtype) {
  require_dense(a, "matmul");
  require_dense(b, "matmul");
  if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.rows()) {
    fail(ErrorCode::kShapeMismatch, "matmul: " + shape_string(a.shape()) + " x " + shape_string(b.shape()));
  }
  check_matmul_dtypes(a, b, out_dtype, "matmul");
  const std::size_t m = a.rows(), k_dim = a.cols(), n = b.cols();
  const DType out = promote_for_kernel(out_dtype);

  if (is_float(promote_for_kernel(a.dtype()))) {
    const auto av = view<float>(a.buffer());
    const auto bv = view<float>(b.buffer());
    std::vector<float> result(m * n, 0.0f);
    for (std::size_t i = 0; i < m; ++i) {
      float* acc = result.data() + i * n;
      for (std::size_t k = 0; k < k_dim; ++k) {
        const float aik = av[i * k_dim + k];
        const float* brow = bv.data() + k * n;
        for (std::size_t j = 0; j < n; ++j) acc[j] = acc[j] + aik * brow[j];
      }
    }
    return Tensor::from_floats({m, n}, std::move(result));
  }

  check_accumulator_bound(k_dim, max_abs_integral(a.buffer()), max_abs_integral(b.buffer()), out);
  std::vector<std::int64_t> acc(m * n, 0);
  std::visit(
      [&](const auto& av) {
        using T = typename std::decay_t<decltype(av)>::value_type;
        const auto bv = view<T>(b.buffer());
        for (std::size_t i = 0; i < m; ++i) {
          std::int64_t* row = acc.data() + i * n;
          for (std::size_t k = 0; k < k_dim; ++k) {
            const auto aik = static_cast<std::int64_t>(av[i * k_dim + k]);
            const T* brow = bv.data() + k * n;
            for (std::size_t j = 0; j < n; ++j) row[j] += aik * static_cast<std::int64_t>(brow[j]);
          }
        }
      },
      a.buffer());
  Buffer buffer = dispatch_storage(out, [&]<class U>(std::type_identity<U>) {
    return Buffer(std::vector<U>(acc.begin(), acc.end()));
  });
  return Tensor::dense({m, n}, out, std::move(buffer));
}

Tensor sparse_dense_matmul(const Tensor& a, const Tensor& b, DType out_dtype) {
  require_dense(a, "sparse_dense_matmul");
  if (!b.is_csr()) fail(ErrorCode::kInvalidTensor, "sparse_dense_matmul: right operand must be CSR");
  if (a.rank() != 2 || a.cols() != b.rows()) {
    fail(ErrorCode::kShapeMismatch,
         "sparse_dense_matmul: " + shape_string(a.shape()) + " x " + shape_string(b.shape()));
  }
  check_matmul_dtypes(a, b, out_dtype, "sparse_dense_matmul");
  const std::size_t m = a.rows(), k_dim = a.cols(), n = b.cols();
  const DType out = promote_for_kernel(out_dtype);
  const auto& c = b.csr();

  if (is_float(promote_for_kernel(a.dtype()))) {
    const auto av = view<float>(a.buffer());
    const auto vals = view<float>(c.values);
    std::vector<float> result(m * n, 0.0f);
    for (std::size_t i = 0; i < m; ++i) {
      float* acc = result.data() + i * n;
      for (std::size_t k = 0; k < k_dim; ++k) {
        const float aik = av[i * k_dim + k];
        for (auto p = c.row_offsets[k]; p < c.row_offsets[k + 1]; ++p) {
          const auto pu = static_cast<std::size_t>(p);
          float& slot = acc[static_cast<std::size_t>(c.col_indices[pu])];
          slot = slot + aik * vals[pu];
        }
      }
    }
    return Tensor::from_floats({m, n}, std::move(result));
  }

  check_accumulator_bound(k_dim, max_abs_integral(a.buffer()), max_abs_integral(c.values), out);
  std::vector<std::int64_t> acc(m * n, 0);
  std::visit(
      [&](const auto& av) {
        using T = typename std::decay_t<decltype(av)>::value_type;
        const auto vals = view<T>(c.values);
        for (std::size_t i = 0; i < m; ++i) {
          std::int64_t* row = acc.data() + i * n;
          for (std::size_t k = 0; k < k_dim; ++k) {
            const auto aik = static_cast<std::int64_t>(av[i * k_dim + k]);
            for (auto p = c.row_offsets[k]; p < c.row_offsets[k + 1]; ++p) {
              const auto pu = static_cast<std::size_t>(p);
              row[static_cast<std::size_t>(c.col_indices[pu])] += aik * static_cast<std::int64_t>(vals[pu]);
            }
          }
        }
      },
      a.buffer());
  Buffer buffer = dispatch_storage(out, [&]<class U>(std::type_identity<U>) {
    return Buffer(std::vector<U>(acc.begin(), acc.end()));
  });
  return Tensor::dense({m, n}, out, std::move(buffer));
}

Tensor ew_binary(BinaryOp op, const Tensor& a, const Tensor& b) {
  require_dense(a, binary_op_name(op).data());
  require_dense(b, binary_op_name(op).data());
  require_same_kernel_dtype(a, b, binary_op_name(op).data());
  const DType in = promote_for_kernel(a.dtype());
  if (!is_comparison(op) && in == DType::Bool) {
    fail(ErrorCode::kInvalidDtype, std::string(binary_op_name(op)) + ": arithmetic on bool");
  }
  const Shape out_shape = broadcast_shape(a.shape(), b.shape());
  const auto sa = broadcast_strides(a.shape(), out_shape);
  const auto sb = broadcast_strides(b.shape(), out_shape);
  const std::size_t n = shape_numel(out_shape);
  const std::size_t rank = out_shape.size();

  // Walks the output in row-major order, tracking both operand offsets.
  auto for_each_pair = [&](auto&& f) {
    std::vector<std::size_t> idx(rank, 0);
    std::size_t ia = 0, ib = 0;
    for (std::size_t flat = 0; flat < n; ++flat) {
      f(flat, ia, ib);
      for (std::size_t d = rank; d-- > 0;) {
        ++idx[d];
        ia += sa[d];
        ib += sb[d];
        if (idx[d] < out_shape[d]) break;
        ia -= sa[d] * idx[d];
        ib -= sb[d] * idx[d];
        idx[d] = 0;
      }
    }
  };

  return std::visit(
      [&](const auto& av) -> Tensor {
        using T = typename std::decay_t<decltype(av)>::value_type;
        const auto bv = view<T>(b.buffer());
        if (is_comparison(op)) {
          std::vector<std::uint8_t> out(n);
          for_each_pair([&](std::size_t f, std::size_t i, std::size_t j) {
            out[f] = compare(op, av[i], bv[j]) ? 1 : 0;
          });
          return Tensor::dense(out_shape, DType::Bool, Buffer(std::move(out)));
        }
        std::vector<T> out(n);
        if constexpr (std::is_floating_point_v<T>) {
          for_each_pair([&](std::size_t f, std::size_t i, std::size_t j) {
            out[f] = float_arith(op, av[i], bv[j]);
          });
        } else {
          const std::int64_t lo = dtype_min(in), hi = dtype_max(in);
          for_each_pair([&](std::size_t f, std::size_t i, std::size_t j) {
            const std::int64_t r = int_arith(op, av[i], bv[j]);
            if (r < lo || r > hi) {
              fail(ErrorCode::kOverflow, std::string(binary_op_name(op)) + ": result " +
                                             std::to_string(r) + " overflows " +
                                             std::string(dtype_name(in)));
            }
            out[f] = static_cast<T>(r);
          });
        }
        return Tensor::dense(out_shape, in, Buffer(std::move(out)));
      },
      a.buffer());
}

Tensor reduce(ReduceOp op, const Tensor& t, Axis axis) {
  require_dense(t, "reduce");
  const Extents e = split_at(t.shape(), axis);
  const Shape out_shape = drop_axis(t.shape(), axis);
  const DType in = promote_for_kernel(t.dtype());
  if (op == ReduceOp::kMean && !is_float(in)) {
    fail(ErrorCode::kInvalidDtype, "reduce mean requires a float input");
  }
  if ((op == ReduceOp::kMax || op == ReduceOp::kMin || op == ReduceOp::kMean) && e.extent == 0) {
    fail(ErrorCode::kEmptyAxis, "reduce " + std::string(reduce_op_name(op)) + " over an empty axis");
  }
  const std::size_t n = e.outer * e.inner;

  return std::visit(
      [&](const auto& v) -> Tensor {
        using T = typename std::decay_t<decltype(v)>::value_type;
        auto at = [&](std::size_t o, std::size_t k, std::size_t i) { return v[(o * e.extent + k) * e.inner + i]; };
        if (op == ReduceOp::kMax || op == ReduceOp::kMin) {
          std::vector<T> out(n);
          for (std::size_t o = 0; o < e.outer; ++o) {
            for (std::size_t i = 0; i < e.inner; ++i) {
              T best = at(o, 0, i);
              for (std::size_t k = 1; k < e.extent; ++k) {
                const T x = at(o, k, i);
                if (op == ReduceOp::kMax ? x > best : x < best) best = x;
              }
              out[o * e.inner + i] = best;
            }
          }
          return Tensor::dense(out_shape, in, Buffer(std::move(out)));
        }
        if constexpr (std::is_floating_point_v<T>) {
          std::vector<float> out(n);
          for (std::size_t o = 0; o < e.outer; ++o) {
            for (std::size_t i = 0; i < e.inner; ++i) {
              float acc = 0.0f;
              for (std::size_t k = 0; k < e.extent; ++k) acc = acc + at(o, k, i);
              if (op == ReduceOp::kMean) acc = acc / static_cast<float>(e.extent);
              out[o * e.inner + i] = acc;
            }
          }
          return Tensor::from_floats(out_shape, std::move(out));
        } else {
          std::vector<std::int32_t> out(n);
          for (std::size_t o = 0; o < e.outer; ++o) {
            for (std::size_t i = 0; i < e.inner; ++i) {
              std::int64_t acc = 0;
              for (std::size_t k = 0; k < e.extent; ++k) acc += at(o, k, i);
              if (acc < dtype_min(DType::Int32) || acc > dtype_max(DType::Int32)) {
                fail(ErrorCode::kOverflow, "reduce sum overflows int32");
              }
              out[o * e.inner + i] = static_cast<std::int32_t>(acc);
            }
          }
          return Tensor::dense(out_shape, DType::Int32, Buffer(std::move(out)));
        }
      },
      t.buffer());
}

Tensor argmax(const Tensor& t, Axis axis) {
  require_dense(t, "argmax");
  const Extents e = split_at(t.shape(), axis);
  if (e.extent == 0) fail(ErrorCode::kEmptyAxis, "argmax over an empty axis");
  std::vector<std::int32_t> out(e.outer * e.inner);
  std::visit(
      [&](const auto& v) {
        for (std::size_t o = 0; o < e.outer; ++o) {
          for (std::size_t i = 0; i < e.inner; ++i) {
            std::size_t best = 0;
            auto best_v = v[(o * e.extent) * e.inner + i];
            for (std::size_t k = 1; k < e.extent; ++k) {
              const auto x = v[(o * e.extent + k) * e.inner + i];
              if (x > best_v) {  // strict: ties keep the smallest index
                best = k;
                best_v = x;
              }
            }
            out[o * e.inner + i] = static_cast<std::int32_t>(best);
          }
        }
      },
      t.buffer());
  return Tensor::dense(drop_axis(t.shape(), axis), DType::Int32, Buffer(std::move(out)));
}

Tensor gather_rows(const Tensor& table, const Tensor& indices) {
  const Tensor dense_table = densify(table);
  require_dense(indices, "gather_rows");
  if (dense_table.rank() != 2) {
    fail(ErrorCode::kShapeMismatch, "gather_rows: table must be 2-D, got " + shape_string(table.shape()));
  }
  const bool column = indices.rank() == 2 && indices.shape()[1] == 1;
  if (indices.rank() != 1 && !column) {
    fail(ErrorCode::kShapeMismatch, "gather_rows: indices must be 1-D, got " + shape_string(indices.shape()));
  }
  if (is_float(indices.dtype())) fail(ErrorCode::kInvalidDtype, "gather_rows: indices must be integral");
  const std::size_t n = indices.shape()[0];
  const std::size_t rows = dense_table.rows(), cols = dense_table.cols();
  std::vector<std::size_t> idx(n);
  std::visit(
      [&](const auto& v) {
        for (std::size_t i = 0; i < n; ++i) {
          const auto x = static_cast<std::int64_t>(v[i]);
          if (x < 0 || static_cast<std::size_t>(x) >= rows) {
            fail(ErrorCode::kIndexOutOfBounds, "gather_rows: index " + std::to_string(x) +
                                                   " outside [0, " + std::to_string(rows) + ")");
          }
          idx[i] = static_cast<std::size_t>(x);
        }
      },
      indices.buffer());
  Buffer out = std::visit(
      [&](const auto& tv) {
        using T = typename std::decay_t<decltype(tv)>::value_type;
        std::vector<T> r(n * cols);
        for (std::size_t i = 0; i < n; ++i) {
          std::copy_n(tv.begin() + static_cast<std::ptrdiff_t>(idx[i] * cols), cols,
                      r.begin() + static_cast<std::ptrdiff_t>(i * cols));
        }
        return Buffer(std::move(r));
      },
      dense_table.buffer());
  return Tensor::dense({n, cols}, promote_for_kernel(table.dtype()), std::move(out));
}

Tensor monotonic_apply(MonotonicOp op, const Tensor& t, Axis axis) {
  require_dense(t, "monotonic_apply");
  if (!is_float(t.dtype())) {
    fail(ErrorCode::kInvalidDtype, std::string(monotonic_op_name(op)) + " requires a float input");
  }
  const auto v = view<float>(t.buffer());
  std::vector<float> out(v.size());
  if (op != MonotonicOp::kSoftmax) {
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = apply_monotonic(op, v[i]);
    return Tensor::from_floats(t.shape(), std::move(out));
  }
  const Extents e = split_at(t.shape(), axis);
  for (std::size_t o = 0; o < e.outer; ++o) {
    for (std::size_t i = 0; i < e.inner; ++i) {
      auto pos = [&](std::size_t k) { return (o * e.extent + k) * e.inner + i; };
      float hi = -std::numeric_limits<float>::infinity();
      for (std::size_t k = 0; k < e.extent; ++k) hi = std::max(hi, v[pos(k)]);
      float sum = 0.0f;
      for (std::size_t k = 0; k < e.extent; ++k) {
        out[pos(k)] = std::exp(v[pos(k)] - hi);
        sum = sum + out[pos(k)];
      }
      for (std::size_t k = 0; k < e.extent; ++k) out[pos(k)] = out[pos(k)] / sum;
    }
  }
  return Tensor::from_floats(t.shape(), std::move(out));
}

Tensor row_norm(const Tensor& t, NormKind kind) {
  require_dense(t, "row_norm");
  if (t.rank() != 2) fail(ErrorCode::kShapeMismatch, "row_norm: expected 2-D input");
  if (!is_float(t.dtype())) fail(ErrorCode::kInvalidDtype, "row_norm requires a float input");
  const auto v = view<float>(t.buffer());
  const std::size_t rows = t.rows(), cols = t.cols();
  std::vector<float> out(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    float acc = 0.0f;
    for (std::size_t c = 0; c < cols; ++c) {
      const float x = v[r * cols + c];
      switch (kind) {
        case NormKind::kL1:
          acc = acc + std::fabs(x);
          break;
        case NormKind::kL2:
          acc = acc + x * x;
          break;
        case NormKind::kMax:
          acc = std::max(acc, std::fabs(x));
          break;
      }
    }
    if (kind == NormKind::kL2) acc = std::sqrt(acc);
    out[r] = acc == 0.0f ? 1.0f : acc;
  }
  return Tensor::from_floats({rows, 1}, std::move(out));
}

Tensor stack(std::span<const Tensor> parts) {
  if (parts.empty()) fail(ErrorCode::kShapeMismatch, "stack: no inputs");
  const Shape& inner = parts.front().shape();
  const DType dtype = promote_for_kernel(parts.front().dtype());
  for (const Tensor& p : parts) {
    require_dense(p, "stack");
    if (p.shape() != inner) {
      fail(ErrorCode::kShapeMismatch, "stack: " + shape_string(p.shape()) + " vs " + shape_string(inner));
    }
    if (promote_for_kernel(p.dtype()) != dtype) fail(ErrorCode::kInvalidDtype, "stack: operand dtypes differ");
  }
  Shape out_shape{parts.size()};
  out_shape.insert(out_shape.end(), inner.begin(), inner.end());
  Buffer out = dispatch_storage(dtype, [&]<class T>(std::type_identity<T>) {
    std::vector<T> r;
    r.reserve(shape_numel(out_shape));
    for (const Tensor& p : parts) {
      const auto pv = view<T>(p.buffer());
      r.insert(r.end(), pv.begin(), pv.end());
    }
    return Buffer(std::move(r));
  });
  return Tensor::dense(std::move(out_shape), dtype, std::move(out));
}

Tensor broadcast_rows(const Tensor& row, std::size_t batch) {
  require_dense(row, "broadcast_rows");
  if (row.rank() != 2 || row.rows() != 1) {
    fail(ErrorCode::kShapeMismatch, "broadcast_rows: expected a (1, C) row, got " + shape_string(row.shape()));
  }
  const std::size_t cols = row.cols();
  Buffer out = std::visit(
      [&](const auto& v) {
        using T = typename std::decay_t<decltype(v)>::value_type;
        std::vector<T> r;
        r.reserve(batch * cols);
        for (std::size_t i = 0; i < batch; ++i) r.insert(r.end(), v.begin(), v.end());
        return Buffer(std::move(r));
      },
      row.buffer());
  return Tensor::dense({batch, cols}, promote_for_kernel(row.dtype()), std::move(out));
}

}  // namespace mltc
