// SPDX-License-Identifier: Apache-2.0
#include "mltc/tensor.hpp"

#include <cmath>
#include <cstring>
#include <functional>
#include <numeric>
#include <sstream>

namespace mltc {

namespace {

bool holds_storage_for(const Buffer& buffer, DType dtype) {
  return dispatch_storage(dtype, [&]<class U>(std::type_identity<U>) {
    return std::holds_alternative<std::vector<U>>(buffer);
  });
}

std::size_t buffer_size(const Buffer& buffer) {
  return std::visit([](const auto& v) { return v.size(); }, buffer);
}

void check_buffer(const Buffer& buffer, DType dtype, std::size_t expected_len,
                  const char* what) {
  if (!holds_storage_for(buffer, dtype)) {
    throw Error(ErrorCode::kInvalidTensor,
                std::string(what) + ": buffer element type does not match dtype " +
                    std::string(dtype_name(dtype)));
  }
  if (buffer_size(buffer) != expected_len) {
    throw Error(ErrorCode::kInvalidTensor,
                std::string(what) + ": buffer holds " + std::to_string(buffer_size(buffer)) +
                    " elements, expected " + std::to_string(expected_len));
  }
  if (dtype == DType::Bool || dtype == DType::Int4) {
    std::visit(
        [&](const auto& v) {
          for (auto x : v) {
            if (!representable(static_cast<double>(x), dtype)) {
              throw Error(ErrorCode::kInvalidTensor,
                          std::string(what) + ": value " + std::to_string(static_cast<double>(x)) +
                              " out of range for " + std::string(dtype_name(dtype)));
            }
          }
        },
        buffer);
  }
}

double buffer_at(const Buffer& buffer, std::size_t i) {
  return std::visit([i](const auto& v) { return static_cast<double>(v[i]); }, buffer);
}

}  // namespace

std::size_t shape_numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Tensor::Tensor() : Tensor(Tensor::zeros({0}, DType::Float32)) {}

Tensor Tensor::dense(Shape shape, DType dtype, Buffer buffer) {
  check_buffer(buffer, dtype, shape_numel(shape), "dense tensor");
  auto rep = std::make_shared<Rep>();
  rep->shape = std::move(shape);
  rep->dtype = dtype;
  rep->storage = std::move(buffer);
  return Tensor(std::move(rep));
}

Tensor Tensor::from_values(Shape shape, DType dtype, std::span<const double> values) {
  if (values.size() != shape_numel(shape)) {
    throw Error(ErrorCode::kInvalidTensor, "from_values: " + std::to_string(values.size()) +
                                               " values for shape " + shape_string(shape));
  }
  Buffer buffer = dispatch_storage(dtype, [&]<class T>(std::type_identity<T>) {
    std::vector<T> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double v = values[i];
      const bool ok = dtype == DType::Float16 ? representable(v, DType::Float32) : representable(v, dtype);
      if (!ok) {
        throw Error(ErrorCode::kInvalidTensor, "from_values: " + std::to_string(v) +
                                                   " is not representable in " +
                                                   std::string(dtype_name(dtype)));
      }
      out[i] = static_cast<T>(v);
    }
    return Buffer(std::move(out));
  });
  return dense(std::move(shape), dtype, std::move(buffer));
}

Tensor Tensor::from_floats(Shape shape, std::vector<float> values) {
  return dense(std::move(shape), DType::Float32, Buffer(std::move(values)));
}

Tensor Tensor::zeros(Shape shape, DType dtype) {
  const std::size_t n = shape_numel(shape);
  Buffer buffer = dispatch_storage(dtype, [n]<class T>(std::type_identity<T>) {
    return Buffer(std::vector<T>(n, T{0}));
  });
  auto rep = std::make_shared<Rep>();
  rep->shape = std::move(shape);
  rep->dtype = dtype;
  rep->storage = std::move(buffer);
  return Tensor(std::move(rep));
}

Tensor Tensor::csr(std::size_t rows, std::size_t cols, DType dtype,
                   std::vector<std::int64_t> row_offsets, std::vector<std::int32_t> col_indices,
                   Buffer values) {
  if (row_offsets.size() != rows + 1 || row_offsets.front() != 0) {
    throw Error(ErrorCode::kInvalidTensor, "csr: row_offsets must have rows+1 entries starting at 0");
  }
  for (std::size_t r = 0; r < rows; ++r) {
    if (row_offsets[r + 1] < row_offsets[r]) {
      throw Error(ErrorCode::kInvalidTensor, "csr: row_offsets must be non-decreasing");
    }
  }
  const auto nnz = static_cast<std::size_t>(row_offsets.back());
  if (col_indices.size() != nnz) {
    throw Error(ErrorCode::kInvalidTensor, "csr: col_indices length differs from nnz");
  }
  for (auto c : col_indices) {
    if (c < 0 || static_cast<std::size_t>(c) >= cols) {
      throw Error(ErrorCode::kInvalidTensor, "csr: column index " + std::to_string(c) +
                                                 " outside [0, " + std::to_string(cols) + ")");
    }
  }
  check_buffer(values, dtype, nnz, "csr values");
  auto rep = std::make_shared<Rep>();
  rep->shape = {rows, cols};
  rep->dtype = dtype;
  rep->storage = CsrData{std::move(row_offsets), std::move(col_indices), std::move(values)};
  return Tensor(std::move(rep));
}

std::size_t Tensor::numel() const { return shape_numel(rep_->shape); }

std::size_t Tensor::rows() const {
  if (rank() != 2) throw Error(ErrorCode::kShapeMismatch, "rows() on non-2-D tensor " + shape_string(shape()));
  return rep_->shape[0];
}

std::size_t Tensor::cols() const {
  if (rank() != 2) throw Error(ErrorCode::kShapeMismatch, "cols() on non-2-D tensor " + shape_string(shape()));
  return rep_->shape[1];
}

const Buffer& Tensor::buffer() const {
  if (const auto* b = std::get_if<Buffer>(&rep_->storage)) return *b;
  throw Error(ErrorCode::kInvalidTensor, "dense buffer requested from a CSR tensor");
}

const CsrData& Tensor::csr() const {
  if (const auto* c = std::get_if<CsrData>(&rep_->storage)) return *c;
  throw Error(ErrorCode::kInvalidTensor, "CSR data requested from a dense tensor");
}

double Tensor::at(std::size_t flat) const {
  if (!is_csr()) return buffer_at(buffer(), flat);
  const auto& c = csr();
  const std::size_t n_cols = rep_->shape[1];
  const std::size_t r = flat / n_cols;
  const auto col = static_cast<std::int32_t>(flat % n_cols);
  for (auto k = c.row_offsets[r]; k < c.row_offsets[r + 1]; ++k) {
    if (c.col_indices[static_cast<std::size_t>(k)] == col) return buffer_at(c.values, static_cast<std::size_t>(k));
  }
  return 0.0;
}

std::vector<double> Tensor::to_doubles() const {
  const Tensor d = densify(*this);
  std::vector<double> out(d.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = buffer_at(d.buffer(), i);
  return out;
}

std::size_t Tensor::count_nonzero() const {
  const Buffer& values = is_csr() ? csr().values : buffer();
  return std::visit(
      [](const auto& v) {
        std::size_t n = 0;
        for (auto x : v) n += (x != 0) ? 1 : 0;
        return n;
      },
      values);
}

bool bitwise_equal(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape() || a.dtype() != b.dtype() || a.is_csr() != b.is_csr()) return false;
  auto same_bits = [](const Buffer& x, const Buffer& y) {
    if (x.index() != y.index()) return false;
    return std::visit(
        [&](const auto& xv) {
          const auto& yv = std::get<std::decay_t<decltype(xv)>>(y);
          if (xv.size() != yv.size()) return false;
          return xv.empty() ||
                 std::memcmp(xv.data(), yv.data(), xv.size() * sizeof(xv[0])) == 0;
        },
        x);
  };
  if (!a.is_csr()) return same_bits(a.buffer(), b.buffer());
  return a.csr().row_offsets == b.csr().row_offsets &&
         a.csr().col_indices == b.csr().col_indices && same_bits(a.csr().values, b.csr().values);
}

Tensor densify(const Tensor& t) {
  if (!t.is_csr()) return t;
  const auto& c = t.csr();
  const std::size_t n_cols = t.shape()[1];
  Buffer out = std::visit(
      [&](const auto& values) {
        using T = typename std::decay_t<decltype(values)>::value_type;
        std::vector<T> dense(t.numel(), T{0});
        for (std::size_t r = 0; r + 1 < c.row_offsets.size(); ++r) {
          for (auto k = c.row_offsets[r]; k < c.row_offsets[r + 1]; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            dense[r * n_cols + static_cast<std::size_t>(c.col_indices[ku])] = values[ku];
          }
        }
        return Buffer(std::move(dense));
      },
      c.values);
  return Tensor::dense(t.shape(), t.dtype(), std::move(out));
}

Tensor to_csr(const Tensor& t) {
  if (t.is_csr()) return t;
  if (t.rank() != 2) {
    throw Error(ErrorCode::kInvalidTensor, "CSR storage requires a 2-D tensor, got " + shape_string(t.shape()));
  }
  const std::size_t rows = t.shape()[0];
  const std::size_t cols = t.shape()[1];
  std::vector<std::int64_t> offsets(rows + 1, 0);
  std::vector<std::int32_t> col_indices;
  Buffer values = std::visit(
      [&](const auto& dense) {
        using T = typename std::decay_t<decltype(dense)>::value_type;
        std::vector<T> nz;
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t c = 0; c < cols; ++c) {
            const T v = dense[r * cols + c];
            // Negative zero is kept so densify() restores the exact bits.
            if (v != T{0} || (std::is_floating_point_v<T> && std::signbit(static_cast<double>(v)))) {
              nz.push_back(v);
              col_indices.push_back(static_cast<std::int32_t>(c));
            }
          }
          offsets[r + 1] = static_cast<std::int64_t>(nz.size());
        }
        return Buffer(std::move(nz));
      },
      t.buffer());
  return Tensor::csr(rows, cols, t.dtype(), std::move(offsets), std::move(col_indices), std::move(values));
}

}  // namespace mltc
