// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "mltc/dtype.hpp"
#include "mltc/error.hpp"

namespace mltc {

using Shape = std::vector<std::size_t>;

/// Typed element storage. Int4 shares int8 storage, Float16 shares float storage.
using Buffer = std::variant<std::vector<std::uint8_t>, std::vector<std::int8_t>,
                            std::vector<std::int16_t>, std::vector<std::int32_t>,
                            std::vector<float>>;

template <DType D>
struct StorageOf;
template <> struct StorageOf<DType::Bool> { using type = std::uint8_t; };
template <> struct StorageOf<DType::Int4> { using type = std::int8_t; };
template <> struct StorageOf<DType::Int8> { using type = std::int8_t; };
template <> struct StorageOf<DType::Int16> { using type = std::int16_t; };
template <> struct StorageOf<DType::Int32> { using type = std::int32_t; };
template <> struct StorageOf<DType::Float16> { using type = float; };
template <> struct StorageOf<DType::Float32> { using type = float; };

/// Calls `f(std::type_identity<T>{})` with T the storage element type of `d`.
template <class F>
decltype(auto) dispatch_storage(DType d, F&& f) {
  switch (d) {
    case DType::Bool:
      return f(std::type_identity<std::uint8_t>{});
    case DType::Int4:
    case DType::Int8:
      return f(std::type_identity<std::int8_t>{});
    case DType::Int16:
      return f(std::type_identity<std::int16_t>{});
    case DType::Int32:
      return f(std::type_identity<std::int32_t>{});
    case DType::Float16:
    case DType::Float32:
      break;
  }
  return f(std::type_identity<float>{});
}

struct CsrData {
  std::vector<std::int64_t> row_offsets;
  std::vector<std::int32_t> col_indices;
  Buffer values;
};

/// Immutable n-dimensional value. Copies share storage.
class Tensor {
 public:
  Tensor();

  static Tensor dense(Shape shape, DType dtype, Buffer buffer);
  /// Builds a tensor from real values; every value must be exactly representable in `dtype`.
  static Tensor from_values(Shape shape, DType dtype, std::span<const double> values);
  static Tensor from_floats(Shape shape, std::vector<float> values);
  static Tensor zeros(Shape shape, DType dtype);
  static Tensor csr(std::size_t rows, std::size_t cols, DType dtype,
                    std::vector<std::int64_t> row_offsets,
                    std::vector<std::int32_t> col_indices, Buffer values);

  const Shape& shape() const { return rep_->shape; }
  std::size_t rank() const { return rep_->shape.size(); }
  std::size_t numel() const;
  std::size_t rows() const;
  std::size_t cols() const;
  DType dtype() const { return rep_->dtype; }
  bool is_csr() const { return std::holds_alternative<CsrData>(rep_->storage); }

  /// Dense element buffer; throws kInvalidTensor for CSR tensors.
  const Buffer& buffer() const;
  const CsrData& csr() const;

  template <class T>
  std::span<const T> data() const {
    return std::get<std::vector<T>>(buffer());
  }

  /// Element at a row-major flat index, for either storage kind.
  double at(std::size_t flat) const;
  std::vector<double> to_doubles() const;
  std::size_t count_nonzero() const;

 private:
  struct Rep {
    Shape shape;
    DType dtype = DType::Float32;
    std::variant<Buffer, CsrData> storage;
  };
  explicit Tensor(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}

  std::shared_ptr<const Rep> rep_;
};

std::size_t shape_numel(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Same shape, dtype, storage kind and element bits.
bool bitwise_equal(const Tensor& a, const Tensor& b);

Tensor densify(const Tensor& t);
/// CSR copy of a dense 2-D tensor holding only its non-zero elements.
Tensor to_csr(const Tensor& t);

}  // namespace mltc
