// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace mltc {

/// Element types, ordered by the lossless-widening partial order
///
///   Bool < Int4 < Int8 < Int16 < {Int32, Float16} < Float32
///
/// Int32 and Float16 are incomparable; their join is Float32.
enum class DType : std::uint8_t { Bool, Int4, Int8, Int16, Int32, Float16, Float32 };

inline constexpr std::array<DType, 7> kAllDTypes = {
    DType::Bool,  DType::Int4,    DType::Int8,   DType::Int16,
    DType::Int32, DType::Float16, DType::Float32};

/// a <= b in the lattice.
bool dtype_leq(DType a, DType b);
inline bool dtype_lt(DType a, DType b) { return a != b && dtype_leq(a, b); }

/// Least upper bound.
DType dtype_join(DType a, DType b);

inline constexpr bool is_float(DType d) {
  return d == DType::Float16 || d == DType::Float32;
}
inline constexpr bool is_integral(DType d) { return !is_float(d); }

/// Int4 and Float16 have no native kernels; they run as Int8 and Float32.
inline constexpr DType promote_for_kernel(DType d) {
  switch (d) {
    case DType::Int4:
      return DType::Int8;
    case DType::Float16:
      return DType::Float32;
    default:
      return d;
  }
}

std::string_view dtype_name(DType d);
std::optional<DType> parse_dtype(std::string_view name);

/// Inclusive value range of an integral dtype.
std::int64_t dtype_min(DType d);
std::int64_t dtype_max(DType d);

/// True when `v` survives a round trip through `d` unchanged.
bool representable(double v, DType d);

/// True when `v` is exactly representable as an IEEE binary16 value.
bool representable_in_half(double v);

}  // namespace mltc
