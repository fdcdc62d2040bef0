// SPDX-License-Identifier: Apache-2.0
#include "mltc/dtype.hpp"

#include <cmath>
#include <limits>

namespace mltc {

namespace {

// Height in the Hasse diagram. Int32 and Float16 share a level.
int level(DType d) {
  switch (d) {
    case DType::Bool:
      return 0;
    case DType::Int4:
      return 1;
    case DType::Int8:
      return 2;
    case DType::Int16:
      return 3;
    case DType::Int32:
    case DType::Float16:
      return 4;
    case DType::Float32:
      return 5;
  }
  return 5;
}

bool is_integer_value(double v) { return std::isfinite(v) && std::trunc(v) == v; }

}  // namespace

bool dtype_leq(DType a, DType b) { return a == b || level(a) < level(b); }

DType dtype_join(DType a, DType b) {
  if (dtype_leq(a, b)) return b;
  if (dtype_leq(b, a)) return a;
  return DType::Float32;
}

std::string_view dtype_name(DType d) {
  switch (d) {
    case DType::Bool:
      return "bool";
    case DType::Int4:
      return "int4";
    case DType::Int8:
      return "int8";
    case DType::Int16:
      return "int16";
    case DType::Int32:
      return "int32";
    case DType::Float16:
      return "float16";
    case DType::Float32:
      return "float32";
  }
  return "?";
}

std::optional<DType> parse_dtype(std::string_view name) {
  for (DType d : kAllDTypes) {
    if (dtype_name(d) == name) return d;
  }
  return std::nullopt;
}

std::int64_t dtype_min(DType d) {
  switch (d) {
    case DType::Bool:
      return 0;
    case DType::Int4:
      return -8;
    case DType::Int8:
      return std::numeric_limits<std::int8_t>::min();
    case DType::Int16:
      return std::numeric_limits<std::int16_t>::min();
    default:
      return std::numeric_limits<std::int32_t>::min();
  }
}

std::int64_t dtype_max(DType d) {
  switch (d) {
    case DType::Bool:
      return 1;
    case DType::Int4:
      return 7;
    case DType::Int8:
      return std::numeric_limits<std::int8_t>::max();
    case DType::Int16:
      return std::numeric_limits<std::int16_t>::max();
    default:
      return std::numeric_limits<std::int32_t>::max();
  }
}

bool representable_in_half(double v) {
  if (!std::isfinite(v)) return false;
  if (v == 0.0) return true;
  const double mag = std::fabs(v);
  if (mag > 65504.0) return false;
  if (mag < std::ldexp(1.0, -14)) {
    const double scaled = std::ldexp(v, 24);
    return std::trunc(scaled) == scaled;
  }
  int exp = 0;
  std::frexp(mag, &exp);  // mag = m * 2^exp, m in [0.5, 1)
  const double scaled = std::ldexp(v, 11 - exp);
  return std::trunc(scaled) == scaled;
}

bool representable(double v, DType d) {
  switch (d) {
    case DType::Bool:
      return v == 0.0 || v == 1.0;
    case DType::Int4:
    case DType::Int8:
    case DType::Int16:
    case DType::Int32:
      return is_integer_value(v) && v >= static_cast<double>(dtype_min(d)) &&
             v <= static_cast<double>(dtype_max(d));
    case DType::Float16:
      return representable_in_half(v);
    case DType::Float32:
      return std::isnan(v) || static_cast<double>(static_cast<float>(v)) == v;
  }
  return false;
}

}  // namespace mltc
