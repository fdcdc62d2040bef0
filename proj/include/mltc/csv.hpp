// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>

#include "mltc/tensor.hpp"

namespace mltc {

/// Reads a headerless comma-separated matrix into a 2-D Float32 tensor. Blank lines are
/// skipped; an empty document yields a (0, expected_cols) tensor.
Tensor read_csv(std::istream& in, std::size_t expected_cols);
Tensor read_csv_file(const std::string& path, std::size_t expected_cols);

/// Writes a 2-D tensor, one row per line, using the shortest round-trip decimal form.
void write_csv(std::ostream& out, const Tensor& t);

/// Shortest decimal that parses back to exactly `v`.
std::string format_float(float v);

}  // namespace mltc
