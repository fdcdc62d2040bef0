// SPDX-License-Identifier: Apache-2.0
#include "mltc/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace mltc {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

float parse_cell(std::string_view cell, std::size_t line_no) {
  cell = trim(cell);
  float v = 0.0f;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw Error(ErrorCode::kIo, "csv line " + std::to_string(line_no) + ": cannot parse '" +
                                    std::string(cell) + "' as a number");
  }
  return v;
}

}  // namespace

Tensor read_csv(std::istream& in, std::size_t expected_cols) {
  std::vector<float> values;
  std::size_t rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view rest = trim(line);
    if (rest.empty()) continue;
    std::size_t cols = 0;
    while (true) {
      const auto comma = rest.find(',');
      values.push_back(parse_cell(rest.substr(0, comma), line_no));
      ++cols;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cols != expected_cols) {
      throw Error(ErrorCode::kFeatureMismatch, "csv line " + std::to_string(line_no) + ": " +
                                                   std::to_string(cols) + " columns, expected " +
                                                   std::to_string(expected_cols));
    }
    ++rows;
  }
  return Tensor::from_floats({rows, expected_cols}, std::move(values));
}

Tensor read_csv_file(const std::string& path, std::size_t expected_cols) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  return read_csv(in, expected_cols);
}

std::string format_float(float v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const Tensor& t) {
  if (t.rank() != 2) throw Error(ErrorCode::kShapeMismatch, "csv output requires a 2-D tensor");
  const auto values = t.to_doubles();
  const std::size_t cols = t.cols();
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (c) out << ',';
      out << format_float(static_cast<float>(values[r * cols + c]));
    }
    out << '\n';
  }
}

}  // namespace mltc
