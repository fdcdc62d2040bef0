// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mltc/ecg.hpp"

namespace mltc {

/// After a pass: node count = before + casts_inserted - nodes_eliminated.
struct PassReport {
  std::string pass;
  int nodes_rewritten = 0;
  int casts_inserted = 0;
  int nodes_eliminated = 0;
  int weights_changed = 0;  // re-typed or re-formatted
};

std::string format_report(const PassReport& r);

struct PassResult {
  Ecg graph;
  PassReport report;
};

PassResult dtype_rewriting(const Ecg& g, const HardwareProfile& h);
PassResult sparse_operator_replacing(const Ecg& g, const HardwareProfile& h);
PassResult redundant_elimination(const Ecg& g);

struct PassSet {
  bool re = false;
  bool dr = false;
  bool sor = false;

  static PassSet all() { return {true, true, true}; }
  static PassSet none() { return {}; }
  /// Comma-separated subset of re, dr, sor; "none" or "" selects nothing. Order is ignored.
  static PassSet parse(std::string_view text);
  std::string to_string() const;
  bool operator==(const PassSet&) const = default;
};

struct PipelineResult {
  Ecg graph;
  std::vector<PassReport> reports;
};

/// Runs the enabled passes in the fixed order RE, DR, SOR.
PipelineResult run_pipeline(const Ecg& g, const HardwareProfile& h, PassSet passes);

/// Largest absolute value an intermediate can hold, as used by the accumulator bound.
std::int64_t value_bound(const Ecg& g, const EcgNode& consumer, const Operand& operand);

}  // namespace mltc
