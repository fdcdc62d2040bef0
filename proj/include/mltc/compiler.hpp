// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "mltc/ecg.hpp"
#include "mltc/model.hpp"
#include "mltc/optimizer.hpp"
#include "mltc/oracle.hpp"
#include "mltc/runtime.hpp"

namespace mltc {

struct Compiled {
  Ecg unoptimized;
  Ecg optimized;
  std::vector<PassReport> reports;
  KernelPlan plan;
};

/// Converts, builds the graph, optimises and translates. Graph invariant violations surface
/// as kValidationError naming the node.
Compiled compile_model(const TrainedModel& model, const HardwareProfile& profile, PassSet passes);

inline Tensor predict(const Compiled& c, const Tensor& x) { return execute(c.plan, x); }

/// |a - b| / max(|a|, |b|), zero when both are zero.
double relative_divergence(double a, double b);

struct Divergence {
  std::size_t compared = 0;
  std::size_t label_mismatches = 0;
  double max_abs = 0.0;
  double max_rel = 0.0;
  bool classifier = false;
  bool shape_ok = true;

  /// Labels must match exactly; regression outputs within `tolerance` relative.
  bool passed(double tolerance = 1e-5) const;
};

Divergence compare_to_oracle(const Tensor& compiled, const OraclePrediction& oracle, bool classifier);
/// Same tolerance rules between two tensors.
Divergence compare_tensors(const Tensor& a, const Tensor& b, bool classifier);

/// Uniform Float32 rows in [lo, hi].
Tensor random_inputs(std::mt19937_64& rng, std::size_t rows, std::size_t cols, float lo = -10.0f, float hi = 10.0f);

/// Rows that put each split threshold of the model (or the binarizer threshold) exactly on a
/// feature, plus the neighbouring floats on either side.
Tensor boundary_inputs(const TrainedModel& model, std::mt19937_64& rng, std::size_t max_rows = 3000);

}  // namespace mltc
