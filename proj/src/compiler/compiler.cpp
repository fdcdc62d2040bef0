// SPDX-License-Identifier: Apache-2.0
#include "mltc/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mltc/converter.hpp"
#include "mltc/error.hpp"

namespace mltc {

namespace {

void require_valid(const Ecg& g, const char* stage) {
  const std::vector<std::string> v = validate_ecg(g);
  if (v.empty()) return;
  std::string msg = std::string(stage) + " graph is invalid: " + v.front();
  if (v.size() > 1) msg += " (+" + std::to_string(v.size() - 1) + " more)";
  throw Error(ErrorCode::kValidationError, msg);
}

void collect_splits(const TreeNodes& nodes, std::vector<std::pair<std::size_t, float>>& out) {
  for (const TreeNode& n : nodes) {
    if (const auto* in = std::get_if<InternalNode>(&n)) out.emplace_back(static_cast<std::size_t>(in->feature), in->threshold);
  }
}

}  // namespace

Compiled compile_model(const TrainedModel& model, const HardwareProfile& profile, PassSet passes) {
  Compiled c;
  c.unoptimized = build_ecg(convert_model(model), InputSpec{model.n_features, DType::Float32});
  require_valid(c.unoptimized, "converted");
  PipelineResult r = run_pipeline(c.unoptimized, profile, passes);
  c.optimized = std::move(r.graph);
  c.reports = std::move(r.reports);
  require_valid(c.optimized, "optimized");
  c.plan = translate(c.optimized);
  return c;
}

double relative_divergence(double a, double b) {
  if (a == b) return 0.0;
  if (std::isnan(a) || std::isnan(b)) return std::numeric_limits<double>::infinity();
  return std::fabs(a - b) / std::max(std::fabs(a), std::fabs(b));
}

bool Divergence::passed(double tolerance) const {
  if (!shape_ok) return false;
  return classifier ? label_mismatches == 0 : max_rel <= tolerance;
}

namespace {

Divergence compare_values(const std::vector<double>& a, const std::vector<double>& b, bool classifier) {
  Divergence d;
  d.classifier = classifier;
  if (a.size() != b.size()) {
    d.shape_ok = false;
    return d;
  }
  d.compared = a.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) ++d.label_mismatches;
    d.max_abs = std::max(d.max_abs, std::fabs(a[i] - b[i]));
    d.max_rel = std::max(d.max_rel, relative_divergence(a[i], b[i]));
  }
  return d;
}

}  // namespace

Divergence compare_to_oracle(const Tensor& compiled, const OraclePrediction& oracle, bool classifier) {
  const std::vector<double> got = compiled.to_doubles();
  const std::vector<double> want(oracle.values.begin(), oracle.values.end());
  Divergence d = compare_values(got, want, classifier);
  const std::size_t cols = compiled.rank() == 2 ? compiled.cols() : 1;
  if (compiled.rank() == 0 || compiled.shape()[0] != oracle.rows || cols != oracle.cols) d.shape_ok = false;
  return d;
}

Divergence compare_tensors(const Tensor& a, const Tensor& b, bool classifier) {
  Divergence d = compare_values(a.to_doubles(), b.to_doubles(), classifier);
  if (a.shape() != b.shape()) d.shape_ok = false;
  return d;
}

Tensor random_inputs(std::mt19937_64& rng, std::size_t rows, std::size_t cols, float lo, float hi) {
  std::uniform_real_distribution<float> u(lo, hi);
  std::vector<float> v(rows * cols);
  for (float& x : v) x = u(rng);
  return Tensor::from_floats({rows, cols}, std::move(v));
}

Tensor boundary_inputs(const TrainedModel& model, std::mt19937_64& rng, std::size_t max_rows) {
  std::vector<std::pair<std::size_t, float>> splits;
  if (const auto* t = std::get_if<DecisionTree>(&model.body)) collect_splits(t->nodes, splits);
  if (const auto* f = std::get_if<Forest>(&model.body))
    for (const TreeNodes& nodes : f->trees) collect_splits(nodes, splits);
  if (const auto* s = std::get_if<Scaler>(&model.body)) {
    if (const auto* b = std::get_if<Binarizer>(s))
      for (std::size_t i = 0; i < model.n_features; ++i) splits.emplace_back(i, b->threshold);
  }
  const std::size_t cols = model.n_features;
  std::uniform_real_distribution<float> u(-10.0f, 10.0f);
  std::vector<float> v;
  std::size_t rows = 0;
  for (const auto& [feature, threshold] : splits) {
    for (float value : {threshold, std::nextafter(threshold, -INFINITY), std::nextafter(threshold, INFINITY)}) {
      if (rows == max_rows) break;
      for (std::size_t c = 0; c < cols; ++c) v.push_back(c == feature ? value : u(rng));
      ++rows;
    }
  }
  return Tensor::from_floats({rows, cols}, std::move(v));
}

}  // namespace mltc
