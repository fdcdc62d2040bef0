// SPDX-License-Identifier: Apache-2.0
#include "mltc/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "mltc/error.hpp"

// Float arithmetic here follows the same evaluation order as the compiled graph so that
// agreement can be demanded bit-for-bit on class labels.

namespace mltc {

namespace {

using Row = std::span<const float>;

const std::vector<float>& reach_leaf(const TreeNodes& nodes, Row x) {
  std::size_t i = 0;
  while (const auto* in = std::get_if<InternalNode>(&nodes[i])) {
    // Ties go left.
    const bool right = x[static_cast<std::size_t>(in->feature)] > in->threshold;
    i = static_cast<std::size_t>(right ? in->right : in->left);
  }
  return std::get<LeafNode>(nodes[i]).value;
}

std::size_t first_max(const std::vector<float>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

float sigmoid(float z) { return 1.0f / (1.0f + std::exp(-z)); }

void tree_row(const DecisionTree& t, Row x, std::vector<float>& out) {
  const auto& leaf = reach_leaf(t.nodes, x);
  if (t.classes.empty()) out.insert(out.end(), leaf.begin(), leaf.end());
  else out.push_back(t.classes[first_max(leaf)]);
}

void forest_row(const Forest& f, Row x, std::vector<float>& out) {
  const std::size_t width = reach_leaf(f.trees.front(), x).size();
  std::vector<float> acc(width, 0.0f);
  for (const TreeNodes& t : f.trees) {
    const auto& leaf = reach_leaf(t, x);
    for (std::size_t k = 0; k < width; ++k) acc[k] = acc[k] + leaf[k];
  }
  if (f.aggregation == Aggregation::kMeanProbability) {
    const auto n = static_cast<float>(f.trees.size());
    for (float& a : acc) a = a / n;
    if (f.classes.empty()) out.insert(out.end(), acc.begin(), acc.end());
    else out.push_back(f.classes[first_max(acc)]);
    return;
  }
  const float raw = acc[0] * f.learning_rate + f.base_score;
  if (f.classes.empty()) out.push_back(raw);
  else out.push_back(f.classes[sigmoid(raw) > 0.5f ? 1 : 0]);
}

void linear_row(const Linear& m, Row x, std::vector<float>& out) {
  std::vector<float> z(m.coef.size());
  for (std::size_t j = 0; j < m.coef.size(); ++j) {
    float acc = 0.0f;
    for (std::size_t f = 0; f < x.size(); ++f) acc = acc + x[f] * m.coef[j][f];
    z[j] = acc + m.intercept[j];
  }
  switch (m.task) {
    case LinearTask::kRegressor:
      out.insert(out.end(), z.begin(), z.end());
      return;
    case LinearTask::kMultiClassifier:
      // Every link is increasing, so the decision is the raw arg-max.
      out.push_back(m.classes[first_max(z)]);
      return;
    case LinearTask::kBinaryClassifier: {
      const bool positive = m.link == Link::kSigmoid ? sigmoid(z[0]) > 0.5f : z[0] > 0.0f;
      out.push_back(m.classes[positive ? 1 : 0]);
      return;
    }
  }
}

void scaler_row(const Scaler& s, Row x, std::vector<float>& out) {
  std::visit(
      [&](const auto& sc) {
        using S = std::decay_t<decltype(sc)>;
        for (std::size_t f = 0; f < x.size(); ++f) {
          if constexpr (std::is_same_v<S, Binarizer>) {
            out.push_back(x[f] > sc.threshold ? 1.0f : 0.0f);
          } else if constexpr (std::is_same_v<S, Normalizer>) {
            if (f > 0) break;
            float norm = 0.0f;
            for (float v : x) {
              if (sc.norm == Norm::kL1) norm = norm + std::fabs(v);
              else if (sc.norm == Norm::kL2) norm = norm + v * v;
              else norm = std::max(norm, std::fabs(v));
            }
            if (sc.norm == Norm::kL2) norm = std::sqrt(norm);
            if (norm == 0.0f) norm = 1.0f;
            for (float v : x) out.push_back(v / norm);
          } else if constexpr (std::is_same_v<S, MinMaxScaler>) {
            out.push_back(x[f] * sc.scale[f] + sc.min[f]);
          } else if constexpr (std::is_same_v<S, RobustScaler>) {
            out.push_back((x[f] - sc.center[f]) / sc.scale[f]);
          } else if constexpr (std::is_same_v<S, StandardScaler>) {
            out.push_back((x[f] - sc.mean[f]) / sc.scale[f]);
          } else {
            out.push_back(x[f] / sc.scale[f]);
          }
        }
      },
      s);
}

}  // namespace

OraclePrediction oracle_predict(const TrainedModel& model, const Tensor& x) {
  if (x.rank() != 2 || x.cols() != model.n_features || x.dtype() != DType::Float32 || x.is_csr()) {
    throw Error(ErrorCode::kFeatureMismatch, "oracle expects a dense float32 [batch," +
                                                 std::to_string(model.n_features) + "] input, got " +
                                                 shape_string(x.shape()));
  }
  OraclePrediction p;
  p.rows = x.rows();
  p.cols = model.n_outputs();
  p.values.reserve(p.rows * p.cols);
  const auto data = x.data<float>();
  for (std::size_t r = 0; r < p.rows; ++r) {
    const Row row = data.subspan(r * model.n_features, model.n_features);
    std::visit(
        [&](const auto& body) {
          using B = std::decay_t<decltype(body)>;
          if constexpr (std::is_same_v<B, DecisionTree>) tree_row(body, row, p.values);
          else if constexpr (std::is_same_v<B, Forest>) forest_row(body, row, p.values);
          else if constexpr (std::is_same_v<B, Linear>) linear_row(body, row, p.values);
          else scaler_row(body, row, p.values);
        },
        model.body);
  }
  return p;
}

}  // namespace mltc
