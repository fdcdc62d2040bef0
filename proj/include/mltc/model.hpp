// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mltc {

enum class ModelKind {
  kDecisionTreeClassifier,
  kDecisionTreeRegressor,
  kRandomForestClassifier,
  kRandomForestRegressor,
  kGbdtRegressor,
  kGbdtBinaryClassifier,
  kLinearRegression,
  kLogisticRegression,
  kLinearSvc,
  kLinearSvr,
  kSgdClassifier,
  kRidgeClassifier,
  kPerceptron,
  kBinarizer,
  kNormalizer,
  kMinMaxScaler,
  kRobustScaler,
  kStandardScaler,
  kMaxAbsScaler,
};

std::string_view model_kind_name(ModelKind kind);

/// Classifiers predict one class label per row.
bool is_classifier(ModelKind kind);

struct InternalNode {
  std::int32_t feature = 0;
  float threshold = 0.0f;
  std::int32_t left = 0;
  std::int32_t right = 0;
  bool operator==(const InternalNode&) const = default;
};

struct LeafNode {
  std::vector<float> value;
  bool operator==(const LeafNode&) const = default;
};

/// Root is node 0. A sample goes right iff feature > threshold.
using TreeNode = std::variant<InternalNode, LeafNode>;
using TreeNodes = std::vector<TreeNode>;

/// Empty `classes` means a regressor.
struct DecisionTree {
  TreeNodes nodes;
  std::vector<float> classes;
  bool operator==(const DecisionTree&) const = default;
};

enum class Aggregation { kMeanProbability, kSum };

struct Forest {
  std::vector<TreeNodes> trees;
  Aggregation aggregation = Aggregation::kMeanProbability;
  float learning_rate = 1.0f;
  float base_score = 0.0f;
  std::vector<float> classes;
  bool operator==(const Forest&) const = default;
};

enum class LinearTask { kRegressor, kBinaryClassifier, kMultiClassifier };
enum class Link { kNone, kSigmoid, kSoftmax };

struct Linear {
  std::vector<std::vector<float>> coef;  // n_outputs x n_features
  std::vector<float> intercept;
  LinearTask task = LinearTask::kRegressor;
  Link link = Link::kNone;
  std::vector<float> classes;
  bool operator==(const Linear&) const = default;
};

enum class Norm { kL1, kL2, kMax };

struct Binarizer {
  float threshold = 0.0f;
  bool operator==(const Binarizer&) const = default;
};
struct Normalizer {
  Norm norm = Norm::kL2;
  bool operator==(const Normalizer&) const = default;
};
/// x * scale + min
struct MinMaxScaler {
  std::vector<float> scale, min;
  bool operator==(const MinMaxScaler&) const = default;
};
/// (x - center) / scale
struct RobustScaler {
  std::vector<float> center, scale;
  bool operator==(const RobustScaler&) const = default;
};
/// (x - mean) / scale
struct StandardScaler {
  std::vector<float> mean, scale;
  bool operator==(const StandardScaler&) const = default;
};
/// x / scale
struct MaxAbsScaler {
  std::vector<float> scale;
  bool operator==(const MaxAbsScaler&) const = default;
};

using Scaler = std::variant<Binarizer, Normalizer, MinMaxScaler, RobustScaler, StandardScaler, MaxAbsScaler>;

struct TrainedModel {
  ModelKind kind = ModelKind::kDecisionTreeRegressor;
  std::size_t n_features = 0;
  std::variant<DecisionTree, Forest, Linear, Scaler> body;

  /// Columns of a prediction: 1 for classifiers (the class label), otherwise the leaf /
  /// coefficient / feature width.
  std::size_t n_outputs() const;
  bool operator==(const TrainedModel&) const = default;
};

/// Parses and validates a model document. Throws Error with kSchemaError for malformed or
/// ill-typed input and kValidationError for invariant violations; messages carry the JSON
/// path of the offending value.
TrainedModel parse_model(std::string_view json_text);
TrainedModel load_model_file(const std::string& path);

/// Re-checks every invariant on an in-memory model.
void validate_model(const TrainedModel& model);

/// Canonical form: sorted keys, two-space indent, floats written as the shortest decimal of
/// their exact double value.
std::string serialize_model(const TrainedModel& model);

}  // namespace mltc
