// SPDX-License-Identifier: Apache-2.0
#include "mltc/model.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mltc/error.hpp"

namespace mltc {

namespace {

using Json = nlohmann::json;

struct KindEntry {
  std::string_view name;
  ModelKind kind;
};

// Canonical names first; the remaining entries are aliases accepted on input.
constexpr KindEntry kKindNames[] = {
    {"decision_tree_classifier", ModelKind::kDecisionTreeClassifier},
    {"decision_tree_regressor", ModelKind::kDecisionTreeRegressor},
    {"random_forest_classifier", ModelKind::kRandomForestClassifier},
    {"random_forest_regressor", ModelKind::kRandomForestRegressor},
    {"gbdt_regressor", ModelKind::kGbdtRegressor},
    {"gbdt_binary_classifier", ModelKind::kGbdtBinaryClassifier},
    {"linear_regression", ModelKind::kLinearRegression},
    {"logistic_regression", ModelKind::kLogisticRegression},
    {"linear_svc", ModelKind::kLinearSvc},
    {"linear_svr", ModelKind::kLinearSvr},
    {"sgd_classifier", ModelKind::kSgdClassifier},
    {"ridge_classifier", ModelKind::kRidgeClassifier},
    {"perceptron", ModelKind::kPerceptron},
    {"binarizer", ModelKind::kBinarizer},
    {"normalizer", ModelKind::kNormalizer},
    {"minmax_scaler", ModelKind::kMinMaxScaler},
    {"robust_scaler", ModelKind::kRobustScaler},
    {"standard_scaler", ModelKind::kStandardScaler},
    {"maxabs_scaler", ModelKind::kMaxAbsScaler},
    {"extra_tree_classifier", ModelKind::kDecisionTreeClassifier},
    {"extra_tree_regressor", ModelKind::kDecisionTreeRegressor},
    {"extra_trees_classifier", ModelKind::kRandomForestClassifier},
    {"extra_trees_regressor", ModelKind::kRandomForestRegressor},
    {"ridge", ModelKind::kLinearRegression},
    {"sgd_regressor", ModelKind::kLinearRegression},
};

enum class Family { kTree, kForest, kLinear, kScaler };

Family family_of(ModelKind kind) {
  switch (kind) {
    case ModelKind::kDecisionTreeClassifier:
    case ModelKind::kDecisionTreeRegressor:
      return Family::kTree;
    case ModelKind::kRandomForestClassifier:
    case ModelKind::kRandomForestRegressor:
    case ModelKind::kGbdtRegressor:
    case ModelKind::kGbdtBinaryClassifier:
      return Family::kForest;
    case ModelKind::kBinarizer:
    case ModelKind::kNormalizer:
    case ModelKind::kMinMaxScaler:
    case ModelKind::kRobustScaler:
    case ModelKind::kStandardScaler:
    case ModelKind::kMaxAbsScaler:
      return Family::kScaler;
    default:
      return Family::kLinear;
  }
}

[[noreturn]] void schema_error(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::kSchemaError, path + ": " + msg);
}

[[noreturn]] void invalid(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::kValidationError, path + ": " + msg);
}

std::string child(const std::string& path, std::string_view key) { return path + "." + std::string(key); }
std::string item(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const Json& field(const Json& obj, std::string_view key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) schema_error(child(path, key), "missing required field");
  return *it;
}

const Json* optional_field(const Json& obj, std::string_view key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

std::int64_t as_int(const Json& v, const std::string& path) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && std::trunc(d) == d && std::fabs(d) < 9.0e15) return static_cast<std::int64_t>(d);
  }
  schema_error(path, "expected an integer");
}

float as_float(const Json& v, const std::string& path) {
  if (!v.is_number()) schema_error(path, "expected a number");
  const double d = v.get<double>();
  const auto f = static_cast<float>(d);
  if (!std::isfinite(f)) invalid(path, "value is not a finite 32-bit float");
  return f;
}

std::vector<float> as_floats(const Json& v, const std::string& path) {
  if (!v.is_array()) schema_error(path, "expected an array of numbers");
  std::vector<float> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_float(v[i], item(path, i)));
  return out;
}

std::string as_string(const Json& v, const std::string& path) {
  if (!v.is_string()) schema_error(path, "expected a string");
  return v.get<std::string>();
}

std::int32_t as_index(const Json& v, const std::string& path) {
  const std::int64_t i = as_int(v, path);
  if (i < 0 || i > std::numeric_limits<std::int32_t>::max()) invalid(path, "index out of range");
  return static_cast<std::int32_t>(i);
}

TreeNodes parse_nodes(const Json& v, const std::string& path) {
  if (!v.is_array()) schema_error(path, "expected an array of nodes");
  TreeNodes nodes;
  nodes.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = item(path, i);
    const Json& n = v[i];
    if (!n.is_object()) schema_error(p, "expected a node object");
    if (const Json* leaf = optional_field(n, "leaf")) {
      nodes.emplace_back(LeafNode{as_floats(*leaf, child(p, "leaf"))});
      continue;
    }
    InternalNode in;
    in.feature = as_index(field(n, "feature", p), child(p, "feature"));
    in.threshold = as_float(field(n, "threshold", p), child(p, "threshold"));
    in.left = as_index(field(n, "left", p), child(p, "left"));
    in.right = as_index(field(n, "right", p), child(p, "right"));
    nodes.emplace_back(in);
  }
  return nodes;
}

std::vector<float> parse_classes(const Json& doc, bool required, const std::string& path) {
  const Json* c = optional_field(doc, "classes");
  if (!c) {
    if (required) schema_error(child(path, "classes"), "missing required field");
    return {};
  }
  return as_floats(*c, child(path, "classes"));
}

Norm parse_norm(const Json& v, const std::string& path) {
  const std::string s = as_string(v, path);
  if (s == "l1") return Norm::kL1;
  if (s == "l2") return Norm::kL2;
  if (s == "max") return Norm::kMax;
  invalid(path, "unknown norm '" + s + "'");
}

std::string_view norm_name(Norm n) {
  switch (n) {
    case Norm::kL1:
      return "l1";
    case Norm::kL2:
      return "l2";
    case Norm::kMax:
      return "max";
  }
  return "l2";
}

std::string_view link_name(Link l) {
  switch (l) {
    case Link::kNone:
      return "none";
    case Link::kSigmoid:
      return "sigmoid";
    case Link::kSoftmax:
      return "softmax";
  }
  return "none";
}

Scaler parse_scaler(ModelKind kind, const Json& doc, const std::string& path) {
  auto vec = [&](std::string_view key) { return as_floats(field(doc, key, path), child(path, key)); };
  switch (kind) {
    case ModelKind::kBinarizer:
      return Binarizer{as_float(field(doc, "threshold", path), child(path, "threshold"))};
    case ModelKind::kNormalizer: {
      const Json* n = optional_field(doc, "norm");
      return Normalizer{n ? parse_norm(*n, child(path, "norm")) : Norm::kL2};
    }
    case ModelKind::kMinMaxScaler:
      return MinMaxScaler{vec("scale"), vec("min")};
    case ModelKind::kRobustScaler:
      return RobustScaler{vec("center"), vec("scale")};
    case ModelKind::kStandardScaler:
      return StandardScaler{vec("mean"), vec("scale")};
    default:
      return MaxAbsScaler{vec("scale")};
  }
}

// ---- validation ----------------------------------------------------------

void validate_classes(const std::vector<float>& classes, const std::string& path) {
  if (classes.empty()) invalid(path, "class list is empty");
  std::set<float> seen;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (!seen.insert(classes[i]).second) invalid(item(path, i), "duplicate class label");
  }
}

// Returns the common leaf width.
std::size_t validate_tree(const TreeNodes& nodes, std::size_t n_features, const std::string& path) {
  if (nodes.empty()) invalid(path, "tree has no nodes");
  const std::size_t n = nodes.size();
  std::vector<int> parents(n, 0);
  std::optional<std::size_t> width;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string p = item(path, i);
    if (const auto* in = std::get_if<InternalNode>(&nodes[i])) {
      if (static_cast<std::size_t>(in->feature) >= n_features) {
        invalid(child(p, "feature"), "feature " + std::to_string(in->feature) + " >= n_features " +
                                         std::to_string(n_features));
      }
      if (!std::isfinite(in->threshold)) invalid(child(p, "threshold"), "threshold is not finite");
      for (auto [key, c] : {std::pair<std::string_view, std::int32_t>{"left", in->left}, {"right", in->right}}) {
        if (c < 0 || static_cast<std::size_t>(c) >= n) invalid(child(p, key), "child index out of range");
        if (c == 0) invalid(child(p, key), "the root cannot be a child");
        if (static_cast<std::size_t>(c) == i) invalid(child(p, key), "node references itself");
        ++parents[static_cast<std::size_t>(c)];
      }
    } else {
      const auto& leaf = std::get<LeafNode>(nodes[i]);
      if (leaf.value.empty()) invalid(child(p, "leaf"), "leaf value is empty");
      for (std::size_t k = 0; k < leaf.value.size(); ++k) {
        if (!std::isfinite(leaf.value[k])) invalid(item(child(p, "leaf"), k), "leaf value is not finite");
      }
      if (!width) width = leaf.value.size();
      if (*width != leaf.value.size()) {
        invalid(child(p, "leaf"), "leaf width " + std::to_string(leaf.value.size()) +
                                      " differs from " + std::to_string(*width));
      }
    }
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (parents[i] != 1) {
      invalid(item(path, i), "node has " + std::to_string(parents[i]) + " parents, expected exactly 1");
    }
  }
  // One parent per non-root node plus full reachability from the root makes a tree.
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    if (const auto* in = std::get_if<InternalNode>(&nodes[i])) {
      for (std::int32_t c : {in->left, in->right}) {
        const auto cu = static_cast<std::size_t>(c);
        if (seen[cu]) invalid(item(path, cu), "node reached twice (cycle)");
        seen[cu] = true;
        stack.push_back(cu);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!seen[i]) invalid(item(path, i), "node is unreachable from the root");
  }
  return *width;
}

void check_len(const std::vector<float>& v, std::size_t n, const std::string& path) {
  if (v.size() != n) {
    invalid(path, "length " + std::to_string(v.size()) + " differs from n_features " + std::to_string(n));
  }
}

void check_nonzero(const std::vector<float>& v, const std::string& path) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0.0f) invalid(item(path, i), "scale must be non-zero");
  }
}

void check_finite(const std::vector<float>& v, const std::string& path) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) invalid(item(path, i), "value is not finite");
  }
}

void validate_scaler(const Scaler& s, std::size_t n, const std::string& root) {
  std::visit(
      [&](const auto& sc) {
        using S = std::decay_t<decltype(sc)>;
        if constexpr (std::is_same_v<S, Binarizer>) {
          if (!std::isfinite(sc.threshold)) invalid(child(root, "threshold"), "threshold is not finite");
        } else if constexpr (std::is_same_v<S, MinMaxScaler>) {
          check_len(sc.scale, n, child(root, "scale"));
          check_len(sc.min, n, child(root, "min"));
          check_finite(sc.scale, child(root, "scale"));
          check_finite(sc.min, child(root, "min"));
        } else if constexpr (std::is_same_v<S, RobustScaler>) {
          check_len(sc.center, n, child(root, "center"));
          check_len(sc.scale, n, child(root, "scale"));
          check_finite(sc.center, child(root, "center"));
          check_finite(sc.scale, child(root, "scale"));
          check_nonzero(sc.scale, child(root, "scale"));
        } else if constexpr (std::is_same_v<S, StandardScaler>) {
          check_len(sc.mean, n, child(root, "mean"));
          check_len(sc.scale, n, child(root, "scale"));
          check_finite(sc.mean, child(root, "mean"));
          check_finite(sc.scale, child(root, "scale"));
          check_nonzero(sc.scale, child(root, "scale"));
        } else if constexpr (std::is_same_v<S, MaxAbsScaler>) {
          check_len(sc.scale, n, child(root, "scale"));
          check_finite(sc.scale, child(root, "scale"));
          check_nonzero(sc.scale, child(root, "scale"));
        }
      },
      s);
}

Json floats_json(const std::vector<float>& v) {
  Json a = Json::array();
  for (float f : v) a.push_back(static_cast<double>(f));
  return a;
}

Json nodes_json(const TreeNodes& nodes) {
  Json a = Json::array();
  for (const TreeNode& n : nodes) {
    if (const auto* in = std::get_if<InternalNode>(&n)) {
      a.push_back(Json{{"feature", in->feature},
                       {"threshold", static_cast<double>(in->threshold)},
                       {"left", in->left},
                       {"right", in->right}});
    } else {
      a.push_back(Json{{"leaf", floats_json(std::get<LeafNode>(n).value)}});
    }
  }
  return a;
}

}  // namespace

bool is_classifier(ModelKind kind) {
  switch (kind) {
    case ModelKind::kDecisionTreeClassifier:
    case ModelKind::kRandomForestClassifier:
    case ModelKind::kGbdtBinaryClassifier:
    case ModelKind::kLogisticRegression:
    case ModelKind::kLinearSvc:
    case ModelKind::kSgdClassifier:
    case ModelKind::kRidgeClassifier:
    case ModelKind::kPerceptron:
      return true;
    default:
      return false;
  }
}

std::string_view model_kind_name(ModelKind kind) {
  for (const auto& e : kKindNames) {
    if (e.kind == kind) return e.name;
  }
  return "?";
}

std::size_t TrainedModel::n_outputs() const {
  return std::visit(
      [&](const auto& b) -> std::size_t {
        using B = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<B, DecisionTree>) {
          if (!b.classes.empty()) return 1;
          for (const TreeNode& n : b.nodes)
            if (const auto* l = std::get_if<LeafNode>(&n)) return l->value.size();
          return 0;
        } else if constexpr (std::is_same_v<B, Forest>) {
          if (!b.classes.empty()) return 1;
          for (const TreeNode& n : b.trees.front())
            if (const auto* l = std::get_if<LeafNode>(&n)) return l->value.size();
          return 0;
        } else if constexpr (std::is_same_v<B, Linear>) {
          return b.task == LinearTask::kRegressor ? b.coef.size() : 1;
        } else {
          return n_features;
        }
      },
      body);
}

void validate_model(const TrainedModel& m) {
  const std::string root = "$";
  if (m.n_features == 0) invalid(child(root, "n_features"), "must be positive");
  const bool classifier = is_classifier(m.kind);
  const Family family = family_of(m.kind);

  auto wrong_body = [&] { invalid(root, "model body does not match model_type"); };

  switch (family) {
    case Family::kTree: {
      const auto* t = std::get_if<DecisionTree>(&m.body);
      if (!t) wrong_body();
      const std::size_t width = validate_tree(t->nodes, m.n_features, child(root, "nodes"));
      if (classifier) {
        validate_classes(t->classes, child(root, "classes"));
        if (width != t->classes.size()) {
          invalid(child(root, "nodes"), "leaf width " + std::to_string(width) + " differs from class count " +
                                            std::to_string(t->classes.size()));
        }
      } else if (!t->classes.empty()) {
        invalid(child(root, "classes"), "regressors take no class list");
      }
      break;
    }
    case Family::kForest: {
      const auto* f = std::get_if<Forest>(&m.body);
      if (!f) wrong_body();
      const std::string trees_path = child(root, "trees");
      if (f->trees.empty()) invalid(trees_path, "forest has no trees");
      std::size_t width = 0;
      for (std::size_t i = 0; i < f->trees.size(); ++i) {
        const std::string p = child(item(trees_path, i), "nodes");
        const std::size_t w = validate_tree(f->trees[i], m.n_features, p);
        if (i == 0) width = w;
        if (w != width) invalid(p, "output arity " + std::to_string(w) + " differs from tree 0 (" + std::to_string(width) + ")");
      }
      if (!std::isfinite(f->learning_rate)) invalid(child(root, "learning_rate"), "not finite");
      if (!std::isfinite(f->base_score)) invalid(child(root, "base_score"), "not finite");
      const bool gbdt = m.kind == ModelKind::kGbdtRegressor || m.kind == ModelKind::kGbdtBinaryClassifier;
      if (gbdt && f->aggregation != Aggregation::kSum) invalid(child(root, "aggregation"), "gradient boosting requires 'sum'");
      if (m.kind == ModelKind::kRandomForestClassifier && f->aggregation != Aggregation::kMeanProbability) {
        invalid(child(root, "aggregation"), "random forest classifiers require 'mean_probability'");
      }
      if (classifier) {
        validate_classes(f->classes, child(root, "classes"));
        if (m.kind == ModelKind::kGbdtBinaryClassifier) {
          if (f->classes.size() != 2) invalid(child(root, "classes"), "binary classifier needs exactly 2 classes");
          if (width != 1) invalid(trees_path, "boosted trees must have scalar leaves");
        } else if (width != f->classes.size()) {
          invalid(trees_path, "leaf width " + std::to_string(width) + " differs from class count " +
                                  std::to_string(f->classes.size()));
        }
      } else if (!f->classes.empty()) {
        invalid(child(root, "classes"), "regressors take no class list");
      }
      break;
    }
    case Family::kLinear: {
      const auto* l = std::get_if<Linear>(&m.body);
      if (!l) wrong_body();
      const std::string coef_path = child(root, "coef");
      if (l->coef.empty()) invalid(coef_path, "coefficient matrix is empty");
      for (std::size_t r = 0; r < l->coef.size(); ++r) {
        check_len(l->coef[r], m.n_features, item(coef_path, r));
        check_finite(l->coef[r], item(coef_path, r));
      }
      if (l->intercept.size() != l->coef.size()) {
        invalid(child(root, "intercept"), "length " + std::to_string(l->intercept.size()) +
                                              " differs from coefficient rows " + std::to_string(l->coef.size()));
      }
      check_finite(l->intercept, child(root, "intercept"));
      if (!classifier) {
        if (l->task != LinearTask::kRegressor) invalid(root, "regression model with classifier task");
        if (!l->classes.empty()) invalid(child(root, "classes"), "regressors take no class list");
        if (l->link != Link::kNone) invalid(child(root, "link"), "regressors take no link");
        break;
      }
      validate_classes(l->classes, child(root, "classes"));
      if (l->task == LinearTask::kBinaryClassifier) {
        if (l->coef.size() != 1 || l->classes.size() != 2) {
          invalid(coef_path, "binary classifier needs one coefficient row and two classes");
        }
        if (l->link == Link::kSoftmax) invalid(child(root, "link"), "softmax needs more than one score");
      } else if (l->task == LinearTask::kMultiClassifier) {
        if (l->coef.size() != l->classes.size() || l->coef.size() < 2) {
          invalid(coef_path, "multi-class model needs one coefficient row per class");
        }
      } else {
        invalid(root, "classifier with regression task");
      }
      break;
    }
    case Family::kScaler: {
      const auto* s = std::get_if<Scaler>(&m.body);
      if (!s) wrong_body();
      validate_scaler(*s, m.n_features, root);
      break;
    }
  }
}

TrainedModel parse_model(std::string_view json_text) {
  const Json doc = Json::parse(json_text.begin(), json_text.end(), nullptr, /*allow_exceptions=*/false);
  const std::string root = "$";
  if (doc.is_discarded()) schema_error(root, "not well-formed JSON");
  if (!doc.is_object()) schema_error(root, "expected a JSON object");

  const std::int64_t version = as_int(field(doc, "format_version", root), child(root, "format_version"));
  if (version != 1) schema_error(child(root, "format_version"), "unsupported version " + std::to_string(version));

  const std::string type = as_string(field(doc, "model_type", root), child(root, "model_type"));
  std::optional<ModelKind> kind;
  for (const auto& e : kKindNames) {
    if (e.name == type) kind = e.kind;
  }
  if (!kind) schema_error(child(root, "model_type"), "unknown model_type '" + type + "'");

  TrainedModel m;
  m.kind = *kind;
  const std::int64_t nf = as_int(field(doc, "n_features", root), child(root, "n_features"));
  if (nf <= 0) invalid(child(root, "n_features"), "must be positive");
  m.n_features = static_cast<std::size_t>(nf);
  const bool classifier = is_classifier(m.kind);

  switch (family_of(m.kind)) {
    case Family::kTree: {
      DecisionTree t;
      t.nodes = parse_nodes(field(doc, "nodes", root), child(root, "nodes"));
      t.classes = parse_classes(doc, classifier, root);
      m.body = std::move(t);
      break;
    }
    case Family::kForest: {
      Forest f;
      const Json& trees = field(doc, "trees", root);
      const std::string tp = child(root, "trees");
      if (!trees.is_array()) schema_error(tp, "expected an array of trees");
      for (std::size_t i = 0; i < trees.size(); ++i) {
        const std::string p = item(tp, i);
        if (!trees[i].is_object()) schema_error(p, "expected a tree object");
        f.trees.push_back(parse_nodes(field(trees[i], "nodes", p), child(p, "nodes")));
      }
      const std::string agg = as_string(field(doc, "aggregation", root), child(root, "aggregation"));
      if (agg == "mean_probability") f.aggregation = Aggregation::kMeanProbability;
      else if (agg == "sum") f.aggregation = Aggregation::kSum;
      else invalid(child(root, "aggregation"), "unknown aggregation '" + agg + "'");
      if (const Json* lr = optional_field(doc, "learning_rate")) f.learning_rate = as_float(*lr, child(root, "learning_rate"));
      if (const Json* bs = optional_field(doc, "base_score")) f.base_score = as_float(*bs, child(root, "base_score"));
      f.classes = parse_classes(doc, classifier, root);
      m.body = std::move(f);
      break;
    }
    case Family::kLinear: {
      Linear l;
      const Json& coef = field(doc, "coef", root);
      const std::string cp = child(root, "coef");
      if (!coef.is_array()) schema_error(cp, "expected a matrix");
      for (std::size_t r = 0; r < coef.size(); ++r) l.coef.push_back(as_floats(coef[r], item(cp, r)));
      l.intercept = as_floats(field(doc, "intercept", root), child(root, "intercept"));
      l.classes = parse_classes(doc, classifier, root);
      if (!classifier) l.task = LinearTask::kRegressor;
      else l.task = l.coef.size() == 1 ? LinearTask::kBinaryClassifier : LinearTask::kMultiClassifier;
      if (const Json* link = optional_field(doc, "link")) {
        const std::string s = as_string(*link, child(root, "link"));
        if (s == "none") l.link = Link::kNone;
        else if (s == "sigmoid") l.link = Link::kSigmoid;
        else if (s == "softmax") l.link = Link::kSoftmax;
        else invalid(child(root, "link"), "unknown link '" + s + "'");
      } else if (m.kind == ModelKind::kLogisticRegression) {
        l.link = l.task == LinearTask::kBinaryClassifier ? Link::kSigmoid : Link::kSoftmax;
      }
      m.body = std::move(l);
      break;
    }
    case Family::kScaler:
      m.body = parse_scaler(m.kind, doc, root);
      break;
  }
  validate_model(m);
  return m;
}

TrainedModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open model file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

std::string serialize_model(const TrainedModel& m) {
  Json doc;
  doc["format_version"] = 1;
  doc["model_type"] = std::string(model_kind_name(m.kind));
  doc["n_features"] = m.n_features;
  std::visit(
      [&](const auto& b) {
        using B = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<B, DecisionTree>) {
          doc["nodes"] = nodes_json(b.nodes);
          if (!b.classes.empty()) doc["classes"] = floats_json(b.classes);
        } else if constexpr (std::is_same_v<B, Forest>) {
          Json trees = Json::array();
          for (const TreeNodes& t : b.trees) trees.push_back(Json{{"nodes", nodes_json(t)}});
          doc["trees"] = std::move(trees);
          doc["aggregation"] = b.aggregation == Aggregation::kSum ? "sum" : "mean_probability";
          doc["learning_rate"] = static_cast<double>(b.learning_rate);
          doc["base_score"] = static_cast<double>(b.base_score);
          if (!b.classes.empty()) doc["classes"] = floats_json(b.classes);
        } else if constexpr (std::is_same_v<B, Linear>) {
          Json coef = Json::array();
          for (const auto& row : b.coef) coef.push_back(floats_json(row));
          doc["coef"] = std::move(coef);
          doc["intercept"] = floats_json(b.intercept);
          doc["link"] = std::string(link_name(b.link));
          if (!b.classes.empty()) doc["classes"] = floats_json(b.classes);
        } else {
          std::visit(
              [&](const auto& s) {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, Binarizer>) {
                  doc["threshold"] = static_cast<double>(s.threshold);
                } else if constexpr (std::is_same_v<S, Normalizer>) {
                  doc["norm"] = std::string(norm_name(s.norm));
                } else if constexpr (std::is_same_v<S, MinMaxScaler>) {
                  doc["scale"] = floats_json(s.scale);
                  doc["min"] = floats_json(s.min);
                } else if constexpr (std::is_same_v<S, RobustScaler>) {
                  doc["center"] = floats_json(s.center);
                  doc["scale"] = floats_json(s.scale);
                } else if constexpr (std::is_same_v<S, StandardScaler>) {
                  doc["mean"] = floats_json(s.mean);
                  doc["scale"] = floats_json(s.scale);
                } else {
                  doc["scale"] = floats_json(s.scale);
                }
              },
              b);
        }
      },
      m.body);
  return doc.dump(2) + "\n";
}

}  // namespace mltc
