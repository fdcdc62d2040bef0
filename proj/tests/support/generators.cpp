// SPDX-License-Identifier: Apache-2.0
#include "generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mltc::testsupport {

float uniform(Rng& rng, float lo, float hi) { return std::uniform_real_distribution<float>(lo, hi)(rng); }

namespace {

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Shapes as nested index lists: each shape is a pre-order list of "is internal" flags.
void shapes_of(std::size_t n, std::vector<std::vector<bool>>& out) {
  if (n == 0) {
    out.push_back({false});
    return;
  }
  for (std::size_t left = 0; left < n; ++left) {
    std::vector<std::vector<bool>> ls, rs;
    shapes_of(left, ls);
    shapes_of(n - 1 - left, rs);
    for (const auto& l : ls) {
      for (const auto& r : rs) {
        std::vector<bool> s{true};
        s.insert(s.end(), l.begin(), l.end());
        s.insert(s.end(), r.begin(), r.end());
        out.push_back(std::move(s));
      }
    }
  }
}

// Rebuilds nodes from a pre-order flag list; returns the index of the subtree root.
std::int32_t build_shape(const std::vector<bool>& flags, std::size_t& pos, TreeNodes& nodes, float& next_leaf) {
  const auto id = static_cast<std::int32_t>(nodes.size());
  if (!flags[pos++]) {
    nodes.emplace_back(LeafNode{{next_leaf}});
    next_leaf += 1.0f;
    return id;
  }
  nodes.emplace_back(InternalNode{});
  const std::int32_t l = build_shape(flags, pos, nodes, next_leaf);
  const std::int32_t r = build_shape(flags, pos, nodes, next_leaf);
  auto& in = std::get<InternalNode>(nodes[static_cast<std::size_t>(id)]);
  in.left = l;
  in.right = r;
  return id;
}

std::int32_t grow(Rng& rng, const TreeOptions& opts, std::size_t depth, std::size_t& internal_left, TreeNodes& nodes,
                  const std::function<std::vector<float>(Rng&)>& leaf) {
  const auto id = static_cast<std::int32_t>(nodes.size());
  const bool split = internal_left > 0 && depth < opts.max_depth &&
                     std::bernoulli_distribution(depth == 0 ? 0.95 : opts.split_probability)(rng);
  if (!split) {
    nodes.emplace_back(LeafNode{leaf(rng)});
    return id;
  }
  --internal_left;
  InternalNode in;
  in.feature = static_cast<std::int32_t>(pick(rng, 0, opts.n_features - 1));
  // Coarse thresholds make exact ties with boundary inputs likely.
  in.threshold = std::bernoulli_distribution(0.5)(rng) ? std::round(uniform(rng, -8.0f, 8.0f) * 4.0f) / 4.0f
                                                        : uniform(rng, -8.0f, 8.0f);
  nodes.emplace_back(in);
  const std::int32_t l = grow(rng, opts, depth + 1, internal_left, nodes, leaf);
  const std::int32_t r = grow(rng, opts, depth + 1, internal_left, nodes, leaf);
  auto& node = std::get<InternalNode>(nodes[static_cast<std::size_t>(id)]);
  node.left = l;
  node.right = r;
  return id;
}

std::vector<float> distinct_labels(Rng& rng, std::size_t k) {
  std::vector<float> labels(k);
  const float offset = std::bernoulli_distribution(0.5)(rng) ? 0.0f : static_cast<float>(pick(rng, 1, 50));
  std::iota(labels.begin(), labels.end(), offset);
  std::shuffle(labels.begin(), labels.end(), rng);
  return labels;
}

std::vector<float> probabilities(Rng& rng, std::size_t k) {
  // Normalised integer counts, as a fitted tree would store them.
  std::vector<float> p(k);
  float total = 0.0f;
  for (auto& v : p) {
    v = static_cast<float>(pick(rng, 0, 9));
    total += v;
  }
  if (total == 0.0f) {
    p[pick(rng, 0, k - 1)] = 1.0f;
    total = 1.0f;
  }
  for (auto& v : p) v /= total;
  return p;
}

std::vector<float> vec(Rng& rng, std::size_t n, float lo, float hi) {
  std::vector<float> v(n);
  for (auto& x : v) x = uniform(rng, lo, hi);
  return v;
}

std::vector<float> nonzero_vec(Rng& rng, std::size_t n, float lo, float hi) {
  std::vector<float> v(n);
  for (auto& x : v) {
    do {
      x = uniform(rng, lo, hi);
    } while (x == 0.0f);
  }
  return v;
}

}  // namespace

std::vector<TreeNodes> all_tree_shapes(std::size_t n_internal) {
  std::vector<std::vector<bool>> flags;
  shapes_of(n_internal, flags);
  std::vector<TreeNodes> out;
  out.reserve(flags.size());
  for (const auto& f : flags) {
    TreeNodes nodes;
    std::size_t pos = 0;
    float next_leaf = 0.0f;
    build_shape(f, pos, nodes, next_leaf);
    out.push_back(std::move(nodes));
  }
  return out;
}

TreeNodes random_tree(Rng& rng, const TreeOptions& opts, const std::function<std::vector<float>(Rng&)>& leaf) {
  TreeNodes nodes;
  std::size_t budget = opts.max_internal;
  grow(rng, opts, 0, budget, nodes, leaf);
  return nodes;
}

TrainedModel random_model(Rng& rng, ModelKind kind, const ModelOptions& opts) {
  TrainedModel m;
  m.kind = kind;
  m.n_features = pick(rng, opts.min_features, opts.max_features);
  const std::size_t nf = m.n_features;
  TreeOptions topts{nf, pick(rng, 1, opts.max_depth), opts.max_internal, 0.8};
  const std::size_t n_classes = pick(rng, 2, std::max<std::size_t>(2, opts.max_classes));

  switch (kind) {
    case ModelKind::kDecisionTreeClassifier: {
      DecisionTree t;
      t.classes = distinct_labels(rng, n_classes);
      t.nodes = random_tree(rng, topts, [&](Rng& r) { return probabilities(r, n_classes); });
      m.body = std::move(t);
      break;
    }
    case ModelKind::kDecisionTreeRegressor: {
      DecisionTree t;
      const std::size_t width = pick(rng, 1, 3);
      t.nodes = random_tree(rng, topts, [&](Rng& r) { return vec(r, width, -100.0f, 100.0f); });
      m.body = std::move(t);
      break;
    }
    case ModelKind::kRandomForestClassifier:
    case ModelKind::kRandomForestRegressor:
    case ModelKind::kGbdtRegressor:
    case ModelKind::kGbdtBinaryClassifier: {
      Forest f;
      const std::size_t n_trees = pick(rng, 1, opts.max_trees);
      const bool rf = kind == ModelKind::kRandomForestClassifier || kind == ModelKind::kRandomForestRegressor;
      f.aggregation = rf ? Aggregation::kMeanProbability : Aggregation::kSum;
      std::size_t width = 1;
      if (kind == ModelKind::kRandomForestClassifier) {
        f.classes = distinct_labels(rng, n_classes);
        width = n_classes;
      } else if (kind == ModelKind::kGbdtBinaryClassifier) {
        f.classes = distinct_labels(rng, 2);
      } else if (kind == ModelKind::kRandomForestRegressor) {
        width = pick(rng, 1, 2);
      }
      if (!rf) {
        f.learning_rate = uniform(rng, 0.01f, 1.0f);
        f.base_score = uniform(rng, -2.0f, 2.0f);
      }
      for (std::size_t i = 0; i < n_trees; ++i) {
        TreeOptions o = topts;
        o.max_depth = pick(rng, 1, opts.max_depth);
        f.trees.push_back(random_tree(rng, o, [&](Rng& r) {
          return kind == ModelKind::kRandomForestClassifier ? probabilities(r, width) : vec(r, width, -3.0f, 3.0f);
        }));
      }
      m.body = std::move(f);
      break;
    }
    case ModelKind::kLinearRegression:
    case ModelKind::kLinearSvr: {
      Linear l;
      const std::size_t outs = pick(rng, 1, 3);
      for (std::size_t i = 0; i < outs; ++i) l.coef.push_back(vec(rng, nf, -5.0f, 5.0f));
      l.intercept = vec(rng, outs, -5.0f, 5.0f);
      m.body = std::move(l);
      break;
    }
    case ModelKind::kLogisticRegression:
    case ModelKind::kLinearSvc:
    case ModelKind::kSgdClassifier:
    case ModelKind::kRidgeClassifier:
    case ModelKind::kPerceptron: {
      Linear l;
      l.classes = distinct_labels(rng, n_classes);
      const bool binary = n_classes == 2;
      l.task = binary ? LinearTask::kBinaryClassifier : LinearTask::kMultiClassifier;
      const std::size_t rows = binary ? 1 : n_classes;
      for (std::size_t i = 0; i < rows; ++i) l.coef.push_back(vec(rng, nf, -2.0f, 2.0f));
      l.intercept = vec(rng, rows, -2.0f, 2.0f);
      if (kind == ModelKind::kLogisticRegression) l.link = binary ? Link::kSigmoid : Link::kSoftmax;
      m.body = std::move(l);
      break;
    }
    case ModelKind::kBinarizer:
      m.body = Scaler{Binarizer{uniform(rng, -2.0f, 2.0f)}};
      break;
    case ModelKind::kNormalizer: {
      constexpr Norm norms[] = {Norm::kL1, Norm::kL2, Norm::kMax};
      m.body = Scaler{Normalizer{norms[pick(rng, 0, 2)]}};
      break;
    }
    case ModelKind::kMinMaxScaler:
      m.body = Scaler{MinMaxScaler{vec(rng, nf, 0.01f, 2.0f), vec(rng, nf, -1.0f, 1.0f)}};
      break;
    case ModelKind::kRobustScaler:
      m.body = Scaler{RobustScaler{vec(rng, nf, -3.0f, 3.0f), nonzero_vec(rng, nf, 0.1f, 5.0f)}};
      break;
    case ModelKind::kStandardScaler:
      m.body = Scaler{StandardScaler{vec(rng, nf, -3.0f, 3.0f), nonzero_vec(rng, nf, 0.1f, 5.0f)}};
      break;
    case ModelKind::kMaxAbsScaler:
      m.body = Scaler{MaxAbsScaler{nonzero_vec(rng, nf, 0.1f, 10.0f)}};
      break;
  }
  return m;
}

}  // namespace mltc::testsupport
