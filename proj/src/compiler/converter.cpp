// SPDX-License-Identifier: Apache-2.0
#include "mltc/converter.hpp"

#include <deque>

namespace mltc {

namespace {

class Builder {
 public:
  int add(DlOperator op, std::vector<Operand> inputs, std::vector<Weight> weights = {}) {
    reps_.push_back(OperatorRep{std::move(op), std::move(weights), std::move(inputs)});
    return static_cast<int>(reps_.size()) - 1;
  }
  std::vector<OperatorRep> take() { return std::move(reps_); }

 private:
  std::vector<OperatorRep> reps_;
};

Tensor row_tensor(std::vector<float> v) {
  const std::size_t n = v.size();
  return Tensor::from_floats({n}, std::move(v));
}

Tensor column_tensor(std::vector<float> v) {
  const std::size_t n = v.size();
  return Tensor::from_floats({n, 1}, std::move(v));
}

std::size_t first_max(const std::vector<float>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

// Appends the operators for one tree reading `x`; returns the id of its last operator.
int append_tree(Builder& b, const TreeNodes& nodes, std::size_t n_features, const std::vector<float>& classes,
                Operand x) {
  const TreeTensors t = tree_tensors(nodes, n_features, classes);
  if (t.internal.empty()) {
    const std::size_t width = t.leaf_table.cols();
    std::vector<float> row(t.leaf_table.data<float>().begin(), t.leaf_table.data<float>().end());
    return b.add(DlOperator::broadcast_rows(), {x, Operand::weight(0)},
                 {make_weight("leaf", Tensor::from_floats({1, width}, std::move(row)))});
  }
  const int m1 = b.add(DlOperator::matmul(), {x, Operand::weight(0)}, {make_weight("W1", t.w1)});
  const int cmp = b.add(DlOperator::binary_op(BinaryOp::kGreater), {Operand::node(m1), Operand::weight(0)},
                        {make_weight("W2", t.w2)});
  const int m3 = b.add(DlOperator::matmul(), {Operand::node(cmp), Operand::weight(0)}, {make_weight("W3", t.w3)});
  const int leaf = b.add(DlOperator::argmax(1), {Operand::node(m3)});
  return b.add(DlOperator::gather_rows(), {Operand::weight(0), Operand::node(leaf)},
               {make_weight("leaf_table", t.leaf_table)});
}

}  // namespace

TreeTensors tree_tensors(const TreeNodes& nodes, std::size_t n_features, const std::vector<float>& classes) {
  TreeTensors t;
  // Level order over internal nodes.
  std::deque<int> queue{0};
  while (!queue.empty()) {
    const int i = queue.front();
    queue.pop_front();
    if (const auto* in = std::get_if<InternalNode>(&nodes[static_cast<std::size_t>(i)])) {
      t.internal.push_back(i);
      queue.push_back(in->left);
      queue.push_back(in->right);
    }
  }
  // In-order over leaves, recording each leaf's ancestors and the side it hangs from.
  std::vector<int> level_of(nodes.size(), -1);
  for (std::size_t j = 0; j < t.internal.size(); ++j) level_of[static_cast<std::size_t>(t.internal[j])] = static_cast<int>(j);
  std::vector<std::vector<std::pair<int, bool>>> paths;  // (internal number, went right)
  std::vector<std::pair<int, bool>> path;
  auto visit = [&](auto&& self, int i) -> void {
    const auto* in = std::get_if<InternalNode>(&nodes[static_cast<std::size_t>(i)]);
    if (!in) {
      t.leaves.push_back(i);
      paths.push_back(path);
      return;
    }
    path.emplace_back(level_of[static_cast<std::size_t>(i)], false);
    self(self, in->left);
    path.back().second = true;
    self(self, in->right);
    path.pop_back();
  };
  visit(visit, 0);

  const std::size_t n_i = t.internal.size(), n_l = t.leaves.size();
  std::vector<float> w1(n_features * n_i, 0.0f), w2(n_i), w3(n_i * n_l, 1.0f);
  for (std::size_t j = 0; j < n_i; ++j) {
    const auto& in = std::get<InternalNode>(nodes[static_cast<std::size_t>(t.internal[j])]);
    w1[static_cast<std::size_t>(in.feature) * n_i + j] = 1.0f;
    w2[j] = in.threshold;
  }
  for (std::size_t l = 0; l < n_l; ++l) {
    for (const auto& [j, right] : paths[l]) {
      if (!right) w3[static_cast<std::size_t>(j) * n_l + l] = 0.0f;
    }
  }
  std::vector<float> table;
  std::size_t width = 0;
  for (int leaf : t.leaves) {
    const auto& value = std::get<LeafNode>(nodes[static_cast<std::size_t>(leaf)]).value;
    if (classes.empty()) {
      table.insert(table.end(), value.begin(), value.end());
      width = value.size();
    } else {
      table.push_back(classes[first_max(value)]);
      width = 1;
    }
  }
  t.w1 = Tensor::from_floats({n_features, n_i}, std::move(w1));
  t.w2 = row_tensor(std::move(w2));
  t.w3 = Tensor::from_floats({n_i, n_l}, std::move(w3));
  t.leaf_table = Tensor::from_floats({n_l, width}, std::move(table));
  return t;
}

std::vector<OperatorRep> convert_tree(const DecisionTree& tree, std::size_t n_features) {
  Builder b;
  append_tree(b, tree.nodes, n_features, tree.classes, Operand::graph_input());
  return b.take();
}

std::vector<OperatorRep> convert_ensemble(const Forest& forest, std::size_t n_features) {
  Builder b;
  std::vector<Operand> parts;
  for (const TreeNodes& nodes : forest.trees) {
    parts.push_back(Operand::node(append_tree(b, nodes, n_features, {}, Operand::graph_input())));
  }
  const int stacked = b.add(DlOperator::stack(), parts);
  if (forest.aggregation == Aggregation::kMeanProbability) {
    const int mean = b.add(DlOperator::reduce_op(ReduceOp::kMean, 0), {Operand::node(stacked)});
    if (forest.classes.empty()) return b.take();
    const int best = b.add(DlOperator::argmax(1), {Operand::node(mean)});
    b.add(DlOperator::gather_rows(), {Operand::weight(0), Operand::node(best)},
          {make_weight("classes", column_tensor(forest.classes))});
    return b.take();
  }
  const int sum = b.add(DlOperator::reduce_op(ReduceOp::kSum, 0), {Operand::node(stacked)});
  const int scaled = b.add(DlOperator::binary_op(BinaryOp::kMul), {Operand::node(sum), Operand::weight(0)},
                           {make_weight("learning_rate", row_tensor({forest.learning_rate}))});
  const int raw = b.add(DlOperator::binary_op(BinaryOp::kAdd), {Operand::node(scaled), Operand::weight(0)},
                        {make_weight("base_score", row_tensor({forest.base_score}))});
  if (forest.classes.empty()) return b.take();
  const int prob = b.add(DlOperator::monotonic(MonotonicOp::kSigmoid), {Operand::node(raw)});
  const int positive = b.add(DlOperator::binary_op(BinaryOp::kGreater), {Operand::node(prob), Operand::weight(0)},
                             {make_weight("decision", row_tensor({0.5f}))});
  b.add(DlOperator::gather_rows(), {Operand::weight(0), Operand::node(positive)},
        {make_weight("classes", column_tensor(forest.classes))});
  return b.take();
}

std::vector<OperatorRep> convert_linear(const Linear& m, std::size_t n_features) {
  Builder b;
  const std::size_t k = m.coef.size();
  std::vector<float> coef_t(n_features * k);
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t f = 0; f < n_features; ++f) coef_t[f * k + r] = m.coef[r][f];
  const int mm = b.add(DlOperator::matmul(), {Operand::graph_input(), Operand::weight(0)},
                       {make_weight("coef", Tensor::from_floats({n_features, k}, std::move(coef_t)))});
  int z = b.add(DlOperator::binary_op(BinaryOp::kAdd), {Operand::node(mm), Operand::weight(0)},
                {make_weight("intercept", row_tensor(m.intercept))});
  if (m.task == LinearTask::kRegressor) return b.take();

  const Weight classes = make_weight("classes", column_tensor(m.classes));
  if (m.task == LinearTask::kMultiClassifier) {
    if (m.link == Link::kSoftmax) z = b.add(DlOperator::monotonic(MonotonicOp::kSoftmax, 1), {Operand::node(z)});
    if (m.link == Link::kSigmoid) z = b.add(DlOperator::monotonic(MonotonicOp::kSigmoid), {Operand::node(z)});
    const int best = b.add(DlOperator::argmax(1), {Operand::node(z)});
    b.add(DlOperator::gather_rows(), {Operand::weight(0), Operand::node(best)}, {classes});
    return b.take();
  }
  float decision = 0.0f;
  if (m.link == Link::kSigmoid) {
    z = b.add(DlOperator::monotonic(MonotonicOp::kSigmoid), {Operand::node(z)});
    decision = 0.5f;
  }
  const int positive = b.add(DlOperator::binary_op(BinaryOp::kGreater), {Operand::node(z), Operand::weight(0)},
                             {make_weight("decision", row_tensor({decision}))});
  b.add(DlOperator::gather_rows(), {Operand::weight(0), Operand::node(positive)}, {classes});
  return b.take();
}

std::vector<OperatorRep> convert_scaler(const Scaler& scaler, std::size_t n_features) {
  (void)n_features;
  Builder b;
  const Operand x = Operand::graph_input();
  auto ew = [&](BinaryOp op, Operand in, const char* name, const std::vector<float>& v) {
    return b.add(DlOperator::binary_op(op), {in, Operand::weight(0)}, {make_weight(name, row_tensor(v))});
  };
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Binarizer>) {
          const int g = ew(BinaryOp::kGreater, x, "threshold", {s.threshold});
          b.add(DlOperator::cast(DType::Float32), {Operand::node(g)});
        } else if constexpr (std::is_same_v<S, Normalizer>) {
          const NormKind kind = s.norm == Norm::kL1 ? NormKind::kL1 : s.norm == Norm::kL2 ? NormKind::kL2 : NormKind::kMax;
          const int norm = b.add(DlOperator::row_norm(kind), {x});
          b.add(DlOperator::binary_op(BinaryOp::kDiv), {x, Operand::node(norm)});
        } else if constexpr (std::is_same_v<S, MinMaxScaler>) {
          const int scaled = ew(BinaryOp::kMul, x, "scale", s.scale);
          ew(BinaryOp::kAdd, Operand::node(scaled), "min", s.min);
        } else if constexpr (std::is_same_v<S, RobustScaler>) {
          const int centred = ew(BinaryOp::kSub, x, "center", s.center);
          ew(BinaryOp::kDiv, Operand::node(centred), "scale", s.scale);
        } else if constexpr (std::is_same_v<S, StandardScaler>) {
          const int centred = ew(BinaryOp::kSub, x, "mean", s.mean);
          ew(BinaryOp::kDiv, Operand::node(centred), "scale", s.scale);
        } else {
          ew(BinaryOp::kDiv, x, "scale", s.scale);
        }
      },
      scaler);
  return b.take();
}

std::vector<OperatorRep> convert_model(const TrainedModel& model) {
  return std::visit(
      [&](const auto& body) -> std::vector<OperatorRep> {
        using B = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<B, DecisionTree>) return convert_tree(body, model.n_features);
        else if constexpr (std::is_same_v<B, Forest>) return convert_ensemble(body, model.n_features);
        else if constexpr (std::is_same_v<B, Linear>) return convert_linear(body, model.n_features);
        else return convert_scaler(body, model.n_features);
      },
      model.body);
}

}  // namespace mltc
