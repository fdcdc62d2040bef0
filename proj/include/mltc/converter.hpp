// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "mltc/ecg.hpp"
#include "mltc/model.hpp"
#include "mltc/tensor.hpp"

namespace mltc {

/// Dense Float32 encoding of one tree. Internal nodes are numbered in level order, leaves in
/// in-order; `internal` and `leaves` map those numbers back to node indices.
struct TreeTensors {
  Tensor w1;          // N_F x N_I, 1 where feature i is tested at internal node j
  Tensor w2;          // N_I thresholds
  Tensor w3;          // N_I x N_L, 0 iff leaf j is in the left subtree of internal node i
  Tensor leaf_table;  // N_L x payload width
  std::vector<int> internal;
  std::vector<int> leaves;
};

/// With non-empty `classes` each leaf row holds the label of its highest-scoring class;
/// otherwise the leaf vector itself.
TreeTensors tree_tensors(const TreeNodes& nodes, std::size_t n_features, const std::vector<float>& classes = {});

std::vector<OperatorRep> convert_tree(const DecisionTree& tree, std::size_t n_features);
std::vector<OperatorRep> convert_linear(const Linear& model, std::size_t n_features);
std::vector<OperatorRep> convert_scaler(const Scaler& scaler, std::size_t n_features);
std::vector<OperatorRep> convert_ensemble(const Forest& forest, std::size_t n_features);
std::vector<OperatorRep> convert_model(const TrainedModel& model);

}  // namespace mltc
