// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mltc/ecg.hpp"
#include "mltc/tensor.hpp"

namespace mltc {

struct PlanArg {
  enum class Kind { kSlot, kWeight };
  Kind kind = Kind::kSlot;
  int slot = 0;
  Tensor weight;                   // shares storage with the graph's weight
  std::string label;               // weight name for dumps
  std::optional<DType> cast_to;    // runtime widening before the kernel
};

struct Invocation {
  int node_id = 0;
  DlOperator op;
  bool sparse = false;
  DType compute = DType::Float32;  // kernel variant after promotion
  DType accumulate = DType::Float32;
  std::vector<PlanArg> args;
  int out_slot = 0;
};

struct PlanSlot {
  DType dtype = DType::Float32;
  SymShape shape;
};

struct KernelPlan {
  std::vector<Invocation> steps;
  std::vector<PlanSlot> slots;
  int input_slot = 0;
  int output_slot = 0;
  std::size_t features = 0;
  DType input_dtype = DType::Float32;
};

/// Resolves a kernel variant for every node. Throws kUnresolvedKernel or
/// kShapeInferenceFailure.
KernelPlan translate(const Ecg& g);

/// Runs the plan on a (batch, features) input. Throws kInputMismatch on a bad input.
Tensor execute(const KernelPlan& plan, const Tensor& input);

/// One invocation per line.
std::string dump_plan(const KernelPlan& plan);

}  // namespace mltc
