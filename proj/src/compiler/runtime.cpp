// SPDX-License-Identifier: Apache-2.0
#include "mltc/runtime.hpp"

#include <sstream>

#include "mltc/error.hpp"
#include "mltc/kernels.hpp"

namespace mltc {

namespace {

[[noreturn]] void unresolved(const EcgNode& n, const std::string& msg) {
  throw Error(ErrorCode::kUnresolvedKernel,
              "node " + std::to_string(n.id) + " (" + kernel_name(n.op, n.use_sparse) + "): " + msg);
}

std::string dt(DType d) { return std::string(dtype_name(d)); }

// Checks the kernel can run at `c`; returns the dispatch dtype.
DType resolve_variant(const EcgNode& n, DType c) {
  const DType k = promote_for_kernel(c);
  if (n.use_sparse && n.op.kind != OpKind::kMatmul) unresolved(n, "no sparse variant");
  switch (n.op.kind) {
    case OpKind::kBinary:
      if (!is_comparison(n.op.binary) && k == DType::Bool) unresolved(n, "no bool arithmetic variant");
      break;
    case OpKind::kReduce:
      if (n.op.reduce == ReduceOp::kMean && !is_float(k)) unresolved(n, "mean needs a float variant");
      break;
    case OpKind::kMonotonic:
    case OpKind::kRowNorm:
      if (!is_float(k)) unresolved(n, "only float variants exist");
      break;
    case OpKind::kArgmax:
      if (!dtype_leq(DType::Int32, c) && !is_float(c)) unresolved(n, "index output would be wider than " + dt(c));
      break;
    default:
      break;
  }
  return k;
}

}  // namespace

KernelPlan translate(const Ecg& g) {
  if (g.input.features == 0) throw Error(ErrorCode::kShapeInferenceFailure, "graph input has no features");
  KernelPlan plan;
  plan.features = g.input.features;
  plan.input_dtype = g.input.dtype;
  plan.slots.push_back({g.input.dtype, {kBatch, static_cast<std::int64_t>(g.input.features)}});
  plan.input_slot = 0;
  std::vector<std::pair<int, int>> slot_of;  // node id -> slot
  auto lookup = [&](int id) {
    for (auto [n, s] : slot_of)
      if (n == id) return s;
    throw Error(ErrorCode::kDanglingReference, "node " + std::to_string(id) + " used before it is computed");
  };

  for (int id : topo_order(g)) {
    const EcgNode& n = g.node(id);
    const IntermediateResult out = infer_output(g, n);
    for (std::int64_t e : out.shape) {
      if (e == 0) throw Error(ErrorCode::kShapeInferenceFailure, "node " + std::to_string(id) + " has an empty extent");
    }
    const DType c = compute_dtype(g, n);
    Invocation inv;
    inv.node_id = id;
    inv.op = n.op;
    inv.sparse = n.use_sparse;
    inv.compute = resolve_variant(n, c);
    inv.accumulate = out.dtype;
    for (std::size_t i = 0; i < n.inputs.size(); ++i) {
      const Operand& o = n.inputs[i];
      PlanArg a;
      DType d;
      if (o.source == Operand::Source::kWeight) {
        const Weight& w = n.weights.at(static_cast<std::size_t>(o.index));
        a.kind = PlanArg::Kind::kWeight;
        a.weight = w.tensor;
        a.label = w.name;
        d = w.actual_dtype;
      } else {
        a.slot = o.source == Operand::Source::kGraphInput ? plan.input_slot : lookup(o.index);
        d = plan.slots[static_cast<std::size_t>(a.slot)].dtype;
      }
      if (operand_joins(n.op, i)) {
        if (!dtype_leq(d, c)) unresolved(n, "operand " + std::to_string(i) + " is " + dt(d) + ", wider than " + dt(c));
        if (promote_for_kernel(d) != inv.compute && n.op.kind != OpKind::kCast) a.cast_to = inv.compute;
      } else if (n.op.kind == OpKind::kGatherRows && is_float(d)) {
        unresolved(n, "gather indices must be integral");
      }
      if (n.use_sparse && i == 1 && !(a.kind == PlanArg::Kind::kWeight && a.weight.is_csr())) {
        unresolved(n, "sparse variant needs a CSR weight");
      }
      inv.args.push_back(std::move(a));
    }
    inv.out_slot = static_cast<int>(plan.slots.size());
    plan.slots.push_back({out.dtype, out.shape});
    slot_of.emplace_back(id, inv.out_slot);
    plan.steps.push_back(std::move(inv));
  }
  plan.output_slot = lookup(g.output);
  return plan;
}

Tensor execute(const KernelPlan& plan, const Tensor& input) {
  if (input.rank() != 2 || input.cols() != plan.features) {
    throw Error(ErrorCode::kInputMismatch, "expected input of shape [batch," + std::to_string(plan.features) +
                                               "], got " + shape_string(input.shape()));
  }
  if (input.dtype() != plan.input_dtype) {
    throw Error(ErrorCode::kInputMismatch,
                "expected " + dt(plan.input_dtype) + " input, got " + dt(input.dtype()));
  }
  std::vector<std::optional<Tensor>> slots(plan.slots.size());
  slots[static_cast<std::size_t>(plan.input_slot)] = input;
  const std::size_t batch = input.rows();

  for (const Invocation& inv : plan.steps) {
    std::vector<Tensor> args;
    args.reserve(inv.args.size());
    for (const PlanArg& a : inv.args) {
      Tensor t = a.kind == PlanArg::Kind::kWeight ? a.weight : *slots[static_cast<std::size_t>(a.slot)];
      if (a.cast_to) t = cast(t, *a.cast_to);
      args.push_back(std::move(t));
    }
    Tensor out;
    switch (inv.op.kind) {
      case OpKind::kMatmul:
        out = inv.sparse ? sparse_dense_matmul(args[0], args[1], inv.accumulate)
                         : matmul(args[0], args[1], inv.accumulate);
        break;
      case OpKind::kBinary:
        out = ew_binary(inv.op.binary, args[0], args[1]);
        break;
      case OpKind::kReduce:
        out = reduce(inv.op.reduce, args[0], Axis{inv.op.axis});
        break;
      case OpKind::kArgmax:
        out = argmax(args[0], Axis{inv.op.axis});
        break;
      case OpKind::kGatherRows:
        out = gather_rows(args[0], args[1]);
        break;
      case OpKind::kMonotonic:
        out = args[0];
        for (const MonotonicStep& s : inv.op.chain) out = monotonic_apply(s.op, out, Axis{s.axis});
        break;
      case OpKind::kCast:
        out = cast(args[0], inv.op.target);
        break;
      case OpKind::kRowNorm:
        out = row_norm(args[0], inv.op.norm);
        break;
      case OpKind::kStack:
        out = stack(args);
        break;
      case OpKind::kBroadcastRows:
        out = broadcast_rows(args[1], batch);
        break;
    }
    slots[static_cast<std::size_t>(inv.out_slot)] = std::move(out);
  }
  return *slots[static_cast<std::size_t>(plan.output_slot)];
}

std::string dump_plan(const KernelPlan& plan) {
  std::ostringstream os;
  os << "%" << plan.input_slot << " = input " << dt(plan.input_dtype) << "[?," << plan.features << "]\n";
  for (const Invocation& inv : plan.steps) {
    const PlanSlot& s = plan.slots[static_cast<std::size_t>(inv.out_slot)];
    os << "%" << inv.out_slot << " = " << kernel_name(inv.op, inv.sparse) << "[" << dt(inv.compute);
    if (inv.op.kind == OpKind::kMatmul) os << "->" << dt(inv.accumulate);
    os << ", " << (inv.sparse ? "sparse" : "dense") << "](";
    for (std::size_t i = 0; i < inv.args.size(); ++i) {
      const PlanArg& a = inv.args[i];
      if (i) os << ", ";
      if (a.kind == PlanArg::Kind::kWeight) {
        os << a.label << ":" << dt(a.weight.dtype()) << (a.weight.is_csr() ? "/csr" : "");
      } else {
        os << "%" << a.slot;
      }
      if (a.cast_to) os << " as " << dt(*a.cast_to);
    }
    os << ") -> " << dt(s.dtype) << sym_shape_string(s.shape) << "  # node " << inv.node_id << "\n";
  }
  os << "return %" << plan.output_slot << "\n";
  return os.str();
}

}  // namespace mltc
