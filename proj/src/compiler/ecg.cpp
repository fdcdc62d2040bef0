// SPDX-License-Identifier: Apache-2.0
#include "mltc/ecg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "mltc/error.hpp"

namespace mltc {

namespace {

[[noreturn]] void shape_fail(const EcgNode& n, const std::string& msg) {
  throw Error(ErrorCode::kShapeInferenceFailure, "node " + std::to_string(n.id) + ": " + msg);
}

std::string dt(DType d) { return std::string(dtype_name(d)); }

SymShape broadcast(const EcgNode& n, const SymShape& a, const SymShape& b) {
  const std::size_t rank = std::max(a.size(), b.size());
  SymShape out(rank);
  for (std::size_t i = 0; i < rank; ++i) {
    const std::int64_t x = i < rank - a.size() ? 1 : a[i - (rank - a.size())];
    const std::int64_t y = i < rank - b.size() ? 1 : b[i - (rank - b.size())];
    if (x == y || y == 1) out[i] = x;
    else if (x == 1) out[i] = y;
    else shape_fail(n, "cannot broadcast " + sym_shape_string(a) + " with " + sym_shape_string(b));
  }
  return out;
}

void expect_arity(const EcgNode& n, std::size_t k) {
  if (n.inputs.size() != k) {
    shape_fail(n, kernel_name(n.op, n.use_sparse) + " takes " + std::to_string(k) + " operands, got " +
                      std::to_string(n.inputs.size()));
  }
}

SymShape tensor_shape(const Tensor& t) {
  SymShape s;
  for (std::size_t e : t.shape()) s.push_back(static_cast<std::int64_t>(e));
  return s;
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::string_view category_name(Category c) {
  switch (c) {
    case Category::kComparison:
      return "comparison";
    case Category::kIndices:
      return "indices";
    case Category::kMonotonic:
      return "monotonic";
    case Category::kReduction:
      return "reduction";
    case Category::kArithmetic:
      return "arithmetic";
  }
  return "?";
}

DlOperator DlOperator::binary_op(BinaryOp op) {
  DlOperator d;
  d.kind = OpKind::kBinary;
  d.binary = op;
  return d;
}
DlOperator DlOperator::reduce_op(ReduceOp op, std::size_t axis) {
  DlOperator d;
  d.kind = OpKind::kReduce;
  d.reduce = op;
  d.axis = axis;
  return d;
}
DlOperator DlOperator::argmax(std::size_t axis) {
  DlOperator d;
  d.kind = OpKind::kArgmax;
  d.axis = axis;
  return d;
}
DlOperator DlOperator::gather_rows() {
  DlOperator d;
  d.kind = OpKind::kGatherRows;
  return d;
}
DlOperator DlOperator::monotonic(MonotonicOp op, std::size_t axis) {
  DlOperator d;
  d.kind = OpKind::kMonotonic;
  d.chain = {MonotonicStep{op, axis}};
  return d;
}
DlOperator DlOperator::cast(DType target) {
  DlOperator d;
  d.kind = OpKind::kCast;
  d.target = target;
  return d;
}
DlOperator DlOperator::row_norm(NormKind kind) {
  DlOperator d;
  d.kind = OpKind::kRowNorm;
  d.norm = kind;
  return d;
}
DlOperator DlOperator::stack() {
  DlOperator d;
  d.kind = OpKind::kStack;
  return d;
}
DlOperator DlOperator::broadcast_rows() {
  DlOperator d;
  d.kind = OpKind::kBroadcastRows;
  return d;
}

Category category_of(const DlOperator& op) {
  switch (op.kind) {
    case OpKind::kBinary:
      return is_comparison(op.binary) ? Category::kComparison : Category::kArithmetic;
    case OpKind::kReduce:
    case OpKind::kRowNorm:
      return Category::kReduction;
    case OpKind::kArgmax:
      return Category::kIndices;
    case OpKind::kMonotonic:
      return Category::kMonotonic;
    default:
      return Category::kArithmetic;
  }
}

std::string kernel_name(const DlOperator& op, bool use_sparse) {
  auto step_text = [](const MonotonicStep& s) {
    std::string t(monotonic_op_name(s.op));
    if (s.op == MonotonicOp::kSoftmax) t += "<axis=" + std::to_string(s.axis) + ">";
    return t;
  };
  switch (op.kind) {
    case OpKind::kMatmul:
      return use_sparse ? "sparse_dense_matmul" : "matmul";
    case OpKind::kBinary:
      return std::string(binary_op_name(op.binary));
    case OpKind::kReduce:
      return "reduce_" + std::string(reduce_op_name(op.reduce)) + "<axis=" + std::to_string(op.axis) + ">";
    case OpKind::kArgmax:
      return "argmax<axis=" + std::to_string(op.axis) + ">";
    case OpKind::kGatherRows:
      return "gather_rows";
    case OpKind::kMonotonic: {
      if (op.chain.size() == 1) return step_text(op.chain.front());
      std::string t = "monotonic_chain(";
      for (std::size_t i = 0; i < op.chain.size(); ++i) t += (i ? "," : "") + step_text(op.chain[i]);
      return t + ")";
    }
    case OpKind::kCast:
      return "cast<" + dt(op.target) + ">";
    case OpKind::kRowNorm:
      return "row_norm<" + std::string(norm_kind_name(op.norm)) + ">";
    case OpKind::kStack:
      return "stack";
    case OpKind::kBroadcastRows:
      return "broadcast_rows";
  }
  return "?";
}

bool accumulates(const DlOperator& op) {
  return op.kind == OpKind::kMatmul || (op.kind == OpKind::kReduce && op.reduce == ReduceOp::kSum);
}

DType smallest_dtype_of(const Tensor& t) {
  const std::vector<double> v = t.to_doubles();
  bool boolean = true, integral = true;
  double lo = 0.0, hi = 0.0;
  for (double x : v) {
    if (x != 0.0 && x != 1.0) boolean = false;
    if (!std::isfinite(x) || std::trunc(x) != x) integral = false;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  if (boolean) return DType::Bool;
  if (integral) {
    for (DType d : {DType::Int4, DType::Int8, DType::Int16, DType::Int32}) {
      if (lo >= static_cast<double>(dtype_min(d)) && hi <= static_cast<double>(dtype_max(d))) return d;
    }
  }
  if (std::all_of(v.begin(), v.end(), [](double x) { return representable_in_half(x); })) return DType::Float16;
  return DType::Float32;
}

double weight_sparsity(const Tensor& t) {
  const std::size_t n = t.numel();
  return n == 0 ? 0.0 : static_cast<double>(t.count_nonzero()) / static_cast<double>(n);
}

Weight make_weight(std::string name, const Tensor& values) {
  Weight w;
  w.name = std::move(name);
  w.smallest_dtype = smallest_dtype_of(values);
  w.actual_dtype = w.smallest_dtype;
  w.tensor = convert_exact(values, w.smallest_dtype);
  w.sparsity = weight_sparsity(w.tensor);
  return w;
}

std::string sym_shape_string(const SymShape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += s[i] == kBatch ? "?" : std::to_string(s[i]);
  }
  return out + "]";
}

bool operand_joins(const DlOperator& op, std::size_t pos) {
  if (op.kind == OpKind::kGatherRows) return pos == 0;
  if (op.kind == OpKind::kBroadcastRows) return pos == 1;
  return true;
}

const EcgNode& Ecg::node(int id) const {
  for (const EcgNode& n : nodes)
    if (n.id == id) return n;
  throw Error(ErrorCode::kDanglingReference, "no node with id " + std::to_string(id));
}

EcgNode& Ecg::node(int id) { return const_cast<EcgNode&>(static_cast<const Ecg&>(*this).node(id)); }

bool Ecg::has_node(int id) const {
  return std::any_of(nodes.begin(), nodes.end(), [&](const EcgNode& n) { return n.id == id; });
}

int Ecg::next_id() const {
  int m = -1;
  for (const EcgNode& n : nodes) m = std::max(m, n.id);
  return m + 1;
}

std::vector<int> Ecg::consumers(int id) const {
  std::vector<int> out;
  for (const EcgNode& n : nodes) {
    for (const Operand& o : n.inputs) {
      if (o.source == Operand::Source::kNode && o.index == id) {
        out.push_back(n.id);
        break;
      }
    }
  }
  return out;
}

std::vector<int> topo_order(const Ecg& g) {
  std::unordered_map<int, std::size_t> pos;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    if (!pos.emplace(g.nodes[i].id, i).second) {
      throw Error(ErrorCode::kCyclicGraph, "duplicate node id " + std::to_string(g.nodes[i].id));
    }
  }
  std::vector<int> pending(g.nodes.size(), 0);
  std::unordered_map<int, std::vector<int>> users;
  for (const EcgNode& n : g.nodes) {
    std::set<int> deps;
    for (const Operand& o : n.inputs) {
      if (o.source != Operand::Source::kNode) continue;
      if (!pos.count(o.index)) {
        throw Error(ErrorCode::kDanglingReference,
                    "node " + std::to_string(n.id) + " reads missing node " + std::to_string(o.index));
      }
      deps.insert(o.index);
    }
    pending[pos[n.id]] = static_cast<int>(deps.size());
    for (int d : deps) users[d].push_back(n.id);
  }
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (const EcgNode& n : g.nodes)
    if (pending[pos[n.id]] == 0) ready.push(n.id);
  std::vector<int> order;
  order.reserve(g.nodes.size());
  while (!ready.empty()) {
    const int id = ready.top();
    ready.pop();
    order.push_back(id);
    for (int u : users[id]) {
      if (--pending[pos[u]] == 0) ready.push(u);
    }
  }
  if (order.size() != g.nodes.size()) throw Error(ErrorCode::kCyclicGraph, "graph contains a cycle");
  return order;
}

DType kernel_floor(const DlOperator& op, DType joined) {
  switch (op.kind) {
    case OpKind::kBinary:
      if (!is_comparison(op.binary) && is_integral(joined)) return dtype_join(joined, DType::Int32);
      return joined;
    case OpKind::kReduce:
      return op.reduce == ReduceOp::kMean ? DType::Float32 : joined;
    case OpKind::kArgmax:
      return dtype_join(joined, DType::Int32);
    case OpKind::kMonotonic:
    case OpKind::kRowNorm:
      return DType::Float32;
    case OpKind::kCast:
      return op.target;
    default:
      return joined;
  }
}

DType operand_dtype(const Ecg& g, const EcgNode& n, const Operand& o) {
  switch (o.source) {
    case Operand::Source::kGraphInput:
      return g.input.dtype;
    case Operand::Source::kNode:
      return g.node(o.index).output.dtype;
    case Operand::Source::kWeight:
      return n.weights.at(static_cast<std::size_t>(o.index)).actual_dtype;
  }
  return DType::Float32;
}

SymShape operand_shape(const Ecg& g, const EcgNode& n, const Operand& o) {
  switch (o.source) {
    case Operand::Source::kGraphInput:
      return {kBatch, static_cast<std::int64_t>(g.input.features)};
    case Operand::Source::kNode:
      return g.node(o.index).output.shape;
    case Operand::Source::kWeight:
      return tensor_shape(n.weights.at(static_cast<std::size_t>(o.index)).tensor);
  }
  return {};
}

std::optional<DType> input_join(const Ecg& g, const EcgNode& n) {
  std::optional<DType> j;
  for (std::size_t i = 0; i < n.inputs.size(); ++i) {
    if (!operand_joins(n.op, i)) continue;
    const DType d = operand_dtype(g, n, n.inputs[i]);
    j = j ? dtype_join(*j, d) : d;
  }
  return j;
}

DType compute_dtype(const Ecg& g, const EcgNode& n) {
  if (n.op_dtype) return *n.op_dtype;
  return kernel_floor(n.op, input_join(g, n).value_or(DType::Float32));
}

IntermediateResult infer_output(const Ecg& g, const EcgNode& n) {
  std::vector<SymShape> in;
  for (const Operand& o : n.inputs) {
    if (o.source == Operand::Source::kWeight &&
        (o.index < 0 || static_cast<std::size_t>(o.index) >= n.weights.size())) {
      shape_fail(n, "weight operand " + std::to_string(o.index) + " does not exist");
    }
    in.push_back(operand_shape(g, n, o));
  }
  const DType c = compute_dtype(g, n);
  const DType k = promote_for_kernel(c);
  IntermediateResult r;
  auto rank_is = [&](std::size_t i, std::size_t rank) {
    if (in[i].size() != rank) {
      shape_fail(n, "operand " + std::to_string(i) + " has shape " + sym_shape_string(in[i]) + ", expected rank " +
                        std::to_string(rank));
    }
  };
  auto axis_ok = [&](std::size_t axis) {
    if (axis >= in[0].size()) shape_fail(n, "axis " + std::to_string(axis) + " out of range for " + sym_shape_string(in[0]));
  };
  switch (n.op.kind) {
    case OpKind::kMatmul:
      expect_arity(n, 2);
      rank_is(0, 2);
      rank_is(1, 2);
      if (in[0][1] != in[1][0] || in[0][1] == kBatch) {
        shape_fail(n, "inner extents differ: " + sym_shape_string(in[0]) + " x " + sym_shape_string(in[1]));
      }
      r.shape = {in[0][0], in[1][1]};
      r.dtype = is_float(k) ? DType::Float32 : DType::Int32;
      break;
    case OpKind::kBinary:
      expect_arity(n, 2);
      r.shape = broadcast(n, in[0], in[1]);
      r.dtype = is_comparison(n.op.binary) ? DType::Bool : k;
      break;
    case OpKind::kReduce:
      expect_arity(n, 1);
      axis_ok(n.op.axis);
      r.shape = in[0];
      r.shape.erase(r.shape.begin() + static_cast<std::ptrdiff_t>(n.op.axis));
      if (n.op.reduce == ReduceOp::kMean) r.dtype = DType::Float32;
      else if (n.op.reduce == ReduceOp::kSum && is_integral(k)) r.dtype = DType::Int32;
      else r.dtype = k;
      break;
    case OpKind::kArgmax:
      expect_arity(n, 1);
      axis_ok(n.op.axis);
      if (in[0][n.op.axis] == 0) shape_fail(n, "argmax over an empty axis");
      r.shape = in[0];
      r.shape.erase(r.shape.begin() + static_cast<std::ptrdiff_t>(n.op.axis));
      r.dtype = DType::Int32;
      break;
    case OpKind::kGatherRows:
      expect_arity(n, 2);
      rank_is(0, 2);
      if (!(in[1].size() == 1 || (in[1].size() == 2 && in[1][1] == 1))) {
        shape_fail(n, "gather indices must be a vector or a single column, got " + sym_shape_string(in[1]));
      }
      r.shape = {in[1][0], in[0][1]};
      r.dtype = k;
      break;
    case OpKind::kMonotonic:
      expect_arity(n, 1);
      for (const MonotonicStep& s : n.op.chain) {
        if (s.op == MonotonicOp::kSoftmax) axis_ok(s.axis);
      }
      if (n.op.chain.empty()) shape_fail(n, "empty monotonic chain");
      r.shape = in[0];
      r.dtype = DType::Float32;
      break;
    case OpKind::kCast:
      expect_arity(n, 1);
      r.shape = in[0];
      r.dtype = n.op.target;
      break;
    case OpKind::kRowNorm:
      expect_arity(n, 1);
      rank_is(0, 2);
      r.shape = {in[0][0], 1};
      r.dtype = DType::Float32;
      break;
    case OpKind::kStack:
      if (in.empty()) shape_fail(n, "stack of nothing");
      for (const SymShape& s : in) {
        if (s != in[0]) shape_fail(n, "stack operands differ: " + sym_shape_string(s) + " vs " + sym_shape_string(in[0]));
      }
      r.shape = {static_cast<std::int64_t>(in.size())};
      r.shape.insert(r.shape.end(), in[0].begin(), in[0].end());
      r.dtype = k;
      break;
    case OpKind::kBroadcastRows:
      expect_arity(n, 2);
      rank_is(1, 2);
      if (in[0].empty()) shape_fail(n, "batch source has rank 0");
      if (in[1][0] != 1) shape_fail(n, "broadcast_rows expects a single row, got " + sym_shape_string(in[1]));
      r.shape = {in[0][0], in[1][1]};
      r.dtype = k;
      break;
  }
  return r;
}

void refresh_outputs(Ecg& g) {
  for (int id : topo_order(g)) {
    EcgNode& n = g.node(id);
    n.output = infer_output(g, n);
  }
}

Ecg build_ecg(const std::vector<OperatorRep>& reps, const InputSpec& input) {
  if (reps.empty()) throw Error(ErrorCode::kDanglingReference, "no operators: the graph has no output");
  Ecg g;
  g.input = input;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    const OperatorRep& rep = reps[i];
    EcgNode n;
    n.id = static_cast<int>(i);
    n.op = rep.op;
    n.category = category_of(rep.op);
    n.inputs = rep.inputs;
    for (const Weight& w : rep.weights) n.weights.push_back(make_weight(w.name, w.tensor));
    for (const Operand& o : rep.inputs) {
      if (o.source == Operand::Source::kNode && (o.index < 0 || static_cast<std::size_t>(o.index) >= reps.size())) {
        throw Error(ErrorCode::kDanglingReference,
                    "operator " + std::to_string(i) + " reads operator " + std::to_string(o.index) + " which does not exist");
      }
      if (o.source == Operand::Source::kWeight &&
          (o.index < 0 || static_cast<std::size_t>(o.index) >= rep.weights.size())) {
        throw Error(ErrorCode::kDanglingReference,
                    "operator " + std::to_string(i) + " reads missing weight " + std::to_string(o.index));
      }
    }
    g.nodes.push_back(std::move(n));
  }
  g.output = static_cast<int>(reps.size()) - 1;
  refresh_outputs(g);
  return g;
}

std::vector<std::string> validate_ecg(const Ecg& g) {
  std::vector<std::string> v;
  auto at = [](const EcgNode& n) { return "node " + std::to_string(n.id) + ": "; };

  std::vector<int> order;
  try {
    order = topo_order(g);
  } catch (const Error& e) {
    v.push_back(e.what());
    return v;
  }
  if (!g.has_node(g.output)) {
    v.push_back("output node " + std::to_string(g.output) + " does not exist");
    return v;
  }
  if (g.input.features == 0) v.push_back("graph input has no features");

  // Everything must feed the output.
  std::set<int> live{g.output};
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (!live.count(*it)) continue;
    for (const Operand& o : g.node(*it).inputs)
      if (o.source == Operand::Source::kNode) live.insert(o.index);
  }
  for (const EcgNode& n : g.nodes) {
    if (!live.count(n.id)) v.push_back(at(n) + "does not reach the output");
  }

  for (int id : order) {
    const EcgNode& n = g.node(id);
    if (n.category != category_of(n.op)) {
      v.push_back(at(n) + "category " + std::string(category_name(n.category)) + " does not match " +
                  kernel_name(n.op, n.use_sparse));
    }
    bool weights_ok = true;
    for (const Weight& w : n.weights) {
      if (weight_sparsity(w.tensor) != w.sparsity) v.push_back(at(n) + w.name + " sparsity is stale");
      if (!dtype_leq(w.smallest_dtype, w.actual_dtype)) {
        v.push_back(at(n) + w.name + " actual dtype " + dt(w.actual_dtype) + " is below its smallest dtype " +
                    dt(w.smallest_dtype));
      }
      if (w.tensor.dtype() != w.actual_dtype) {
        v.push_back(at(n) + w.name + " tensor is " + dt(w.tensor.dtype()) + " but actual dtype is " + dt(w.actual_dtype));
      }
      if (w.tensor.is_csr() && !n.use_sparse) v.push_back(at(n) + w.name + " is CSR on a dense node");
    }
    for (const Operand& o : n.inputs) {
      if (o.source == Operand::Source::kWeight && (o.index < 0 || static_cast<std::size_t>(o.index) >= n.weights.size())) {
        v.push_back(at(n) + "reads missing weight " + std::to_string(o.index));
        weights_ok = false;
      }
    }
    if (!weights_ok) continue;
    if (n.use_sparse) {
      const bool ok = n.op.kind == OpKind::kMatmul && n.inputs.size() == 2 &&
                      n.inputs[1].source == Operand::Source::kWeight &&
                      n.weights[static_cast<std::size_t>(n.inputs[1].index)].tensor.is_csr();
      if (!ok) v.push_back(at(n) + "use_sparse needs a matmul with a CSR weight");
    }
    if (n.op_dtype) {
      for (std::size_t i = 0; i < n.inputs.size(); ++i) {
        if (!operand_joins(n.op, i)) continue;
        const DType d = operand_dtype(g, n, n.inputs[i]);
        if (!dtype_leq(d, *n.op_dtype)) {
          v.push_back(at(n) + "operand " + std::to_string(i) + " (" + dt(d) + ") is wider than op dtype " +
                      dt(*n.op_dtype));
        }
      }
    }
    try {
      const IntermediateResult r = infer_output(g, n);
      if (r.dtype != n.output.dtype) {
        v.push_back(at(n) + "output recorded as " + dt(n.output.dtype) + " but the kernel produces " + dt(r.dtype));
      }
      if (r.shape != n.output.shape) {
        v.push_back(at(n) + "output shape recorded as " + sym_shape_string(n.output.shape) + " but inferred " +
                    sym_shape_string(r.shape));
      }
    } catch (const Error& e) {
      v.push_back(e.what());
    }
    if (n.category == Category::kComparison || n.category == Category::kIndices) {
      const DType want = n.category == Category::kComparison ? DType::Bool : DType::Int32;
      bool lowering = n.output.dtype == want;
      for (std::size_t i = 0; i < n.inputs.size(); ++i) {
        if (operand_joins(n.op, i) && !dtype_leq(n.output.dtype, operand_dtype(g, n, n.inputs[i]))) lowering = false;
      }
      if (!lowering) {
        v.push_back(at(n) + "dtype-lowering breached: " + std::string(category_name(n.category)) + " output is " +
                    dt(n.output.dtype));
      }
    }
  }
  return v;
}

std::string dump_ecg(const Ecg& g) {
  std::ostringstream out;
  out << "input: " << dt(g.input.dtype) << "[?," << g.input.features << "]\n";
  for (int id : topo_order(g)) {
    const EcgNode& n = g.node(id);
    out << n.id << ": " << kernel_name(n.op, n.use_sparse) << "[" << (n.op_dtype ? dt(*n.op_dtype) : "?") << ", "
        << (n.use_sparse ? "sparse" : "dense") << "] (";
    for (std::size_t i = 0; i < n.inputs.size(); ++i) {
      const Operand& o = n.inputs[i];
      if (i) out << ", ";
      if (o.source == Operand::Source::kGraphInput) out << "%x";
      else if (o.source == Operand::Source::kNode) out << "%" << o.index;
      else out << n.weights.at(static_cast<std::size_t>(o.index)).name;
    }
    out << ")";
    if (!n.weights.empty()) {
      out << " {";
      for (std::size_t i = 0; i < n.weights.size(); ++i) {
        const Weight& w = n.weights[i];
        out << (i ? ", " : "") << w.name << ": " << dt(w.actual_dtype) << "/" << fixed4(w.sparsity);
      }
      out << "}";
    }
    out << " -> " << dt(n.output.dtype) << sym_shape_string(n.output.shape) << "\n";
  }
  out << "output: %" << g.output << "\n";
  return out.str();
}

std::optional<HardwareProfile> builtin_profile(std::string_view name) {
  if (name == "cpu-avx2") return HardwareProfile{"cpu-avx2", DType::Int8, 0.3, "int8 accumulation, CSR below 30% density"};
  if (name == "plain") return HardwareProfile{"plain", DType::Int32, 0.0, "no sparse replacement"};
  return std::nullopt;
}

HardwareProfile parse_profile(std::string_view json_text) {
  using Json = nlohmann::json;
  const Json doc = Json::parse(json_text.begin(), json_text.end(), nullptr, false);
  auto schema = [](const std::string& m) { return Error(ErrorCode::kSchemaError, m); };
  if (doc.is_discarded() || !doc.is_object()) throw schema("$: profile must be a JSON object");
  for (const char* key : {"name", "preferred_int_dtype", "sparse_threshold"}) {
    if (!doc.contains(key)) throw schema(std::string("$.") + key + ": missing required field");
  }
  if (!doc["name"].is_string()) throw schema("$.name: expected a string");
  if (!doc["preferred_int_dtype"].is_string()) throw schema("$.preferred_int_dtype: expected a string");
  if (!doc["sparse_threshold"].is_number()) throw schema("$.sparse_threshold: expected a number");
  HardwareProfile p;
  p.name = doc["name"].get<std::string>();
  const std::string dtype = doc["preferred_int_dtype"].get<std::string>();
  if (dtype == "int8") p.preferred_int_dtype = DType::Int8;
  else if (dtype == "int16") p.preferred_int_dtype = DType::Int16;
  else if (dtype == "int32") p.preferred_int_dtype = DType::Int32;
  else throw Error(ErrorCode::kValidationError, "$.preferred_int_dtype: must be int8, int16 or int32");
  p.sparse_threshold = doc["sparse_threshold"].get<double>();
  if (!(p.sparse_threshold >= 0.0 && p.sparse_threshold <= 1.0)) {
    throw Error(ErrorCode::kValidationError, "$.sparse_threshold: must lie in [0, 1]");
  }
  if (doc.contains("notes") && doc["notes"].is_string()) p.notes = doc["notes"].get<std::string>();
  return p;
}

HardwareProfile load_profile(const std::string& name_or_path) {
  if (auto p = builtin_profile(name_or_path)) return *p;
  std::ifstream in(name_or_path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "'" + name_or_path + "' is neither a built-in profile (cpu-avx2, plain) nor a readable file");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_profile(ss.str());
}

}  // namespace mltc
