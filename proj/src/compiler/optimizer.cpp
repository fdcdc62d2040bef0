// SPDX-License-Identifier: Apache-2.0
#include "mltc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "mltc/error.hpp"

namespace mltc {

namespace {

constexpr std::int64_t kUnbounded = std::numeric_limits<std::int64_t>::max();

std::int64_t max_abs_ceil(const Tensor& t) {
  double m = 0.0;
  for (double v : t.to_doubles()) m = std::max(m, std::fabs(v));
  if (!std::isfinite(m) || m >= 9.0e18) return kUnbounded;
  return static_cast<std::int64_t>(std::ceil(m));
}

long double product(std::int64_t a, std::int64_t b, std::int64_t c) {
  return static_cast<long double>(a) * static_cast<long double>(b) * static_cast<long double>(c);
}

// Integer dtype wide enough for an accumulation of `inner` products bounded by max_a * max_b,
// starting from `d`. Stops at Int32, where the kernel's own runtime check takes over.
DType widen_for_bound(DType d, std::int64_t inner, std::int64_t max_a, std::int64_t max_b) {
  constexpr DType ladder[] = {DType::Bool, DType::Int4, DType::Int8, DType::Int16, DType::Int32};
  bool started = false;
  for (DType step : ladder) {
    if (step == d) started = true;
    if (!started || step == DType::Bool) continue;
    if (product(inner, max_a, max_b) <= static_cast<long double>(dtype_max(step))) return step;
  }
  return DType::Int32;
}

bool strictly_monotonic_along(const DlOperator& op, std::size_t axis) {
  return std::all_of(op.chain.begin(), op.chain.end(), [&](const MonotonicStep& s) {
    if (s.op == MonotonicOp::kRelu) return false;  // flat below zero
    if (s.op == MonotonicOp::kSoftmax) return s.axis == axis;
    return true;
  });
}

void erase_node(Ecg& g, int id) {
  g.nodes.erase(std::remove_if(g.nodes.begin(), g.nodes.end(), [&](const EcgNode& n) { return n.id == id; }),
                g.nodes.end());
}

// One fusion or elimination; false when the graph is already reduced.
bool eliminate_once(Ecg& g, PassReport& r) {
  for (int id : topo_order(g)) {
    const EcgNode& n = g.node(id);
    if (n.category != Category::kMonotonic || id == g.output) continue;
    const std::vector<int> users = g.consumers(id);
    if (users.size() != 1) continue;
    EcgNode& next = g.node(users.front());
    if (next.inputs.size() != 1) continue;
    if (next.category == Category::kMonotonic) {
      std::vector<MonotonicStep> chain = n.op.chain;
      chain.insert(chain.end(), next.op.chain.begin(), next.op.chain.end());
      next.op.chain = std::move(chain);
      next.inputs = n.inputs;
      erase_node(g, id);
      ++r.nodes_rewritten;
      ++r.nodes_eliminated;
      return true;
    }
    if (next.category == Category::kIndices && strictly_monotonic_along(n.op, next.op.axis)) {
      next.inputs = n.inputs;
      erase_node(g, id);
      ++r.nodes_eliminated;
      return true;
    }
  }
  return false;
}

}  // namespace

std::string format_report(const PassReport& r) {
  return r.pass + ": rewritten=" + std::to_string(r.nodes_rewritten) + " casts=" + std::to_string(r.casts_inserted) +
         " eliminated=" + std::to_string(r.nodes_eliminated) + " weights=" + std::to_string(r.weights_changed);
}

std::int64_t value_bound(const Ecg& g, const EcgNode& consumer, const Operand& operand) {
  switch (operand.source) {
    case Operand::Source::kWeight:
      return max_abs_ceil(consumer.weights.at(static_cast<std::size_t>(operand.index)).tensor);
    case Operand::Source::kGraphInput:
      return is_float(g.input.dtype) ? kUnbounded : std::max(-dtype_min(g.input.dtype), dtype_max(g.input.dtype));
    case Operand::Source::kNode: {
      const EcgNode& p = g.node(operand.index);
      if (p.category == Category::kComparison) return 1;
      if (p.op.kind == OpKind::kCast) return value_bound(g, p, p.inputs.front());
      const DType d = p.output.dtype;
      return is_float(d) ? kUnbounded : std::max(-dtype_min(d), dtype_max(d));
    }
  }
  return kUnbounded;
}

PassResult dtype_rewriting(const Ecg& g, const HardwareProfile& h) {
  PassResult res{g, {"dr"}};
  Ecg& out = res.graph;
  PassReport& r = res.report;
  std::map<std::pair<int, DType>, int> casts;  // (producer, dtype) -> cast node; producer -1 is the input

  for (int id : topo_order(g)) {
    const DType before = compute_dtype(out, out.node(id));
    DType c;
    {
      const EcgNode& n = out.node(id);
      if (n.op.kind == OpKind::kCast) {
        c = n.op.target;
      } else {
        c = input_join(out, n).value_or(DType::Float32);
        if (accumulates(n.op) && is_integral(c)) {
          c = dtype_join(c, h.preferred_int_dtype);
          std::int64_t inner = 0, max_a = 1, max_b = 1;
          if (n.op.kind == OpKind::kMatmul) {
            inner = operand_shape(out, n, n.inputs[1]).front();
            max_a = value_bound(out, n, n.inputs[0]);
            max_b = value_bound(out, n, n.inputs[1]);
          } else {
            inner = operand_shape(out, n, n.inputs[0]).at(n.op.axis);
            max_a = value_bound(out, n, n.inputs[0]);
          }
          c = inner == kBatch ? DType::Int32 : widen_for_bound(c, inner, max_a, max_b);
        }
        c = kernel_floor(n.op, c);
      }
    }
    EcgNode& n = out.node(id);
    n.op_dtype = c;
    if (c != before) ++r.nodes_rewritten;
    if (n.op.kind == OpKind::kCast) continue;  // converts its own input

    for (std::size_t i = 0; i < n.inputs.size(); ++i) {
      const Operand o = n.inputs[i];
      if (!operand_joins(n.op, i) || o.source != Operand::Source::kWeight) continue;
      Weight& w = n.weights[static_cast<std::size_t>(o.index)];
      if (w.actual_dtype == c) continue;
      w.tensor = cast(w.tensor, c);
      w.actual_dtype = c;
      w.sparsity = weight_sparsity(w.tensor);
      ++r.weights_changed;
    }

    std::vector<std::pair<std::size_t, Operand>> rewires;
    for (std::size_t i = 0; i < n.inputs.size(); ++i) {
      const Operand o = n.inputs[i];
      if (!operand_joins(n.op, i) || o.source == Operand::Source::kWeight) continue;
      const DType d = operand_dtype(out, n, o);
      if (d == c) continue;
      const std::pair<int, DType> key{o.source == Operand::Source::kNode ? o.index : -1, c};
      auto it = casts.find(key);
      if (it == casts.end()) {
        EcgNode cast_node;
        cast_node.id = out.next_id();
        cast_node.op = DlOperator::cast(c);
        cast_node.category = category_of(cast_node.op);
        cast_node.op_dtype = c;
        cast_node.inputs = {o};
        cast_node.output = infer_output(out, cast_node);
        it = casts.emplace(key, cast_node.id).first;
        rewires.emplace_back(i, Operand::node(cast_node.id));
        out.nodes.push_back(std::move(cast_node));
        ++r.casts_inserted;
      } else {
        rewires.emplace_back(i, Operand::node(it->second));
      }
    }
    EcgNode& m = out.node(id);  // push_back may have moved it
    for (const auto& [i, o] : rewires) m.inputs[i] = o;
    m.output = infer_output(out, m);
  }
  refresh_outputs(out);
  return res;
}

PassResult sparse_operator_replacing(const Ecg& g, const HardwareProfile& h) {
  PassResult res{g, {"sor"}};
  for (EcgNode& n : res.graph.nodes) {
    if (n.op.kind != OpKind::kMatmul || n.use_sparse || n.inputs.size() != 2 ||
        n.inputs[1].source != Operand::Source::kWeight) {
      continue;
    }
    Weight& w = n.weights[static_cast<std::size_t>(n.inputs[1].index)];
    if (w.tensor.rank() != 2 || !(w.sparsity < h.sparse_threshold)) continue;
    w.tensor = to_csr(w.tensor);
    n.use_sparse = true;
    ++res.report.nodes_rewritten;
    ++res.report.weights_changed;
  }
  return res;
}

PassResult redundant_elimination(const Ecg& g) {
  PassResult res{g, {"re"}};
  while (eliminate_once(res.graph, res.report)) {
  }
  refresh_outputs(res.graph);
  return res;
}

PassSet PassSet::parse(std::string_view text) {
  PassSet p;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    std::string_view item = text.substr(start, comma - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (item == "re") p.re = true;
    else if (item == "dr") p.dr = true;
    else if (item == "sor") p.sor = true;
    else if (item == "all") p = all();
    else if (!item.empty() && item != "none") {
      throw Error(ErrorCode::kUsage, "unknown pass '" + std::string(item) + "' (expected re, dr, sor, all or none)");
    }
    start = comma + 1;
  }
  return p;
}

std::string PassSet::to_string() const {
  std::string s;
  for (auto [on, name] : {std::pair{re, "re"}, {dr, "dr"}, {sor, "sor"}}) {
    if (!on) continue;
    if (!s.empty()) s += ",";
    s += name;
  }
  return s.empty() ? "none" : s;
}

PipelineResult run_pipeline(const Ecg& g, const HardwareProfile& h, PassSet passes) {
  PipelineResult res{g, {}};
  if (passes.re) {
    auto r = redundant_elimination(res.graph);
    res.graph = std::move(r.graph);
    res.reports.push_back(r.report);
  }
  if (passes.dr) {
    auto r = dtype_rewriting(res.graph, h);
    res.graph = std::move(r.graph);
    res.reports.push_back(r.report);
  }
  if (passes.sor) {
    auto r = sparse_operator_replacing(res.graph, h);
    res.graph = std::move(r.graph);
    res.reports.push_back(r.report);
  }
  return res;
}

}  // namespace mltc
