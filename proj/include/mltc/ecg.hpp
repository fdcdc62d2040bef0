// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mltc/dtype.hpp"
#include "mltc/kernels.hpp"
#include "mltc/tensor.hpp"

namespace mltc {

enum class Category { kComparison, kIndices, kMonotonic, kReduction, kArithmetic };
std::string_view category_name(Category c);

enum class OpKind { kMatmul, kBinary, kReduce, kArgmax, kGatherRows, kMonotonic, kCast, kRowNorm, kStack, kBroadcastRows };

struct MonotonicStep {
  MonotonicOp op = MonotonicOp::kSigmoid;
  std::size_t axis = 1;  // only read by softmax
  bool operator==(const MonotonicStep&) const = default;
};

/// Concrete kernel and its static attributes. Fields irrelevant to `kind` stay defaulted.
struct DlOperator {
  OpKind kind = OpKind::kMatmul;
  BinaryOp binary = BinaryOp::kAdd;
  ReduceOp reduce = ReduceOp::kSum;
  std::vector<MonotonicStep> chain;  // more than one entry once fused
  NormKind norm = NormKind::kL2;
  std::size_t axis = 0;
  DType target = DType::Float32;  // cast target
  bool operator==(const DlOperator&) const = default;

  static DlOperator matmul() { return {}; }
  static DlOperator binary_op(BinaryOp op);
  static DlOperator reduce_op(ReduceOp op, std::size_t axis);
  static DlOperator argmax(std::size_t axis);
  static DlOperator gather_rows();
  static DlOperator monotonic(MonotonicOp op, std::size_t axis = 1);
  static DlOperator cast(DType target);
  static DlOperator row_norm(NormKind kind);
  static DlOperator stack();
  static DlOperator broadcast_rows();
};

Category category_of(const DlOperator& op);

/// Kernel name with attributes, e.g. "argmax<axis=1>" or "sparse_dense_matmul".
std::string kernel_name(const DlOperator& op, bool use_sparse);

/// Accumulation-bearing kernels take the hardware's preferred integer width.
bool accumulates(const DlOperator& op);

struct Weight {
  std::string name;
  double sparsity = 0.0;  // non-zero elements / all elements
  DType smallest_dtype = DType::Float32;
  DType actual_dtype = DType::Float32;
  Tensor tensor;
};

/// Smallest lattice type holding every element exactly: 0/1 gives Bool, then the integer
/// widths, then Float16, then Float32.
DType smallest_dtype_of(const Tensor& t);
double weight_sparsity(const Tensor& t);

/// Builds a weight stored at its smallest dtype.
Weight make_weight(std::string name, const Tensor& values);

/// Extents of intermediate results. The batch axis is symbolic.
inline constexpr std::int64_t kBatch = -1;
using SymShape = std::vector<std::int64_t>;
std::string sym_shape_string(const SymShape& s);

struct IntermediateResult {
  std::optional<double> sparsity;  // unknown until runtime
  DType dtype = DType::Float32;
  SymShape shape;
};

struct Operand {
  enum class Source { kGraphInput, kNode, kWeight };
  Source source = Source::kGraphInput;
  int index = 0;  // node id or weight position
  bool operator==(const Operand&) const = default;

  static Operand graph_input() { return {Source::kGraphInput, 0}; }
  static Operand node(int id) { return {Source::kNode, id}; }
  static Operand weight(int position) { return {Source::kWeight, position}; }
};

/// True when operand `pos` of `op` takes part in the dtype join. Gather indices and the
/// batch source of broadcast_rows only contribute a shape.
bool operand_joins(const DlOperator& op, std::size_t pos);

struct EcgNode {
  int id = 0;
  std::vector<Weight> weights;
  std::vector<Operand> inputs;
  bool use_sparse = false;
  Category category = Category::kArithmetic;
  std::optional<DType> op_dtype;  // nullopt is Unknown
  DlOperator op;
  IntermediateResult output;
};

struct InputSpec {
  std::size_t features = 0;
  DType dtype = DType::Float32;
};

struct Ecg {
  InputSpec input;
  std::vector<EcgNode> nodes;
  int output = 0;

  const EcgNode& node(int id) const;
  EcgNode& node(int id);
  bool has_node(int id) const;
  int next_id() const;
  std::vector<int> consumers(int id) const;
};

struct OperatorRep {
  DlOperator op;
  std::vector<Weight> weights;
  std::vector<Operand> inputs;  // Source::kNode indexes earlier reps
};

/// One node per rep, ids equal to rep positions; the last rep is the output.
Ecg build_ecg(const std::vector<OperatorRep>& reps, const InputSpec& input);

/// Kahn's algorithm, smallest ready id first.
std::vector<int> topo_order(const Ecg& g);

/// Compute dtype the kernel runs at when op_dtype is Unknown: the join of the inputs raised to
/// what the kernel can execute.
DType kernel_floor(const DlOperator& op, DType joined);

/// Dtype of an operand as currently recorded in the graph.
DType operand_dtype(const Ecg& g, const EcgNode& n, const Operand& o);
SymShape operand_shape(const Ecg& g, const EcgNode& n, const Operand& o);

/// Join over the participating operands; nullopt when there are none.
std::optional<DType> input_join(const Ecg& g, const EcgNode& n);

/// op_dtype if set, otherwise kernel_floor of the input join.
DType compute_dtype(const Ecg& g, const EcgNode& n);

/// Output dtype and shape for the node's current inputs. Throws kShapeInferenceFailure.
IntermediateResult infer_output(const Ecg& g, const EcgNode& n);

/// Recomputes every node's output record in topological order.
void refresh_outputs(Ecg& g);

/// Every violated invariant, as readable text; empty means valid.
std::vector<std::string> validate_ecg(const Ecg& g);

/// Deterministic text form, one node per line in topological order.
std::string dump_ecg(const Ecg& g);

struct HardwareProfile {
  std::string name;
  DType preferred_int_dtype = DType::Int32;
  double sparse_threshold = 0.0;
  std::string notes;
};

/// `cpu-avx2` or `plain`.
std::optional<HardwareProfile> builtin_profile(std::string_view name);

/// Built-in name or path to a JSON profile file.
HardwareProfile load_profile(const std::string& name_or_path);
HardwareProfile parse_profile(std::string_view json_text);

}  // namespace mltc
