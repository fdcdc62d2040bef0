// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <array>
#include <fstream>
#include <functional>

#include "generators.hpp"
#include "mltc/converter.hpp"
#include "mltc/ecg.hpp"
#include "mltc/error.hpp"
#include "mltc/kernels.hpp"

namespace mltc {
namespace {

using testsupport::Rng;

std::string fixture(const std::string& name) { return std::string(MLTC_FIXTURE_DIR) + "/" + name; }

Ecg graph_of(const TrainedModel& m) { return build_ecg(convert_model(m), {m.n_features, DType::Float32}); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kUsage;
}

OperatorRep unary(DlOperator op, Operand in) { return OperatorRep{std::move(op), {}, {in}}; }

TEST(BuildEcg, TreeFixtureA) {
  const Ecg g = graph_of(load_model_file(fixture("tree_a.json")));
  ASSERT_EQ(g.nodes.size(), 5u);
  const char* kernels[] = {"matmul", "greater", "matmul", "argmax<axis=1>", "gather_rows"};
  for (int i = 0; i < 5; ++i) {
    const EcgNode& n = g.node(i);
    EXPECT_EQ(kernel_name(n.op, n.use_sparse), kernels[i]);
    EXPECT_FALSE(n.use_sparse);
    EXPECT_FALSE(n.op_dtype.has_value());
    for (const Weight& w : n.weights) EXPECT_EQ(w.actual_dtype, w.smallest_dtype);
  }
  EXPECT_EQ(g.node(0).weights[0].smallest_dtype, DType::Bool);
  EXPECT_EQ(g.node(1).weights[0].smallest_dtype, DType::Float32);
  EXPECT_EQ(g.node(2).weights[0].smallest_dtype, DType::Bool);
  EXPECT_EQ(g.node(0).category, Category::kArithmetic);
  EXPECT_EQ(g.node(1).category, Category::kComparison);
  EXPECT_EQ(g.node(3).category, Category::kIndices);
  EXPECT_EQ(g.output, 4);
  EXPECT_FALSE(g.node(1).output.sparsity.has_value());
  EXPECT_TRUE(validate_ecg(g).empty());
}

TEST(BuildEcg, Errors) {
  EXPECT_EQ(code_of([] { build_ecg({}, {2}); }), ErrorCode::kDanglingReference);
  EXPECT_EQ(code_of([] { build_ecg({unary(DlOperator::monotonic(MonotonicOp::kExp), Operand::node(3))}, {2}); }),
            ErrorCode::kDanglingReference);
  EXPECT_EQ(code_of([] {
              build_ecg({unary(DlOperator::monotonic(MonotonicOp::kExp), Operand::node(1)),
                         unary(DlOperator::monotonic(MonotonicOp::kExp), Operand::node(0))},
                        {2});
            }),
            ErrorCode::kCyclicGraph);
}

TEST(BuildEcg, W1SparsityForNinetyFeatures) {
  Rng rng(90);
  const TreeNodes nodes = testsupport::random_tree(rng, {90, 3, 7, 1.0}, [](Rng&) { return std::vector<float>{1}; });
  TrainedModel m;
  m.kind = ModelKind::kDecisionTreeRegressor;
  m.n_features = 90;
  m.body = DecisionTree{nodes, {}};
  const Ecg g = graph_of(m);
  EXPECT_DOUBLE_EQ(g.node(0).weights[0].sparsity, 1.0 / 90.0);
  EXPECT_NEAR(g.node(0).weights[0].sparsity, 0.0111, 1e-4);
}

TEST(TopoOrder, ChainDiamondAndShuffledIds) {
  const auto e = [](Operand in) { return unary(DlOperator::monotonic(MonotonicOp::kExp), in); };
  const Ecg chain = build_ecg({e(Operand::graph_input()), e(Operand::node(0)), e(Operand::node(1))}, {2});
  EXPECT_EQ(topo_order(chain), (std::vector<int>{0, 1, 2}));

  std::vector<OperatorRep> diamond = {e(Operand::graph_input()), e(Operand::node(0)), e(Operand::node(0)),
                                      OperatorRep{DlOperator::binary_op(BinaryOp::kAdd), {}, {Operand::node(2), Operand::node(1)}}};
  const Ecg d = build_ecg(diamond, {2});
  EXPECT_EQ(topo_order(d), (std::vector<int>{0, 1, 2, 3}));

  // Same diamond with ids permuted and nodes stored out of order.
  Ecg s = d;
  const int remap[] = {7, 3, 9, 1};
  for (EcgNode& n : s.nodes) {
    n.id = remap[n.id];
    for (Operand& o : n.inputs)
      if (o.source == Operand::Source::kNode) o.index = remap[o.index];
  }
  s.output = 1;
  std::reverse(s.nodes.begin(), s.nodes.end());
  const auto first = topo_order(s);
  EXPECT_EQ(first, (std::vector<int>{7, 3, 9, 1}));
  for (int i = 0; i < 10; ++i) EXPECT_EQ(topo_order(s), first);
  EXPECT_TRUE(validate_ecg(s).empty());
}

TEST(ValidateEcg, FixturesAreValid) {
  for (const char* f : {"tree_a.json", "tree_b.json", "xor_tree.json", "logistic3.json", "forest2.json"}) {
    const auto v = validate_ecg(graph_of(load_model_file(fixture(f))));
    EXPECT_TRUE(v.empty()) << f << ": " << v.front();
  }
}

TEST(ValidateEcg, ComparisonClaimingFloatOutput) {
  Ecg g = graph_of(load_model_file(fixture("tree_a.json")));
  g.node(1).output.dtype = DType::Float32;
  const auto v = validate_ecg(g);
  ASSERT_FALSE(v.empty());
  EXPECT_TRUE(std::any_of(v.begin(), v.end(), [](const std::string& s) {
    return s.find("dtype-lowering breached") != std::string::npos;
  }));
}

TEST(ValidateEcg, CatchesBrokenInvariants) {
  const Ecg base = graph_of(load_model_file(fixture("tree_a.json")));
  auto broken = [&](const std::function<void(Ecg&)>& f) {
    Ecg g = base;
    f(g);
    return !validate_ecg(g).empty();
  };
  EXPECT_TRUE(broken([](Ecg& g) { g.node(0).weights[0].sparsity = 0.5; }));
  EXPECT_TRUE(broken([](Ecg& g) { g.node(0).weights[0].actual_dtype = DType::Float32; }));
  EXPECT_TRUE(broken([](Ecg& g) { g.node(1).category = Category::kArithmetic; }));
  EXPECT_TRUE(broken([](Ecg& g) { g.node(2).use_sparse = true; }));
  EXPECT_TRUE(broken([](Ecg& g) { g.node(2).output.shape = {kBatch, 4}; }));
  EXPECT_TRUE(broken([](Ecg& g) { g.output = 3; }));
  EXPECT_TRUE(broken([](Ecg& g) { g.node(2).op_dtype = DType::Bool; g.node(1).output.dtype = DType::Int8; }));
}

TEST(Weights, SparsityRecomputesExactly) {
  Rng rng(21);
  for (ModelKind kind : testsupport::kEveryKind) {
    const Ecg g = graph_of(testsupport::random_model(rng, kind));
    for (const EcgNode& n : g.nodes)
      for (const Weight& w : n.weights) EXPECT_EQ(weight_sparsity(w.tensor), w.sparsity);
  }
}

std::vector<DType> lower_neighbours(DType d) {
  std::vector<DType> out;
  for (DType a : kAllDTypes) {
    if (!dtype_lt(a, d)) continue;
    bool cover = true;
    for (DType b : kAllDTypes)
      if (dtype_lt(a, b) && dtype_lt(b, d)) cover = false;
    if (cover) out.push_back(a);
  }
  return out;
}

TEST(Weights, SmallestDtypeIsMinimal) {
  Rng rng(33);
  std::uniform_int_distribution<int> family(0, 6);
  std::array<int, 7> seen{};
  for (int i = 0; i < 3000; ++i) {
    const std::size_t n = 1 + rng() % 8;
    std::vector<float> v(n);
    const int f = family(rng);
    for (float& x : v) {
      switch (f) {
        case 0: x = static_cast<float>(rng() % 2); break;
        case 1: x = static_cast<float>(static_cast<int>(rng() % 16) - 8); break;
        case 2: x = static_cast<float>(static_cast<int>(rng() % 256) - 128); break;
        case 3: x = static_cast<float>(static_cast<int>(rng() % 65536) - 32768); break;
        case 4: x = static_cast<float>(static_cast<int>(rng() % 2000000) - 1000000); break;
        case 5: x = static_cast<float>(static_cast<int>(rng() % 512) - 256) / 8.0f; break;
        default: x = testsupport::uniform(rng, -100, 100); break;
      }
    }
    const Tensor t = Tensor::from_floats({n}, v);
    const DType s = smallest_dtype_of(t);
    ++seen[static_cast<std::size_t>(s)];
    EXPECT_NO_THROW(convert_exact(t, s));
    for (DType lower : lower_neighbours(s)) {
      EXPECT_THROW(convert_exact(t, lower), Error) << dtype_name(s) << " -> " << dtype_name(lower);
    }
  }
  for (DType d : kAllDTypes) EXPECT_GT(seen[static_cast<std::size_t>(d)], 0) << dtype_name(d);
}

TEST(Profile, BuiltinsAndFiles) {
  const auto avx = builtin_profile("cpu-avx2");
  ASSERT_TRUE(avx);
  EXPECT_EQ(avx->preferred_int_dtype, DType::Int8);
  EXPECT_DOUBLE_EQ(avx->sparse_threshold, 0.3);
  EXPECT_EQ(builtin_profile("plain")->preferred_int_dtype, DType::Int32);
  EXPECT_DOUBLE_EQ(builtin_profile("plain")->sparse_threshold, 0.0);
  EXPECT_FALSE(builtin_profile("gpu"));

  const HardwareProfile p = parse_profile(R"({"name":"edge","preferred_int_dtype":"int16","sparse_threshold":0.5})");
  EXPECT_EQ(p.name, "edge");
  EXPECT_EQ(p.preferred_int_dtype, DType::Int16);
  const std::string path = testing::TempDir() + "/mltc_profile.json";
  std::ofstream(path) << R"({"name":"file","preferred_int_dtype":"int32","sparse_threshold":0.1})";
  EXPECT_EQ(load_profile(path).name, "file");
  EXPECT_EQ(code_of([] { parse_profile(R"({"name":"x","preferred_int_dtype":"int8","sparse_threshold":1.5})"); }),
            ErrorCode::kValidationError);
  EXPECT_EQ(code_of([] { parse_profile(R"({"name":"x","preferred_int_dtype":"int4","sparse_threshold":0})"); }),
            ErrorCode::kValidationError);
  EXPECT_EQ(code_of([] { parse_profile("{nope"); }), ErrorCode::kSchemaError);
  EXPECT_EQ(code_of([] { load_profile("/nonexistent/profile.json"); }), ErrorCode::kIo);
}

TEST(Dump, DeterministicAndShowsWeights) {
  const auto m = load_model_file(fixture("tree_a.json"));
  const std::string a = dump_ecg(graph_of(m));
  EXPECT_EQ(a, dump_ecg(graph_of(m)));
  EXPECT_NE(a.find("0: matmul[?, dense] (%x, W1) {W1: bool/0.1250}"), std::string::npos) << a;
}

}  // namespace
}  // namespace mltc
