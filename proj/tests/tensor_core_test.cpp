// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mltc/kernels.hpp"

namespace mltc {
namespace {

Tensor floats(Shape shape, std::vector<float> v) { return Tensor::from_floats(std::move(shape), std::move(v)); }

Tensor values(Shape shape, DType dtype, std::vector<double> v) {
  return Tensor::from_values(std::move(shape), dtype, v);
}

Tensor random_tensor(std::mt19937& rng, Shape shape, DType dtype, double density = 1.0) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> small(-9, 9);
  std::uniform_real_distribution<float> real(-10.0f, 10.0f);
  std::vector<double> v(shape_numel(shape));
  for (auto& x : v) {
    if (coin(rng) >= density) continue;
    if (dtype == DType::Bool) x = 1.0;
    else if (dtype == DType::Float32) x = real(rng);
    else x = small(rng);
  }
  return Tensor::from_values(std::move(shape), dtype, v);
}

// Reference product by scalar triple loop, in double.
std::vector<double> naive_matmul(const Tensor& a, const Tensor& b) {
  const auto av = a.to_doubles(), bv = b.to_doubles();
  const std::size_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
  std::vector<double> out(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t p = 0; p < k; ++p) out[i * n + j] += av[i * k + p] * bv[p * n + j];
  return out;
}

TEST(DTypeLattice, JoinExamples) {
  EXPECT_EQ(dtype_join(DType::Bool, DType::Float32), DType::Float32);
  EXPECT_EQ(dtype_join(DType::Int8, DType::Int8), DType::Int8);
  EXPECT_EQ(dtype_join(DType::Int32, DType::Float16), DType::Float32);
  EXPECT_EQ(dtype_join(DType::Int16, DType::Float16), DType::Float16);
}

// Upper bounds enumerated from the Hasse diagram, independent of dtype_join.
TEST(DTypeLattice, JoinIsLeastUpperBoundOverAllPairs) {
  for (DType a : kAllDTypes) {
    for (DType b : kAllDTypes) {
      std::vector<DType> upper;
      for (DType u : kAllDTypes)
        if (dtype_leq(a, u) && dtype_leq(b, u)) upper.push_back(u);
      ASSERT_FALSE(upper.empty());
      std::vector<DType> least;
      for (DType u : upper) {
        bool below_all = true;
        for (DType w : upper) below_all = below_all && dtype_leq(u, w);
        if (below_all) least.push_back(u);
      }
      ASSERT_EQ(least.size(), 1u);
      EXPECT_EQ(dtype_join(a, b), least.front());
    }
  }
}

TEST(DTypeLattice, Laws) {
  for (DType a : kAllDTypes) {
    EXPECT_EQ(dtype_join(a, a), a);
    EXPECT_EQ(dtype_join(DType::Bool, a), a);
    EXPECT_EQ(dtype_join(DType::Float32, a), DType::Float32);
    for (DType b : kAllDTypes) {
      EXPECT_EQ(dtype_join(a, b), dtype_join(b, a));
      for (DType c : kAllDTypes) {
        EXPECT_EQ(dtype_join(dtype_join(a, b), c), dtype_join(a, dtype_join(b, c)));
      }
    }
  }
  EXPECT_FALSE(dtype_leq(DType::Int32, DType::Float16));
  EXPECT_FALSE(dtype_leq(DType::Float16, DType::Int32));
}

TEST(DTypeLattice, HalfRepresentability) {
  EXPECT_TRUE(representable_in_half(0.5));
  EXPECT_TRUE(representable_in_half(2048.0));
  EXPECT_FALSE(representable_in_half(2049.0));
  EXPECT_TRUE(representable_in_half(65504.0));
  EXPECT_FALSE(representable_in_half(65520.0));
  EXPECT_FALSE(representable_in_half(0.1));
  EXPECT_TRUE(representable_in_half(std::ldexp(1.0, -24)));
  EXPECT_FALSE(representable_in_half(std::ldexp(1.0, -25)));
}

TEST(TensorInvariants, RejectsOutOfRangeValues) {
  EXPECT_THROW(values({2}, DType::Bool, {0, 2}), Error);
  EXPECT_THROW(values({1}, DType::Int8, {200}), Error);
  EXPECT_THROW(values({1}, DType::Int4, {8}), Error);
  EXPECT_THROW(Tensor::dense({3}, DType::Float32, Buffer(std::vector<float>{1.0f})), Error);
  EXPECT_THROW(Tensor::csr(2, 2, DType::Float32, {0, 1}, {0}, Buffer(std::vector<float>{1.0f})), Error);
  EXPECT_THROW(Tensor::csr(1, 2, DType::Float32, {0, 1}, {2}, Buffer(std::vector<float>{1.0f})), Error);
}

TEST(Cast, Examples) {
  const Tensor b = values({1, 2}, DType::Bool, {1, 0});
  EXPECT_EQ(cast(b, DType::Int8).to_doubles(), (std::vector<double>{1, 0}));
  EXPECT_EQ(cast(b, DType::Int8).dtype(), DType::Int8);
  EXPECT_EQ(cast(values({1, 1}, DType::Int8, {5}), DType::Float32).to_doubles(), (std::vector<double>{5.0}));
  try {
    cast(floats({1}, {1.5f}), DType::Int8);
    FAIL() << "narrowing cast accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNarrowingCast);
  }
  EXPECT_THROW(cast(values({1}, DType::Int32, {3}), DType::Float16), Error);
}

TEST(Cast, WideningComposes) {
  std::mt19937 rng(7);
  for (DType src : {DType::Bool, DType::Int8, DType::Int16}) {
    const Tensor t = random_tensor(rng, {3, 4}, src);
    for (DType d1 : kAllDTypes) {
      if (!dtype_leq(src, d1)) continue;
      for (DType d2 : kAllDTypes) {
        if (!dtype_leq(d1, d2)) continue;
        EXPECT_TRUE(bitwise_equal(cast(cast(t, d1), d2), cast(t, d2)));
      }
    }
  }
}

TEST(Cast, CsrStaysCsr) {
  const Tensor c = to_csr(values({2, 2}, DType::Bool, {1, 0, 0, 1}));
  const Tensor f = cast(c, DType::Float32);
  EXPECT_TRUE(f.is_csr());
  EXPECT_EQ(f.to_doubles(), (std::vector<double>{1, 0, 0, 1}));
}

TEST(Matmul, IdentityLeavesOperandUnchanged) {
  const Tensor eye = floats({2, 2}, {1, 0, 0, 1});
  const Tensor m = floats({2, 2}, {1.5f, -2.0f, 3.25f, 4.0f});
  EXPECT_TRUE(bitwise_equal(matmul(eye, m, DType::Float32), m));
}

TEST(Matmul, BoolProductAccumulatesInInt32) {
  const Tensor a = values({2, 2}, DType::Bool, {1, 0, 1, 1});
  const Tensor b = values({2, 2}, DType::Bool, {0, 1, 1, 1});
  const Tensor r = matmul(a, b, DType::Int32);
  EXPECT_EQ(r.dtype(), DType::Int32);
  EXPECT_EQ(r.to_doubles(), (std::vector<double>{0, 1, 1, 2}));
  EXPECT_EQ(r.to_doubles(), naive_matmul(a, b));
}

TEST(Matmul, FeatureSelectionShape) {
  const Tensor x = Tensor::zeros({1, 90}, DType::Float32);
  const Tensor w1 = Tensor::zeros({90, 7}, DType::Float32);
  EXPECT_EQ(matmul(x, w1, DType::Float32).shape(), (Shape{1, 7}));
}

TEST(Matmul, Errors) {
  try {
    matmul(floats({1, 2}, {1, 2}), floats({3, 1}, {1, 2, 3}), DType::Float32);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
  // 200 * 1 * 1 does not fit an int8 accumulator.
  const Tensor ones_a = values({1, 200}, DType::Int8, std::vector<double>(200, 1.0));
  const Tensor ones_b = values({200, 1}, DType::Int8, std::vector<double>(200, 1.0));
  try {
    matmul(ones_a, ones_b, DType::Int8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAccumulatorOverflowRisk);
  }
  EXPECT_EQ(matmul(ones_a, ones_b, DType::Int16).to_doubles(), (std::vector<double>{200}));
  EXPECT_THROW(matmul(ones_a, floats({200, 1}, std::vector<float>(200, 1.0f)), DType::Float32), Error);
}

TEST(Matmul, BoolCountProperty) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Tensor a = random_tensor(rng, {4, 9}, DType::Bool, 0.5);
    const Tensor b = random_tensor(rng, {9, 5}, DType::Bool, 0.5);
    const auto r = matmul(a, b, DType::Int32).to_doubles();
    const auto av = a.to_doubles(), bv = b.to_doubles();
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 5; ++j) {
        int both = 0;
        for (std::size_t k = 0; k < 9; ++k) both += (av[i * 9 + k] == 1.0 && bv[k * 5 + j] == 1.0);
        EXPECT_EQ(r[i * 5 + j], both);
      }
  }
}

TEST(SparseMatmul, AllZeroCsrGivesZeros) {
  const Tensor a = floats({2, 3}, {1, 2, 3, 4, 5, 6});
  const Tensor b = to_csr(Tensor::zeros({3, 2}, DType::Float32));
  EXPECT_EQ(b.csr().col_indices.size(), 0u);
  EXPECT_TRUE(bitwise_equal(sparse_dense_matmul(a, b, DType::Float32), Tensor::zeros({2, 2}, DType::Float32)));
}

TEST(SparseMatmul, BitIdenticalToDenseAcrossDtypes) {
  std::mt19937 rng(3);
  for (DType dtype : {DType::Float32, DType::Int8, DType::Int16, DType::Bool}) {
    for (int trial = 0; trial < 40; ++trial) {
      const Tensor a = random_tensor(rng, {8, 8}, dtype);
      const Tensor b = random_tensor(rng, {8, 8}, dtype, 0.1);
      const DType acc = is_float(dtype) ? DType::Float32 : DType::Int32;
      EXPECT_TRUE(bitwise_equal(sparse_dense_matmul(a, to_csr(b), acc), matmul(a, b, acc)));
    }
  }
}

TEST(EwBinary, Examples) {
  const Tensor g = ew_binary(BinaryOp::kGreater, floats({1, 2}, {1, 3}), floats({1, 2}, {2, 2}));
  EXPECT_EQ(g.dtype(), DType::Bool);
  EXPECT_EQ(g.to_doubles(), (std::vector<double>{0, 1}));

  const Tensor x = floats({2, 2}, {1.5f, -2, 0, 7});
  EXPECT_TRUE(bitwise_equal(ew_binary(BinaryOp::kAdd, x, floats({1}, {0})), x));

  // Equal-to-threshold goes left: strict comparison yields 0.
  const Tensor row = ew_binary(BinaryOp::kGreater, floats({1, 3}, {5.1f, 0.2f, 7.7f}),
                               floats({3}, {5.0f, 1.0f, 7.7f}));
  EXPECT_EQ(row.to_doubles(), (std::vector<double>{1, 0, 0}));
}

TEST(EwBinary, ErrorsAndDivision) {
  try {
    ew_binary(BinaryOp::kAdd, floats({2, 3}, std::vector<float>(6)), floats({2}, {1, 2}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBroadcastError);
  }
  const Tensor inf = ew_binary(BinaryOp::kDiv, floats({1}, {1}), floats({1}, {0}));
  EXPECT_TRUE(std::isinf(inf.to_doubles()[0]));
  try {
    ew_binary(BinaryOp::kDiv, values({1}, DType::Int32, {4}), values({1}, DType::Int32, {0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDivisionByZero);
  }
  EXPECT_THROW(ew_binary(BinaryOp::kAdd, floats({1}, {1}), values({1}, DType::Int8, {1})), Error);
}

// Materialises the broadcast by index arithmetic and compares element-wise.
TEST(EwBinary, BroadcastMatchesNaiveLoop) {
  std::mt19937 rng(5);
  const std::vector<std::pair<Shape, Shape>> cases = {
      {{3, 4}, {4}}, {{3, 4}, {3, 1}}, {{3, 1}, {1, 4}}, {{2, 3, 4}, {3, 1}}, {{1}, {2, 2}}};
  for (const auto& [sa, sb] : cases) {
    const Tensor a = random_tensor(rng, sa, DType::Float32);
    const Tensor b = random_tensor(rng, sb, DType::Float32);
    for (BinaryOp op : {BinaryOp::kSub, BinaryOp::kMul, BinaryOp::kGreater}) {
      const Tensor r = ew_binary(op, a, b);
      const Shape& so = r.shape();
      const auto av = a.to_doubles(), bv = b.to_doubles(), rv = r.to_doubles();
      for (std::size_t flat = 0; flat < rv.size(); ++flat) {
        std::vector<std::size_t> idx(so.size());
        std::size_t rem = flat;
        for (std::size_t d = so.size(); d-- > 0;) {
          idx[d] = rem % so[d];
          rem /= so[d];
        }
        auto offset = [&](const Shape& s) {
          std::size_t off = 0;
          for (std::size_t d = 0; d < s.size(); ++d) {
            const std::size_t i = idx[d + so.size() - s.size()];
            off = off * s[d] + (s[d] == 1 ? 0 : i);
          }
          return off;
        };
        const float x = static_cast<float>(av[offset(sa)]), y = static_cast<float>(bv[offset(sb)]);
        const double expect = op == BinaryOp::kSub ? x - y : op == BinaryOp::kMul ? x * y : (x > y ? 1.0 : 0.0);
        EXPECT_EQ(rv[flat], static_cast<double>(static_cast<float>(expect)));
      }
    }
  }
}

TEST(Reduce, Examples) {
  EXPECT_EQ(reduce(ReduceOp::kSum, floats({1}, {4.5f}), Axis{0}).to_doubles(), (std::vector<double>{4.5}));
  const Tensor s = reduce(ReduceOp::kSum, values({3}, DType::Int8, {1, 2, 3}), Axis{0});
  EXPECT_EQ(s.dtype(), DType::Int32);
  EXPECT_EQ(s.to_doubles(), (std::vector<double>{6}));

  const Tensor per_tree = floats({2, 2}, {0.2f, 0.8f, 0.6f, 0.4f});
  const Tensor mean = reduce(ReduceOp::kMean, per_tree, Axis{0});
  EXPECT_EQ(mean.to_doubles()[0], static_cast<double>((0.0f + 0.2f + 0.6f) / 2.0f));
  EXPECT_EQ(mean.to_doubles()[1], static_cast<double>((0.0f + 0.8f + 0.4f) / 2.0f));
  EXPECT_NEAR(mean.to_doubles()[0], 0.4, 1e-7);

  EXPECT_EQ(reduce(ReduceOp::kMax, per_tree, Axis{1}).to_doubles()[1], static_cast<double>(0.6f));
  try {
    reduce(ReduceOp::kSum, per_tree, Axis{2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidAxis);
  }
  EXPECT_THROW(reduce(ReduceOp::kMean, values({2}, DType::Int8, {1, 2}), Axis{0}), Error);
}

TEST(Argmax, FirstMaximumWins) {
  EXPECT_EQ(argmax(floats({4}, {1, 2, 1, 2}), Axis{0}).to_doubles(), (std::vector<double>{1}));
  EXPECT_EQ(argmax(floats({3}, {0, 0, 0}), Axis{0}).to_doubles(), (std::vector<double>{0}));
  try {
    argmax(Tensor::zeros({2, 0}, DType::Float32), Axis{1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyAxis);
  }
}

TEST(Argmax, TieBreakPropertyOnRandomTensors) {
  std::mt19937 rng(17);
  std::uniform_int_distribution<int> d(0, 3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(5 * 6);
    for (auto& x : v) x = d(rng);
    const Tensor t = values({5, 6}, DType::Int8, v);
    const auto r = argmax(t, Axis{1}).to_doubles();
    for (std::size_t i = 0; i < 5; ++i) {
      std::size_t best = 0;
      for (std::size_t k = 0; k < 6; ++k)
        if (v[i * 6 + k] > v[i * 6 + best]) best = k;
      EXPECT_EQ(r[i], static_cast<double>(best));
    }
  }
}

TEST(GatherRows, Examples) {
  const Tensor table = floats({2, 1}, {7, 9});
  EXPECT_EQ(gather_rows(table, values({2}, DType::Int32, {0, 0})).to_doubles(), (std::vector<double>{7, 7}));
  const Tensor t3 = floats({3, 2}, {1, 2, 3, 4, 5, 6});
  EXPECT_TRUE(bitwise_equal(gather_rows(t3, values({3}, DType::Int32, {0, 1, 2})), t3));
  try {
    gather_rows(table, values({1}, DType::Int32, {2}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIndexOutOfBounds);
  }
}

TEST(Monotonic, Examples) {
  EXPECT_EQ(monotonic_apply(MonotonicOp::kSigmoid, floats({1}, {0})).to_doubles()[0], 0.5);
  const auto sm = monotonic_apply(MonotonicOp::kSoftmax, floats({1, 3}, {2.5f, 2.5f, 2.5f}), Axis{1}).to_doubles();
  for (double p : sm) EXPECT_NEAR(p, 1.0 / 3.0, 1e-7);
}

TEST(Monotonic, ArgmaxInvariance) {
  std::mt19937 rng(23);
  std::uniform_real_distribution<float> u(-4.0f, 4.0f);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<float> z(4 * 5);
    for (auto& x : z) x = u(rng);
    const Tensor t = floats({4, 5}, z);
    const auto base = argmax(t, Axis{1}).to_doubles();
    const Tensor sm = monotonic_apply(MonotonicOp::kSoftmax, t, Axis{1});
    EXPECT_EQ(argmax(sm, Axis{1}).to_doubles(), base);
    EXPECT_EQ(argmax(monotonic_apply(MonotonicOp::kSigmoid, t), Axis{1}).to_doubles(), base);
    const auto p = sm.to_doubles();
    for (std::size_t r = 0; r < 4; ++r) {
      double s = 0;
      for (std::size_t c = 0; c < 5; ++c) s += p[r * 5 + c];
      EXPECT_NEAR(s, 1.0, 1e-6);
    }
  }
}

TEST(RowNorm, Examples) {
  EXPECT_EQ(row_norm(floats({1, 2}, {3, 4}), NormKind::kL2).to_doubles(), (std::vector<double>{5}));
  EXPECT_EQ(row_norm(floats({1, 2}, {-7, 2}), NormKind::kMax).to_doubles(), (std::vector<double>{7}));
  EXPECT_EQ(row_norm(floats({1, 3}, {0, 0, 0}), NormKind::kL1).to_doubles(), (std::vector<double>{1}));
  EXPECT_EQ(row_norm(floats({2, 2}, {3, 4, 0, 0}), NormKind::kL2).shape(), (Shape{2, 1}));
}

TEST(Stack, AddsLeadingAxis) {
  const Tensor a = floats({2, 1}, {1, 2}), b = floats({2, 1}, {3, 4});
  const std::vector<Tensor> parts{a, b};
  const Tensor s = stack(parts);
  EXPECT_EQ(s.shape(), (Shape{2, 2, 1}));
  EXPECT_EQ(s.to_doubles(), (std::vector<double>{1, 2, 3, 4}));
  EXPECT_EQ(broadcast_rows(floats({1, 2}, {5, 6}), 3).to_doubles(), (std::vector<double>{5, 6, 5, 6, 5, 6}));
}

TEST(Csr, RoundTripKeepsBits) {
  const Tensor t = floats({2, 3}, {0.0f, -0.0f, 1.5f, 0.0f, 2.0f, 0.0f});
  const Tensor c = to_csr(t);
  EXPECT_TRUE(c.is_csr());
  EXPECT_TRUE(bitwise_equal(densify(c), t));
  EXPECT_EQ(c.count_nonzero(), 2u);
}

}  // namespace
}  // namespace mltc
