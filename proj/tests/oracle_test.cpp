// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "mltc/compiler.hpp"
#include "mltc/error.hpp"
#include "mltc/oracle.hpp"

namespace mltc {
namespace {

using testsupport::Rng;

std::string fixture(const std::string& name) { return std::string(MLTC_FIXTURE_DIR) + "/" + name; }

Tensor row(std::vector<float> v) {
  const std::size_t n = v.size();
  return Tensor::from_floats({1, n}, std::move(v));
}

TEST(Oracle, TreeFixtureFollowsSplits) {
  const TrainedModel m = load_model_file(fixture("tree_a.json"));
  std::vector<float> x(8, 0.0f);
  x[0] = 0.3f;  // equal to the root threshold: goes left
  x[1] = 5.0f;
  EXPECT_EQ(oracle_predict(m, row(x)).values, (std::vector<float>{0}));
  x[0] = std::nextafter(0.3f, 1.0f);
  EXPECT_EQ(oracle_predict(m, row(x)).values, (std::vector<float>{2}));
  x[1] = -1.7f;
  EXPECT_EQ(oracle_predict(m, row(x)).values, (std::vector<float>{1}));

  const TrainedModel b = load_model_file(fixture("tree_b.json"));
  std::vector<float> y(8, 0.0f);
  y[2] = 1.1f;
  y[3] = 0.0f;
  EXPECT_EQ(oracle_predict(b, row(y)).values, (std::vector<float>{4.0f}));
  y[3] = -0.35f;
  EXPECT_EQ(oracle_predict(b, row(y)).values, (std::vector<float>{-2.5f}));
  y[2] = 1.2f;
  EXPECT_EQ(oracle_predict(b, row(y)).values, (std::vector<float>{10.75f}));
}

TEST(Oracle, XorTruthTable) {
  const TrainedModel m = load_model_file(fixture("xor_tree.json"));
  const Tensor x = Tensor::from_floats({4, 2}, {0, 0, 0, 1, 1, 0, 1, 1});
  const OraclePrediction p = oracle_predict(m, x);
  EXPECT_EQ(p.rows, 4u);
  EXPECT_EQ(p.cols, 1u);
  EXPECT_EQ(p.values, (std::vector<float>{0, 1, 1, 0}));
  const Compiled c = compile_model(m, *builtin_profile("cpu-avx2"), PassSet::all());
  EXPECT_EQ(predict(c, x).to_doubles(), (std::vector<double>{0, 1, 1, 0}));
}

TEST(Oracle, IdentityLogistic) {
  TrainedModel m;
  m.kind = ModelKind::kLogisticRegression;
  m.n_features = 3;
  m.body = Linear{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {0, 0, 0}, LinearTask::kMultiClassifier, Link::kSoftmax,
                  {10, 20, 30}};
  const Tensor x = Tensor::from_floats({4, 3}, {3, 1, 2, -1, 5, 0, 0, 0, 0.5f, 7, 7, 1});
  EXPECT_EQ(oracle_predict(m, x).values, (std::vector<float>{10, 20, 30, 10}));
}

TEST(Oracle, BinarizerMatchesDefinition) {
  Rng rng(12);
  for (int i = 0; i < 50; ++i) {
    TrainedModel m;
    m.kind = ModelKind::kBinarizer;
    m.n_features = 1 + rng() % 6;
    const float t = testsupport::uniform(rng, -5, 5);
    m.body = Scaler{Binarizer{t}};
    std::vector<float> v(40 * m.n_features);
    for (float& e : v) e = (rng() % 4 == 0) ? t : testsupport::uniform(rng, -8, 8);
    const Tensor x = Tensor::from_floats({40, m.n_features}, v);
    const OraclePrediction p = oracle_predict(m, x);
    ASSERT_EQ(p.values.size(), v.size());
    for (std::size_t k = 0; k < v.size(); ++k) EXPECT_EQ(p.values[k], v[k] > t ? 1.0f : 0.0f);
  }
}

TEST(Oracle, FeatureMismatch) {
  const TrainedModel m = load_model_file(fixture("tree_a.json"));
  try {
    oracle_predict(m, Tensor::zeros({2, 3}, DType::Float32));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFeatureMismatch);
  }
  EXPECT_THROW(oracle_predict(m, Tensor::zeros({2, 8}, DType::Int32)), Error);
}

TEST(Oracle, ForestAveragesProbabilities) {
  const TrainedModel m = load_model_file(fixture("forest2.json"));
  const auto& f = std::get<Forest>(m.body);
  ASSERT_EQ(f.trees.size(), 2u);
  Rng rng(2);
  const Tensor x = random_inputs(rng, 200, m.n_features, -3, 3);
  const OraclePrediction p = oracle_predict(m, x);
  const Compiled c = compile_model(m, *builtin_profile("plain"), PassSet::none());
  EXPECT_TRUE(compare_to_oracle(predict(c, x), p, true).passed());
}

}  // namespace
}  // namespace mltc
