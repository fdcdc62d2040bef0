// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "mltc/model.hpp"
#include "mltc/tensor.hpp"

namespace mltc {

/// Row-major predictions: one class label per row for classifiers, otherwise the output vector.
struct OraclePrediction {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> values;
};

/// Scalar evaluation of the model straight from its parameters. `x` is a (batch, n_features)
/// Float32 tensor; anything else is kFeatureMismatch.
OraclePrediction oracle_predict(const TrainedModel& model, const Tensor& x);

}  // namespace mltc
