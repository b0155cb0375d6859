// SPDX-License-Identifier: Apache-2.0
#include "framing/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "framing/error.hpp"

namespace framing {

std::vector<double> affine(std::span<const double> x, const Tensor2& weight,
                           std::span<const double> bias) {
  if (x.size() != weight.cols() || bias.size() != weight.rows()) {
    throw ShapeError("affine: W is " + weight.shape_string() + ", x has " +
                     std::to_string(x.size()) + " entries, b has " + std::to_string(bias.size()));
  }
  std::vector<double> out(bias.begin(), bias.end());
  for (std::size_t j = 0; j < weight.rows(); ++j) {
    auto w = weight.row(j);
    for (std::size_t k = 0; k < x.size(); ++k) out[j] += w[k] * x[k];
  }
  return out;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::vector<double> sigmoid(std::span<const double> x) {
  std::vector<double> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(), [](double v) { return sigmoid(v); });
  return out;
}

std::vector<double> tanh(std::span<const double> x) {
  std::vector<double> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(), [](double v) { return std::tanh(v); });
  return out;
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) throw ShapeError("softmax: empty input");
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - top);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

double cross_entropy(std::span<const double> probs, std::size_t label) {
  if (label >= probs.size()) {
    throw LabelError("cross_entropy: label " + std::to_string(label) + " outside " +
                     std::to_string(probs.size()) + " classes");
  }
  return -std::log(std::max(probs[label], kProbabilityFloor));
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

}  // namespace framing
