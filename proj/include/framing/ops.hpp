// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "framing/tensor.hpp"

namespace framing {

/// Probability floor inside cross_entropy; keeps -ln p finite.
inline constexpr double kProbabilityFloor = 1e-12;

/// W·x + b. Throws ShapeError naming both shapes on mismatch.
std::vector<double> affine(std::span<const double> x, const Tensor2& weight,
                           std::span<const double> bias);

double sigmoid(double x);
std::vector<double> sigmoid(std::span<const double> x);
std::vector<double> tanh(std::span<const double> x);

/// Max-shifted softmax. Empty input is a ShapeError.
std::vector<double> softmax(std::span<const double> logits);

/// -ln(max(p[label], 1e-12)). Label out of range is a LabelError.
double cross_entropy(std::span<const double> probs, std::size_t label);

/// Index of the largest entry, lowest index on ties.
std::size_t argmax(std::span<const double> values);

}  // namespace framing
