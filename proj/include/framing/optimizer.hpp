// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "framing/parameter.hpp"

namespace framing {

/// Plain SGD with an additive L2 term: p <- p - lr * (g + weight_decay * p).
///
/// Only parameters with a gradient entry move. Frozen parameters are skipped
/// even if a gradient is supplied. All gradients are checked for finiteness
/// before any parameter is written; a NumericError names the first offender.
void sgd_step(ParameterSet& params, const Gradients& grads, double lr, double weight_decay);

}  // namespace framing
