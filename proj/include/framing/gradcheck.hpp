// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "framing/parameter.hpp"
#include "framing/tape.hpp"

namespace framing {

struct GradCheckOptions {
  double tolerance = 1e-4;
  /// Central-difference step.
  double step = 1e-5;
  /// Entries checked per parameter; 0 checks every entry.
  std::size_t max_entries_per_parameter = 0;
  /// Magnitude below which errors are measured against this floor instead
  /// of the gradient itself.
  double magnitude_floor = 1e-5;
  /// Expected ratio analytic / numeric. -lambda for parameters behind a
  /// gradient-reversal step.
  double expected_scale = 1.0;
  /// Parameters to check; empty means every trainable parameter.
  std::vector<std::string> only;
  std::uint64_t seed = 0;
};

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t entries_checked = 0;
  bool passed = true;
};

/// Compares `analytic` with central differences of `loss` over the chosen
/// parameters. `loss` must be deterministic and read the parameters in place.
GradCheckReport grad_check(const std::function<double()>& loss, const Gradients& analytic,
                           ParameterSet& params, const GradCheckOptions& options = {});

/// Convenience form: the closure records a forward pass on a fresh tape and
/// returns the 1x1 loss variable.
GradCheckReport grad_check(const std::function<Var(Tape&)>& forward, ParameterSet& params,
                           const GradCheckOptions& options = {});

}  // namespace framing
