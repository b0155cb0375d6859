// SPDX-License-Identifier: Apache-2.0
#include "framing/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "framing/rng.hpp"

namespace framing {

GradCheckReport grad_check(const std::function<double()>& loss, const Gradients& analytic,
                           ParameterSet& params, const GradCheckOptions& options) {
  GradCheckReport report;
  Rng rng(options.seed);
  for (Parameter& p : params.all()) {
    if (!p.trainable) continue;
    if (!options.only.empty() &&
        std::find(options.only.begin(), options.only.end(), p.name) == options.only.end()) {
      continue;
    }
    auto it = analytic.find(p.name);
    std::vector<std::size_t> entries(p.value.size());
    std::iota(entries.begin(), entries.end(), std::size_t{0});
    if (options.max_entries_per_parameter != 0 &&
        entries.size() > options.max_entries_per_parameter) {
      rng.shuffle(std::span(entries));
      entries.resize(options.max_entries_per_parameter);
    }
    for (std::size_t i : entries) {
      const double saved = p.value[i];
      p.value[i] = saved + options.step;
      const double up = loss();
      p.value[i] = saved - options.step;
      const double down = loss();
      p.value[i] = saved;

      const double numeric = options.expected_scale * (up - down) / (2.0 * options.step);
      const double exact = it == analytic.end() ? 0.0 : it->second[i];
      const double scale =
          std::max({std::abs(exact), std::abs(numeric), options.magnitude_floor});
      const double err = std::abs(exact - numeric) / scale;
      ++report.entries_checked;
      if (report.worst_parameter.empty() || err > report.max_relative_error) {
        report.max_relative_error = err;
        report.worst_parameter = p.name;
        report.worst_index = i;
        report.worst_analytic = exact;
        report.worst_numeric = numeric;
      }
    }
  }
  report.passed = report.max_relative_error < options.tolerance;
  return report;
}

GradCheckReport grad_check(const std::function<Var(Tape&)>& forward, ParameterSet& params,
                           const GradCheckOptions& options) {
  Tape tape;
  const Gradients analytic = tape.backward(forward(tape));
  auto loss = [&] {
    Tape t;
    return t.value(forward(t))[0];
  };
  return grad_check(loss, analytic, params, options);
}

}  // namespace framing
