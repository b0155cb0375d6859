// SPDX-License-Identifier: Apache-2.0
#include "framing/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "framing/error.hpp"

namespace framing {

Tensor2::Tensor2(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

Tensor2::Tensor2(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw ShapeError("tensor " + std::to_string(rows) + "x" + std::to_string(cols) +
                     " needs " + std::to_string(rows * cols) + " values, got " +
                     std::to_string(values_.size()));
  }
}

Tensor2 Tensor2::row_vector(std::span<const double> values) {
  return Tensor2(1, values.size(), std::vector<double>(values.begin(), values.end()));
}

Tensor2 Tensor2::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw ShapeError("ragged rows in Tensor2::from_rows");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return Tensor2(rows.size(), cols, std::move(flat));
}

void Tensor2::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

bool Tensor2::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

std::string Tensor2::shape_string() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

}  // namespace framing
