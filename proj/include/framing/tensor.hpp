// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace framing {

/// Dense row-major matrix of doubles. Vectors are 1 x n tensors; batched
/// activations put one instance per row.
class Tensor2 {
 public:
  Tensor2() = default;
  Tensor2(std::size_t rows, std::size_t cols, double fill = 0.0);
  Tensor2(std::size_t rows, std::size_t cols, std::vector<double> values);

  static Tensor2 row_vector(std::span<const double> values);
  /// Build from nested initializer data; every row must have the same length.
  static Tensor2 from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

  void fill(double v);
  bool all_finite() const;
  bool same_shape(const Tensor2& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  /// "RxC", used in error messages.
  std::string shape_string() const;

  friend bool operator==(const Tensor2&, const Tensor2&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

}  // namespace framing
