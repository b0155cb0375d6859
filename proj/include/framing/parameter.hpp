// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "framing/tensor.hpp"

namespace framing {

struct Parameter {
  std::string name;
  Tensor2 value;
  bool trainable = true;
};

/// Gradients keyed by parameter name. Frozen parameters never get an entry.
using Gradients = std::map<std::string, Tensor2>;

/// Named parameters in insertion order. Names are unique.
class ParameterSet {
 public:
  Parameter& add(std::string name, Tensor2 value, bool trainable = true);

  Parameter* find(std::string_view name);
  const Parameter* find(std::string_view name) const;
  Parameter& at(std::string_view name);
  const Parameter& at(std::string_view name) const;

  std::span<Parameter> all() { return items_; }
  std::span<const Parameter> all() const { return items_; }
  std::size_t size() const { return items_.size(); }

  /// Copies of every value, in order; restore() puts them back.
  std::vector<Tensor2> snapshot() const;
  void restore(const std::vector<Tensor2>& values);

  friend bool operator==(const ParameterSet& a, const ParameterSet& b);

 private:
  std::vector<Parameter> items_;
};

}  // namespace framing
