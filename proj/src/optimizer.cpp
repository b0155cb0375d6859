// SPDX-License-Identifier: Apache-2.0
#include "framing/optimizer.hpp"

#include <algorithm>

#include "framing/error.hpp"

namespace framing {

Parameter& ParameterSet::add(std::string name, Tensor2 value, bool trainable) {
  if (find(name) != nullptr) throw ConfigError("duplicate parameter name '" + name + "'");
  items_.push_back(Parameter{std::move(name), std::move(value), trainable});
  return items_.back();
}

Parameter* ParameterSet::find(std::string_view name) {
  auto it = std::find_if(items_.begin(), items_.end(),
                         [&](const Parameter& p) { return p.name == name; });
  return it == items_.end() ? nullptr : &*it;
}

const Parameter* ParameterSet::find(std::string_view name) const {
  return const_cast<ParameterSet*>(this)->find(name);
}

Parameter& ParameterSet::at(std::string_view name) {
  Parameter* p = find(name);
  if (p == nullptr) throw ConfigError("unknown parameter '" + std::string(name) + "'");
  return *p;
}

const Parameter& ParameterSet::at(std::string_view name) const {
  return const_cast<ParameterSet*>(this)->at(name);
}

std::vector<Tensor2> ParameterSet::snapshot() const {
  std::vector<Tensor2> out;
  out.reserve(items_.size());
  for (const auto& p : items_) out.push_back(p.value);
  return out;
}

void ParameterSet::restore(const std::vector<Tensor2>& values) {
  if (values.size() != items_.size()) throw ShapeError("restore: parameter count mismatch");
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (!values[i].same_shape(items_[i].value)) {
      throw ShapeError("restore: shape mismatch for '" + items_[i].name + "'");
    }
    items_[i].value = values[i];
  }
}

bool operator==(const ParameterSet& a, const ParameterSet& b) {
  if (a.items_.size() != b.items_.size()) return false;
  for (std::size_t i = 0; i < a.items_.size(); ++i) {
    const auto& x = a.items_[i];
    const auto& y = b.items_[i];
    if (x.name != y.name || x.trainable != y.trainable || !(x.value == y.value)) return false;
  }
  return true;
}

void sgd_step(ParameterSet& params, const Gradients& grads, double lr, double weight_decay) {
  if (lr < 0.0) throw ConfigError("sgd_step: learning rate must be >= 0");
  if (weight_decay < 0.0) throw ConfigError("sgd_step: weight decay must be >= 0");

  std::vector<std::pair<Parameter*, const Tensor2*>> updates;
  for (const auto& [name, grad] : grads) {
    Parameter* p = params.find(name);
    if (p == nullptr) throw ConfigError("sgd_step: gradient for unknown parameter '" + name + "'");
    if (!grad.same_shape(p->value)) {
      throw ShapeError("sgd_step: gradient " + grad.shape_string() + " for parameter '" + name +
                       "' of shape " + p->value.shape_string());
    }
    if (!grad.all_finite()) throw NumericError("non-finite gradient for parameter '" + name + "'");
    if (p->trainable) updates.emplace_back(p, &grad);
  }
  for (auto [p, grad] : updates) {
    auto value = p->value.values();
    auto g = grad->values();
    for (std::size_t i = 0; i < value.size(); ++i) {
      value[i] -= lr * (g[i] + weight_decay * value[i]);
    }
  }
}

}  // namespace framing
