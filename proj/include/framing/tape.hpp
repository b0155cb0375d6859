// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "framing/parameter.hpp"
#include "framing/tensor.hpp"

namespace framing {

/// Handle to a value recorded on a Tape.
struct Var {
  std::size_t id = 0;
};

/// Reverse-mode gradient tape over batched tensors (one instance per row).
///
/// Every op evaluates eagerly, stores its output, and appends one step.
/// backward() walks the steps in exact reverse order, once; afterwards the
/// tape is consumed. Parameters enter through parameter() or gather_rows()
/// and are referenced, not copied, so they must outlive the tape.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = default;
  Tape& operator=(Tape&&) = default;

  Var constant(Tensor2 value);
  /// Leaf for a parameter. Repeated calls for the same parameter share a step.
  Var parameter(const Parameter& p);
  /// Rows of a table parameter, e.g. an embedding lookup.
  Var gather_rows(const Parameter& table, std::span<const std::size_t> rows);

  /// x·Wᵀ + b with x (B×in), W (out×in), b (1×out).
  Var affine(Var x, Var weight, Var bias);
  /// x·Wᵀ.
  Var matmul_nt(Var x, Var weight);
  Var add(Var a, Var b);
  Var mul(Var a, Var b);
  Var sigmoid(Var x);
  Var tanh(Var x);
  Var slice_cols(Var x, std::size_t begin, std::size_t count);
  /// Row r comes from `when_true` if take_true[r] else from `when_false`.
  Var select_rows(Var when_true, Var when_false, std::vector<std::uint8_t> take_true);
  /// Identity forward; backward multiplies the incoming gradient by -strength.
  Var reverse_gradient(Var x, double strength);
  Var softmax(Var logits);
  /// Mean over rows of -ln(max(p[label], 1e-12)). Result is 1x1.
  Var nll(Var probs, std::span<const std::size_t> labels);
  /// Fused softmax + mean cross-entropy; gradient (p - onehot) / B. Result is 1x1.
  Var softmax_cross_entropy(Var logits, std::span<const std::size_t> labels);

  const Tensor2& value(Var v) const { return val(node(v), v.id); }
  std::size_t size() const { return nodes_.size(); }
  bool consumed() const { return consumed_; }

  /// Backpropagates from a 1x1 loss seeded with `loss_gradient`. Returns
  /// gradients for every trainable parameter that the loss depends on.
  /// Throws StateError on an empty or already consumed tape.
  Gradients backward(Var loss, double loss_gradient = 1.0);

 private:
  using Backprop = std::function<void(Tape&, std::size_t)>;

  struct Node {
    Tensor2 value;
    const Parameter* param = nullptr;
    bool needs_grad = false;
    std::vector<std::size_t> inputs;
    Backprop backprop;
  };

  Var push(Tensor2 value, std::vector<std::size_t> inputs, Backprop backprop);
  const Node& node(Var v) const;
  bool needs(std::size_t id) const { return nodes_[id].needs_grad; }
  // Parameter leaves read the parameter in place instead of holding a copy.
  const Tensor2& val(std::size_t id) const { return val(nodes_[id], id); }
  static const Tensor2& val(const Node& n, std::size_t) { return n.param ? n.param->value : n.value; }
  /// Gradient buffer of a node, zero-initialized on first touch.
  Tensor2& grad(std::size_t id);

  std::vector<Node> nodes_;
  std::vector<Tensor2> grads_;
  std::unordered_map<const Parameter*, std::size_t> param_nodes_;
  bool consumed_ = false;
};

}  // namespace framing
