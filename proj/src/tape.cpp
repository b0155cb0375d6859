// SPDX-License-Identifier: Apache-2.0
#include "framing/tape.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "framing/error.hpp"
#include "framing/ops.hpp"

namespace framing {

namespace {

void require_same_shape(const char* op, const Tensor2& a, const Tensor2& b) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(op) + ": shapes " + a.shape_string() + " and " +
                     b.shape_string() + " differ");
  }
}

// out (B×out) += x (B×in) · Wᵀ. W is transposed first so the inner loop runs
// over contiguous output columns; each output element accumulates over k in
// ascending order regardless of batch size.
void accumulate_matmul_nt(const Tensor2& x, const Tensor2& weight, Tensor2& out) {
  const std::size_t in = weight.cols();
  const std::size_t width = weight.rows();
  std::vector<double> wt(in * width);
  for (std::size_t j = 0; j < width; ++j) {
    for (std::size_t k = 0; k < in; ++k) wt[k * width + j] = weight(j, k);
  }
  for (std::size_t b = 0; b < x.rows(); ++b) {
    double* o = out.row(b).data();
    const double* xr = x.row(b).data();
    for (std::size_t k = 0; k < in; ++k) {
      const double xv = xr[k];
      const double* w = wt.data() + k * width;
      for (std::size_t j = 0; j < width; ++j) o[j] += xv * w[j];
    }
  }
}

// dx (B×in) += dy (B×out) · W ; dW (out×in) += dyᵀ · x.
void backprop_matmul_nt(const Tensor2& x, const Tensor2& weight, const Tensor2& dy,
                        Tensor2* dx, Tensor2* dw) {
  const std::size_t in = weight.cols();
  for (std::size_t b = 0; b < dy.rows(); ++b) {
    const double* g = dy.row(b).data();
    const double* xr = x.row(b).data();
    for (std::size_t j = 0; j < weight.rows(); ++j) {
      const double gv = g[j];
      if (gv == 0.0) continue;
      if (dx != nullptr) {
        double* d = dx->row(b).data();
        const double* w = weight.row(j).data();
        for (std::size_t k = 0; k < in; ++k) d[k] += gv * w[k];
      }
      if (dw != nullptr) {
        double* d = dw->row(j).data();
        for (std::size_t k = 0; k < in; ++k) d[k] += gv * xr[k];
      }
    }
  }
}

void check_labels(const char* op, const Tensor2& scores, std::span<const std::size_t> labels) {
  if (labels.size() != scores.rows()) {
    throw ShapeError(std::string(op) + ": " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(scores.rows()) + " rows");
  }
  for (std::size_t label : labels) {
    if (label >= scores.cols()) {
      throw LabelError(std::string(op) + ": label " + std::to_string(label) + " outside " +
                       std::to_string(scores.cols()) + " classes");
    }
  }
}

}  // namespace

Var Tape::push(Tensor2 value, std::vector<std::size_t> inputs, Backprop backprop) {
  if (consumed_) throw StateError("tape already consumed by backward()");
  Node n;
  n.value = std::move(value);
  n.needs_grad = std::any_of(inputs.begin(), inputs.end(), [&](std::size_t i) { return needs(i); });
  n.inputs = std::move(inputs);
  n.backprop = std::move(backprop);
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

const Tape::Node& Tape::node(Var v) const {
  if (v.id >= nodes_.size()) throw StateError("variable does not belong to this tape");
  return nodes_[v.id];
}

Tensor2& Tape::grad(std::size_t id) {
  Tensor2& g = grads_[id];
  if (g.empty() && !val(id).empty()) {
    g = Tensor2(val(id).rows(), val(id).cols());
  }
  return g;
}

Var Tape::constant(Tensor2 value) { return push(std::move(value), {}, nullptr); }

Var Tape::parameter(const Parameter& p) {
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return Var{it->second};
  Var v = push(Tensor2{}, {}, nullptr);
  nodes_[v.id].param = &p;
  nodes_[v.id].needs_grad = p.trainable;
  param_nodes_.emplace(&p, v.id);
  return v;
}

Var Tape::gather_rows(const Parameter& table, std::span<const std::size_t> rows) {
  Var t = parameter(table);
  const Tensor2& tv = value(t);
  Tensor2 out(rows.size(), tv.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= tv.rows()) {
      throw ShapeError("gather_rows: row " + std::to_string(rows[r]) + " outside table " +
                       tv.shape_string());
    }
    std::copy_n(tv.row(rows[r]).data(), tv.cols(), out.row(r).data());
  }
  std::vector<std::size_t> ids(rows.begin(), rows.end());
  return push(std::move(out), {t.id}, [ids = std::move(ids)](Tape& tape, std::size_t self) {
    const std::size_t src = tape.nodes_[self].inputs[0];
    Tensor2& dt = tape.grad(src);
    const Tensor2& g = tape.grads_[self];
    for (std::size_t r = 0; r < ids.size(); ++r) {
      auto d = dt.row(ids[r]);
      auto gr = g.row(r);
      for (std::size_t c = 0; c < d.size(); ++c) d[c] += gr[c];
    }
  });
}

Var Tape::matmul_nt(Var x, Var weight) {
  const Tensor2& xv = value(x);
  const Tensor2& wv = value(weight);
  if (xv.cols() != wv.cols()) {
    throw ShapeError("matmul_nt: x is " + xv.shape_string() + ", W is " + wv.shape_string());
  }
  Tensor2 out(xv.rows(), wv.rows());
  accumulate_matmul_nt(xv, wv, out);
  return push(std::move(out), {x.id, weight.id}, [](Tape& tape, std::size_t self) {
    const auto& in = tape.nodes_[self].inputs;
    Tensor2* dx = tape.needs(in[0]) ? &tape.grad(in[0]) : nullptr;
    Tensor2* dw = tape.needs(in[1]) ? &tape.grad(in[1]) : nullptr;
    backprop_matmul_nt(tape.val(in[0]), tape.val(in[1]), tape.grads_[self], dx,
                       dw);
  });
}

Var Tape::affine(Var x, Var weight, Var bias) {
  const Tensor2& xv = value(x);
  const Tensor2& wv = value(weight);
  const Tensor2& bv = value(bias);
  if (xv.cols() != wv.cols() || bv.rows() != 1 || bv.cols() != wv.rows()) {
    throw ShapeError("affine: x is " + xv.shape_string() + ", W is " + wv.shape_string() +
                     ", b is " + bv.shape_string());
  }
  Tensor2 out(xv.rows(), wv.rows());
  for (std::size_t b = 0; b < out.rows(); ++b) std::copy_n(bv.data(), bv.cols(), out.row(b).data());
  accumulate_matmul_nt(xv, wv, out);
  return push(std::move(out), {x.id, weight.id, bias.id}, [](Tape& tape, std::size_t self) {
    const auto& in = tape.nodes_[self].inputs;
    const Tensor2& g = tape.grads_[self];
    Tensor2* dx = tape.needs(in[0]) ? &tape.grad(in[0]) : nullptr;
    Tensor2* dw = tape.needs(in[1]) ? &tape.grad(in[1]) : nullptr;
    backprop_matmul_nt(tape.val(in[0]), tape.val(in[1]), g, dx, dw);
    if (tape.needs(in[2])) {
      Tensor2& db = tape.grad(in[2]);
      for (std::size_t b = 0; b < g.rows(); ++b) {
        auto gr = g.row(b);
        for (std::size_t j = 0; j < gr.size(); ++j) db[j] += gr[j];
      }
    }
  });
}

Var Tape::add(Var a, Var b) {
  const Tensor2& av = value(a);
  const Tensor2& bv = value(b);
  require_same_shape("add", av, bv);
  Tensor2 out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  return push(std::move(out), {a.id, b.id}, [](Tape& tape, std::size_t self) {
    const Tensor2& g = tape.grads_[self];
    for (std::size_t in : tape.nodes_[self].inputs) {
      if (!tape.needs(in)) continue;
      Tensor2& d = tape.grad(in);
      for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
    }
  });
}

Var Tape::mul(Var a, Var b) {
  const Tensor2& av = value(a);
  const Tensor2& bv = value(b);
  require_same_shape("mul", av, bv);
  Tensor2 out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  return push(std::move(out), {a.id, b.id}, [](Tape& tape, std::size_t self) {
    const auto& in = tape.nodes_[self].inputs;
    const Tensor2& g = tape.grads_[self];
    const Tensor2& av = tape.val(in[0]);
    const Tensor2& bv = tape.val(in[1]);
    if (tape.needs(in[0])) {
      Tensor2& d = tape.grad(in[0]);
      for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * bv[i];
    }
    if (tape.needs(in[1])) {
      Tensor2& d = tape.grad(in[1]);
      for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * av[i];
    }
  });
}

Var Tape::sigmoid(Var x) {
  Tensor2 out = value(x);
  for (double& v : out.values()) v = framing::sigmoid(v);
  return push(std::move(out), {x.id}, [](Tape& tape, std::size_t self) {
    const Tensor2& y = tape.val(self);
    const Tensor2& g = tape.grads_[self];
    Tensor2& d = tape.grad(tape.nodes_[self].inputs[0]);
    for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * y[i] * (1.0 - y[i]);
  });
}

Var Tape::tanh(Var x) {
  Tensor2 out = value(x);
  for (double& v : out.values()) v = std::tanh(v);
  return push(std::move(out), {x.id}, [](Tape& tape, std::size_t self) {
    const Tensor2& y = tape.val(self);
    const Tensor2& g = tape.grads_[self];
    Tensor2& d = tape.grad(tape.nodes_[self].inputs[0]);
    for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * (1.0 - y[i] * y[i]);
  });
}

Var Tape::slice_cols(Var x, std::size_t begin, std::size_t count) {
  const Tensor2& xv = value(x);
  if (begin + count > xv.cols()) {
    throw ShapeError("slice_cols: columns [" + std::to_string(begin) + ", " +
                     std::to_string(begin + count) + ") outside " + xv.shape_string());
  }
  Tensor2 out(xv.rows(), count);
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    std::copy_n(xv.row(r).data() + begin, count, out.row(r).data());
  }
  return push(std::move(out), {x.id}, [begin, count](Tape& tape, std::size_t self) {
    const Tensor2& g = tape.grads_[self];
    Tensor2& d = tape.grad(tape.nodes_[self].inputs[0]);
    for (std::size_t r = 0; r < g.rows(); ++r) {
      double* dr = d.row(r).data() + begin;
      const double* gr = g.row(r).data();
      for (std::size_t c = 0; c < count; ++c) dr[c] += gr[c];
    }
  });
}

Var Tape::select_rows(Var when_true, Var when_false, std::vector<std::uint8_t> take_true) {
  const Tensor2& tv = value(when_true);
  const Tensor2& fv = value(when_false);
  require_same_shape("select_rows", tv, fv);
  if (take_true.size() != tv.rows()) throw ShapeError("select_rows: mask length != rows");
  Tensor2 out(tv.rows(), tv.cols());
  for (std::size_t r = 0; r < out.rows(); ++r) {
    const Tensor2& src = take_true[r] ? tv : fv;
    std::copy_n(src.row(r).data(), src.cols(), out.row(r).data());
  }
  return push(std::move(out), {when_true.id, when_false.id},
              [mask = std::move(take_true)](Tape& tape, std::size_t self) {
                const auto& in = tape.nodes_[self].inputs;
                const Tensor2& g = tape.grads_[self];
                for (std::size_t r = 0; r < g.rows(); ++r) {
                  const std::size_t target = mask[r] ? in[0] : in[1];
                  if (!tape.needs(target)) continue;
                  auto d = tape.grad(target).row(r);
                  auto gr = g.row(r);
                  for (std::size_t c = 0; c < d.size(); ++c) d[c] += gr[c];
                }
              });
}

Var Tape::reverse_gradient(Var x, double strength) {
  return push(value(x), {x.id}, [strength](Tape& tape, std::size_t self) {
    const Tensor2& g = tape.grads_[self];
    Tensor2& d = tape.grad(tape.nodes_[self].inputs[0]);
    for (std::size_t i = 0; i < g.size(); ++i) d[i] += -strength * g[i];
  });
}

Var Tape::softmax(Var logits) {
  const Tensor2& z = value(logits);
  if (z.cols() == 0) throw ShapeError("softmax: empty input");
  Tensor2 out(z.rows(), z.cols());
  for (std::size_t r = 0; r < z.rows(); ++r) {
    auto p = framing::softmax(z.row(r));
    std::copy(p.begin(), p.end(), out.row(r).begin());
  }
  return push(std::move(out), {logits.id}, [](Tape& tape, std::size_t self) {
    const Tensor2& p = tape.val(self);
    const Tensor2& g = tape.grads_[self];
    Tensor2& d = tape.grad(tape.nodes_[self].inputs[0]);
    for (std::size_t r = 0; r < p.rows(); ++r) {
      auto pr = p.row(r);
      auto gr = g.row(r);
      double dot = 0.0;
      for (std::size_t c = 0; c < pr.size(); ++c) dot += pr[c] * gr[c];
      auto dr = d.row(r);
      for (std::size_t c = 0; c < pr.size(); ++c) dr[c] += pr[c] * (gr[c] - dot);
    }
  });
}

Var Tape::nll(Var probs, std::span<const std::size_t> labels) {
  const Tensor2& p = value(probs);
  check_labels("nll", p, labels);
  double total = 0.0;
  for (std::size_t r = 0; r < p.rows(); ++r) total += cross_entropy(p.row(r), labels[r]);
  Tensor2 out(1, 1, p.rows() == 0 ? 0.0 : total / static_cast<double>(p.rows()));
  std::vector<std::size_t> ys(labels.begin(), labels.end());
  return push(std::move(out), {probs.id}, [ys = std::move(ys)](Tape& tape, std::size_t self) {
    const std::size_t in = tape.nodes_[self].inputs[0];
    const Tensor2& p = tape.val(in);
    const double g = tape.grads_[self][0] / static_cast<double>(p.rows());
    Tensor2& d = tape.grad(in);
    for (std::size_t r = 0; r < p.rows(); ++r) {
      const double pv = p(r, ys[r]);
      // The floor clamps the value; below it the loss is flat.
      if (pv > kProbabilityFloor) d(r, ys[r]) += -g / pv;
    }
  });
}

Var Tape::softmax_cross_entropy(Var logits, std::span<const std::size_t> labels) {
  const Tensor2& z = value(logits);
  if (z.cols() == 0) throw ShapeError("softmax_cross_entropy: empty input");
  check_labels("softmax_cross_entropy", z, labels);
  Tensor2 probs(z.rows(), z.cols());
  double total = 0.0;
  for (std::size_t r = 0; r < z.rows(); ++r) {
    auto p = framing::softmax(z.row(r));
    total += cross_entropy(p, labels[r]);
    std::copy(p.begin(), p.end(), probs.row(r).begin());
  }
  Tensor2 out(1, 1, z.rows() == 0 ? 0.0 : total / static_cast<double>(z.rows()));
  std::vector<std::size_t> ys(labels.begin(), labels.end());
  return push(std::move(out), {logits.id},
              [ys = std::move(ys), probs = std::move(probs)](Tape& tape, std::size_t self) {
                const double g = tape.grads_[self][0] / static_cast<double>(probs.rows());
                Tensor2& d = tape.grad(tape.nodes_[self].inputs[0]);
                for (std::size_t r = 0; r < probs.rows(); ++r) {
                  auto pr = probs.row(r);
                  auto dr = d.row(r);
                  for (std::size_t c = 0; c < pr.size(); ++c) {
                    dr[c] += g * (pr[c] - (c == ys[r] ? 1.0 : 0.0));
                  }
                }
              });
}

Gradients Tape::backward(Var loss, double loss_gradient) {
  if (consumed_) throw StateError("backward: tape already consumed");
  if (nodes_.empty()) throw StateError("backward: no forward pass recorded");
  node(loss);
  const Tensor2& lv = val(loss.id);
  if (lv.rows() != 1 || lv.cols() != 1) {
    throw ShapeError("backward: loss must be 1x1, got " + lv.shape_string());
  }
  consumed_ = true;
  grads_.assign(nodes_.size(), Tensor2{});
  Gradients out;
  if (!needs(loss.id)) return out;
  grad(loss.id)[0] = loss_gradient;

  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.needs_grad || grads_[i].empty()) continue;
    if (n.param != nullptr) {
      auto [it, inserted] = out.try_emplace(n.param->name, grads_[i]);
      if (!inserted) {
        for (std::size_t k = 0; k < grads_[i].size(); ++k) it->second[k] += grads_[i][k];
      }
      continue;
    }
    if (n.backprop) n.backprop(*this, i);
    // Intermediate buffers are dead once propagated.
    grads_[i] = Tensor2{};
  }
  return out;
}

}  // namespace framing
