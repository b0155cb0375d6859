// SPDX-License-Identifier: Apache-2.0
#include "framing/model.hpp"

#include <algorithm>

#include "framing/error.hpp"
#include "framing/ops.hpp"

namespace framing {

namespace {
constexpr const char* kEmbeddingParam = "embedding";
}

LstmState lstm_step(Tape& tape, const LstmVars& params, Var x, const LstmState& prev) {
  const std::size_t h = params.hidden;
  Var pre = tape.add(tape.affine(x, params.weight, params.bias),
                     tape.matmul_nt(prev.h, params.recurrent));
  Var input_gate = tape.sigmoid(tape.slice_cols(pre, 0, h));
  Var forget_gate = tape.sigmoid(tape.slice_cols(pre, h, h));
  Var output_gate = tape.sigmoid(tape.slice_cols(pre, 2 * h, h));
  Var candidate = tape.tanh(tape.slice_cols(pre, 3 * h, h));
  Var c = tape.add(tape.mul(forget_gate, prev.c), tape.mul(input_gate, candidate));
  Var out = tape.mul(output_gate, tape.tanh(c));
  return {out, c};
}

Model::Model(EmbeddingTable embeddings, ModelShape shape, std::vector<HeadSpec> heads, Rng rng)
    : embeddings_(std::move(embeddings)), shape_(shape) {
  if (shape_.hidden == 0 || shape_.layers == 0) {
    throw ConfigError("model needs hidden >= 1 and layers >= 1");
  }
  if (embeddings_.dimension() == 0) throw ConfigError("model needs a non-empty embedding table");
  if (heads.empty()) throw ConfigError("model needs at least one head");

  params_.add(kEmbeddingParam, embeddings_.matrix(), /*trainable=*/false);

  Rng init = rng.derive("encoder");
  const std::size_t h = shape_.hidden;
  std::size_t in = embeddings_.dimension();
  for (std::size_t k = 0; k < shape_.layers; ++k) {
    LstmLayer layer{in, h, "lstm" + std::to_string(k) + ".W", "lstm" + std::to_string(k) + ".U",
                    "lstm" + std::to_string(k) + ".b"};
    Tensor2 w(4 * h, in);
    Tensor2 u(4 * h, h);
    for (double& v : w.values()) v = init.uniform(-shape_.init_range, shape_.init_range);
    for (double& v : u.values()) v = init.uniform(-shape_.init_range, shape_.init_range);
    Tensor2 b(1, 4 * h, 0.0);
    for (std::size_t j = h; j < 2 * h; ++j) b[j] = shape_.forget_bias;
    params_.add(layer.weight, std::move(w));
    params_.add(layer.recurrent, std::move(u));
    params_.add(layer.bias, std::move(b));
    layers_.push_back(std::move(layer));
    in = h;
  }

  for (auto& spec : heads) {
    if (spec.labels.size() == 0) throw ConfigError("head '" + spec.name + "' has no labels");
    if (spec.adversarial && spec.labels.size() != 2) {
      throw ConfigError("adversarial head '" + spec.name + "' must be binary");
    }
    if (spec.reversal_strength < 0.0) {
      throw ConfigError("head '" + spec.name + "': reversal strength must be >= 0");
    }
    for (const auto& other : heads_) {
      if (other.name == spec.name) throw ConfigError("duplicate head '" + spec.name + "'");
    }
    TaskHead head{spec.name, spec.labels, spec.adversarial, spec.reversal_strength,
                  "head." + spec.name + ".W", "head." + spec.name + ".b"};
    Rng head_init = rng.derive("head:" + spec.name);
    Tensor2 w(spec.labels.size(), h);
    for (double& v : w.values()) v = head_init.uniform(-shape_.init_range, shape_.init_range);
    params_.add(head.weight, std::move(w));
    params_.add(head.bias, Tensor2(1, spec.labels.size(), 0.0));
    heads_.push_back(std::move(head));
  }
}

std::size_t Model::head_index(std::string_view name) const {
  for (std::size_t i = 0; i < heads_.size(); ++i) {
    if (heads_[i].name == name) return i;
  }
  throw ConfigError("model has no head '" + std::string(name) + "'");
}

bool Model::is_encoder_parameter(std::string_view name) const {
  return std::any_of(layers_.begin(), layers_.end(), [&](const LstmLayer& l) {
    return l.weight == name || l.recurrent == name || l.bias == name;
  });
}

std::vector<std::size_t> Model::token_ids(const std::vector<std::string>& tokens) const {
  std::vector<std::size_t> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(embeddings_.id(t));
  return ids;
}

Var Model::encode(Tape& tape, const std::vector<std::vector<std::size_t>>& sequences) const {
  if (sequences.empty()) throw DataError("encode: empty batch");
  std::size_t steps = 0;
  for (const auto& s : sequences) {
    if (s.empty()) throw DataError("encode: empty token list");
    steps = std::max(steps, s.size());
  }
  const std::size_t batch = sequences.size();
  const Parameter& table = params_.at(kEmbeddingParam);

  std::vector<Var> inputs(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    std::vector<std::size_t> rows(batch, EmbeddingTable::kUnknownId);
    for (std::size_t b = 0; b < batch; ++b) {
      if (t < sequences[b].size()) rows[b] = sequences[b][t];
    }
    inputs[t] = tape.gather_rows(table, rows);
  }

  Var top;
  for (const auto& layer : layers_) {
    LstmVars vars{tape.parameter(params_.at(layer.weight)),
                  tape.parameter(params_.at(layer.recurrent)),
                  tape.parameter(params_.at(layer.bias)), layer.hidden_dim};
    LstmState state{tape.constant(Tensor2(batch, layer.hidden_dim)),
                    tape.constant(Tensor2(batch, layer.hidden_dim))};
    for (std::size_t t = 0; t < steps; ++t) {
      LstmState next = lstm_step(tape, vars, inputs[t], state);
      std::vector<std::uint8_t> active(batch);
      bool all_active = true;
      for (std::size_t b = 0; b < batch; ++b) {
        active[b] = t < sequences[b].size();
        all_active = all_active && active[b];
      }
      if (all_active) {
        state = next;
      } else {
        state = {tape.select_rows(next.h, state.h, active),
                 tape.select_rows(next.c, state.c, std::move(active))};
      }
      inputs[t] = state.h;
    }
    top = state.h;
  }
  return top;
}

std::vector<double> Model::encode(const std::vector<std::string>& tokens) const {
  Tape tape;
  Var h = encode(tape, {token_ids(tokens)});
  auto row = tape.value(h).row(0);
  return {row.begin(), row.end()};
}

Var Model::logits(Tape& tape, std::size_t head, Var h) const {
  const TaskHead& th = heads_.at(head);
  return tape.affine(h, tape.parameter(params_.at(th.weight)), tape.parameter(params_.at(th.bias)));
}

std::vector<std::vector<double>> Model::predict_batch(
    std::size_t head, const std::vector<const std::vector<std::string>*>& sequences) const {
  std::vector<std::vector<std::size_t>> ids;
  ids.reserve(sequences.size());
  for (const auto* s : sequences) ids.push_back(token_ids(*s));
  Tape tape;
  Var z = logits(tape, head, encode(tape, ids));
  const Tensor2& zv = tape.value(z);
  std::vector<std::vector<double>> out;
  for (std::size_t r = 0; r < zv.rows(); ++r) out.push_back(softmax(zv.row(r)));
  return out;
}

std::vector<double> Model::predict(std::size_t head, const std::vector<std::string>& tokens) const {
  return predict_batch(head, {&tokens}).front();
}

std::vector<int> Model::predict_labels(std::size_t head, std::span<const Instance> instances,
                                       std::size_t batch_size) const {
  const LabelSet& labels = heads_.at(head).labels;
  std::vector<int> out;
  out.reserve(instances.size());
  for (std::size_t start = 0; start < instances.size(); start += batch_size) {
    std::vector<const std::vector<std::string>*> seqs;
    for (std::size_t i = start; i < std::min(instances.size(), start + batch_size); ++i) {
      seqs.push_back(&instances[i].tokens);
    }
    for (const auto& p : predict_batch(head, seqs)) out.push_back(labels.code_at(argmax(p)));
  }
  return out;
}

Var Model::task_loss(Tape& tape, std::size_t head, const Batch& batch) const {
  const TaskHead& th = heads_.at(head);
  std::vector<std::vector<std::size_t>> ids;
  std::vector<std::size_t> targets;
  ids.reserve(batch.size());
  for (const Instance* inst : batch.items) {
    if (inst->labels.size() != 1) {
      throw LabelError("instance '" + inst->id + "' must carry exactly one label for head '" +
                       th.name + "' (expand multi-label data first)");
    }
    targets.push_back(th.labels.index_of(inst->labels.front()));
    ids.push_back(token_ids(inst->tokens));
  }
  Var h = encode(tape, ids);
  // Unit reversal here; the strength is applied to the encoder gradients in
  // task_loss_backward so they come out as exactly -strength * plain.
  if (th.adversarial) h = tape.reverse_gradient(h, 1.0);
  return tape.softmax_cross_entropy(logits(tape, head, h), targets);
}

TaskLoss Model::task_loss_backward(std::size_t head, const Batch& batch) const {
  Tape tape;
  Var loss = task_loss(tape, head, batch);
  TaskLoss out;
  out.loss = tape.value(loss)[0];
  out.grads = tape.backward(loss);
  const TaskHead& th = heads_.at(head);
  if (th.adversarial && th.reversal_strength != 1.0) {
    for (auto& [name, g] : out.grads) {
      if (!is_encoder_parameter(name)) continue;
      for (double& v : g.values()) v *= th.reversal_strength;
    }
  }
  return out;
}

}  // namespace framing
