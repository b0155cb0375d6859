// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "framing/corpus.hpp"
#include "framing/embeddings.hpp"
#include "framing/labels.hpp"
#include "framing/parameter.hpp"
#include "framing/rng.hpp"
#include "framing/tape.hpp"

namespace framing {

struct ModelShape {
  std::size_t hidden = 100;
  std::size_t layers = 2;
  /// Weights start uniform in [-init_range, init_range].
  double init_range = 0.1;
  double forget_bias = 1.0;
};

struct HeadSpec {
  std::string name;
  LabelSet labels;
  /// Domain discriminator behind a gradient-reversal step.
  bool adversarial = false;
  double reversal_strength = 1.0;
};

/// One LSTM layer. Gate blocks are stacked in the order input, forget,
/// output, candidate: weight is 4H x in, recurrent 4H x H, bias 1 x 4H.
struct LstmLayer {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  std::string weight;
  std::string recurrent;
  std::string bias;
};

struct TaskHead {
  std::string name;
  LabelSet labels;
  bool adversarial = false;
  double reversal_strength = 1.0;
  std::string weight;
  std::string bias;
};

struct LstmState {
  Var h;
  Var c;
};

struct LstmVars {
  Var weight;
  Var recurrent;
  Var bias;
  std::size_t hidden = 0;
};

/// i = σ(W_i x + U_i h + b_i), f, o likewise, g = tanh(W_g x + U_g h + b_g);
/// c' = f ⊙ c + i ⊙ g; h' = o ⊙ tanh(c').
LstmState lstm_step(Tape& tape, const LstmVars& params, Var x, const LstmState& prev);

struct TaskLoss {
  double loss = 0.0;
  Gradients grads;
};

/// Frozen embeddings, a stacked LSTM encoder shared by every task, and one
/// softmax head per task.
class Model {
 public:
  Model(EmbeddingTable embeddings, ModelShape shape, std::vector<HeadSpec> heads, Rng rng);

  const EmbeddingTable& embeddings() const { return embeddings_; }
  const ModelShape& shape() const { return shape_; }
  const std::vector<LstmLayer>& layers() const { return layers_; }
  const std::vector<TaskHead>& heads() const { return heads_; }
  std::size_t head_index(std::string_view name) const;

  ParameterSet& parameters() { return params_; }
  const ParameterSet& parameters() const { return params_; }
  /// Parameters of the shared encoder (everything except the heads and the
  /// frozen embedding table).
  bool is_encoder_parameter(std::string_view name) const;

  std::vector<std::size_t> token_ids(const std::vector<std::string>& tokens) const;

  /// Final top-layer hidden states (B x H), one row per sequence, taken at
  /// each sequence's last true token. Shorter sequences keep their state
  /// through the padded steps.
  Var encode(Tape& tape, const std::vector<std::vector<std::size_t>>& sequences) const;
  std::vector<double> encode(const std::vector<std::string>& tokens) const;

  /// Head logits for encoder output `h`.
  Var logits(Tape& tape, std::size_t head, Var h) const;

  /// Class probabilities, ordered as heads()[head].labels.codes().
  std::vector<double> predict(std::size_t head, const std::vector<std::string>& tokens) const;
  std::vector<std::vector<double>> predict_batch(
      std::size_t head, const std::vector<const std::vector<std::string>*>& sequences) const;
  /// Argmax label codes for every instance, batched internally.
  std::vector<int> predict_labels(std::size_t head, std::span<const Instance> instances,
                                  std::size_t batch_size = 128) const;

  /// Records the mean cross-entropy of a single-label batch. Adversarial heads
  /// read the encoder through a reversal step.
  Var task_loss(Tape& tape, std::size_t head, const Batch& batch) const;

  /// Loss and gradients for one batch. For adversarial heads the encoder
  /// gradients equal -reversal_strength times those of the same head
  /// without reversal; head gradients are unaffected.
  TaskLoss task_loss_backward(std::size_t head, const Batch& batch) const;

 private:
  EmbeddingTable embeddings_;
  ModelShape shape_;
  std::vector<LstmLayer> layers_;
  std::vector<TaskHead> heads_;
  ParameterSet params_;
};

}  // namespace framing
