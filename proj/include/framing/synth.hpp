// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "framing/corpus.hpp"
#include "framing/embeddings.hpp"
#include "framing/keyvalue.hpp"

namespace framing {

/// Parameters of the synthetic domain-shift corpus.
///
/// Every class owns `keywords_per_class` keyword tokens drawn with Zipf
/// weights; the same keyword distribution is used in both domains. Each
/// sentence has 5-20 tokens. ceil(shift * marker_rate * length) positions
/// hold domain-marker tokens (source markers in the source domain, target
/// markers in the target domain); of the remaining positions each is a class
/// keyword with probability keyword_rate and a common word otherwise.
///
/// synth_embeddings gives every token a vector uniform in [-1, 1]^dim, then
/// moves all markers of a domain by the same vector of length marker_offset,
/// one direction per domain, the way domain-specific vocabulary clusters in
/// pretrained embeddings.
struct SynthSpec {
  std::size_t classes = 5;
  std::size_t per_class_count = 200;
  std::size_t target_per_class_count = 40;
  std::size_t unlabeled_count = 500;
  std::size_t vocab_size = 300;
  std::size_t keywords_per_class = 12;
  std::size_t marker_count = 20;
  double keyword_rate = 0.3;
  double marker_rate = 0.5;
  double marker_offset = 4.0;
  std::size_t min_length = 5;
  std::size_t max_length = 20;
  double shift = 0.6;
  std::uint64_t seed = 1;
  std::size_t embedding_dim = 100;

  /// Keys: classes, per_class_count, target_per_class_count, unlabeled_count,
  /// vocab_size, keywords_per_class, marker_count, keyword_rate, marker_rate,
  /// marker_offset, min_length, max_length, shift, seed, embedding_dim.
  static SynthSpec from_key_values(const KeyValues& kv);
  KeyValues to_key_values() const;
  /// Throws ConfigError for an unusable spec.
  void validate() const;
};

struct SynthCorpora {
  /// Labeled source-domain training data (domain news, split train).
  TaskDataset source;
  /// Labeled target-domain data (domain online_disc), alternating dev/test.
  TaskDataset target;
  /// Target-domain text without labels (split train).
  TaskDataset unlabeled;
  /// Every token the generator can emit.
  std::vector<std::string> vocabulary;
};

SynthCorpora synth_generate(const SynthSpec& spec);

/// Word vectors for `vocabulary` (normally SynthCorpora::vocabulary), drawn
/// from Rng(spec.seed).derive("embeddings"). UNK is the mean vector.
EmbeddingTable synth_embeddings(const SynthSpec& spec, const std::vector<std::string>& vocabulary);

}  // namespace framing
