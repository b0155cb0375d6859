// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "framing/corpus.hpp"
#include "framing/parameter.hpp"
#include "framing/rng.hpp"
#include "framing/tensor.hpp"

namespace framing {

/// Uniformly random label per instance.
std::vector<int> baseline_random(const LabelSet& labels, std::size_t n, Rng& rng);

/// The most frequent label of `train` (lowest code on ties) for every
/// instance of `test`. Only `train` is counted.
std::vector<int> baseline_majority(const TaskDataset& train, const TaskDataset& test);

/// tf-idf with raw-count tf, idf = ln((1 + N) / (1 + df)) + 1 and
/// L2-normalized rows. Tokens unseen at fit time are ignored.
class TfidfVectorizer {
 public:
  /// Throws DataError when the corpus has no tokens.
  void fit(const std::vector<const std::vector<std::string>*>& documents);
  Tensor2 transform(const std::vector<const std::vector<std::string>*>& documents) const;

  std::size_t vocabulary_size() const { return idf_.size(); }
  /// idf of a term, or 0 for unknown terms.
  double idf(const std::string& term) const;

 private:
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> idf_;
};

struct SoftmaxRegressionConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 32;
  double lr = 0.5;
  double weight_decay = 1e-7;
  std::uint64_t seed = 1;
};

/// Multinomial logistic regression on dense features, trained with the
/// tape and sgd_step.
class SoftmaxRegression {
 public:
  SoftmaxRegression(std::size_t features, const LabelSet& labels);

  /// `targets` are label codes.
  void fit(const Tensor2& features, const std::vector<int>& targets,
           const SoftmaxRegressionConfig& config);
  std::vector<int> predict(const Tensor2& features) const;

 private:
  LabelSet labels_;
  ParameterSet params_;
};

/// tf-idf features fit on `train`, softmax regression trained on the
/// single-label expansion of `train`, predictions for `test`.
std::vector<int> tfidf_softmax_baseline(const TaskDataset& train, const TaskDataset& test,
                                        const SoftmaxRegressionConfig& config);

}  // namespace framing
