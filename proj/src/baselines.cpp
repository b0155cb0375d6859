// SPDX-License-Identifier: Apache-2.0
#include "framing/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "framing/error.hpp"
#include "framing/ops.hpp"
#include "framing/optimizer.hpp"
#include "framing/tape.hpp"

namespace framing {

std::vector<int> baseline_random(const LabelSet& labels, std::size_t n, Rng& rng) {
  if (labels.size() == 0) throw ConfigError("baseline_random: empty label set");
  std::vector<int> out(n);
  for (int& v : out) v = labels.code_at(rng.below(labels.size()));
  return out;
}

std::vector<int> baseline_majority(const TaskDataset& train, const TaskDataset& test) {
  const auto counts = train.class_counts();
  if (counts.empty()) throw ConfigError("baseline_majority: empty label set");
  const std::size_t best =
      static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  return std::vector<int>(test.size(), train.labels.code_at(best));
}

void TfidfVectorizer::fit(const std::vector<const std::vector<std::string>*>& documents) {
  index_.clear();
  std::vector<std::size_t> df;
  for (const auto* doc : documents) {
    std::set<std::string> seen(doc->begin(), doc->end());
    for (const auto& term : seen) {
      auto [it, inserted] = index_.try_emplace(term, df.size());
      if (inserted) df.push_back(0);
      ++df[it->second];
    }
  }
  if (df.empty()) throw DataError("tf-idf: empty vocabulary");
  const auto n = static_cast<double>(documents.size());
  idf_.resize(df.size());
  for (std::size_t i = 0; i < df.size(); ++i) {
    idf_[i] = std::log((1.0 + n) / (1.0 + static_cast<double>(df[i]))) + 1.0;
  }
}

double TfidfVectorizer::idf(const std::string& term) const {
  auto it = index_.find(term);
  return it == index_.end() ? 0.0 : idf_[it->second];
}

Tensor2 TfidfVectorizer::transform(
    const std::vector<const std::vector<std::string>*>& documents) const {
  if (idf_.empty()) throw StateError("tf-idf: transform before fit");
  Tensor2 out(documents.size(), idf_.size());
  for (std::size_t r = 0; r < documents.size(); ++r) {
    auto row = out.row(r);
    for (const auto& term : *documents[r]) {
      auto it = index_.find(term);
      if (it != index_.end()) row[it->second] += 1.0;
    }
    double norm = 0.0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      row[c] *= idf_[c];
      norm += row[c] * row[c];
    }
    if (norm > 0.0) {
      norm = std::sqrt(norm);
      for (double& v : row) v /= norm;
    }
  }
  return out;
}

SoftmaxRegression::SoftmaxRegression(std::size_t features, const LabelSet& labels)
    : labels_(labels) {
  params_.add("W", Tensor2(labels.size(), features));
  params_.add("b", Tensor2(1, labels.size()));
}

void SoftmaxRegression::fit(const Tensor2& features, const std::vector<int>& targets,
                            const SoftmaxRegressionConfig& config) {
  if (features.rows() != targets.size()) throw ShapeError("softmax regression: rows != targets");
  std::vector<std::size_t> y;
  for (int code : targets) y.push_back(labels_.index_of(code));
  std::vector<std::size_t> order(targets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(config.seed);
  const std::size_t bs = std::max<std::size_t>(1, config.batch_size);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(std::span(order));
    for (std::size_t start = 0; start < order.size(); start += bs) {
      const std::size_t end = std::min(order.size(), start + bs);
      Tensor2 x(end - start, features.cols());
      std::vector<std::size_t> labels;
      for (std::size_t i = start; i < end; ++i) {
        std::copy_n(features.row(order[i]).data(), features.cols(), x.row(i - start).data());
        labels.push_back(y[order[i]]);
      }
      Tape tape;
      Var z = tape.affine(tape.constant(std::move(x)), tape.parameter(params_.at("W")),
                          tape.parameter(params_.at("b")));
      sgd_step(params_, tape.backward(tape.softmax_cross_entropy(z, labels)), config.lr,
               config.weight_decay);
    }
  }
}

std::vector<int> SoftmaxRegression::predict(const Tensor2& features) const {
  std::vector<int> out;
  const Tensor2& w = params_.at("W").value;
  const Tensor2& b = params_.at("b").value;
  for (std::size_t r = 0; r < features.rows(); ++r) {
    out.push_back(labels_.code_at(argmax(affine(features.row(r), w, b.row(0)))));
  }
  return out;
}

std::vector<int> tfidf_softmax_baseline(const TaskDataset& train, const TaskDataset& test,
                                        const SoftmaxRegressionConfig& config) {
  std::vector<const std::vector<std::string>*> fit_docs;
  for (const auto& inst : train.instances) fit_docs.push_back(&inst.tokens);
  const TaskDataset expanded = expand_multilabel(train);
  std::vector<const std::vector<std::string>*> train_docs;
  std::vector<int> targets;
  for (const auto& inst : expanded.instances) {
    train_docs.push_back(&inst.tokens);
    targets.push_back(inst.labels.front());
  }
  std::vector<const std::vector<std::string>*> test_docs;
  for (const auto& inst : test.instances) test_docs.push_back(&inst.tokens);

  TfidfVectorizer tfidf;
  tfidf.fit(fit_docs);
  SoftmaxRegression model(tfidf.vocabulary_size(), train.labels);
  model.fit(tfidf.transform(train_docs), targets, config);
  return model.predict(tfidf.transform(test_docs));
}

}  // namespace framing
