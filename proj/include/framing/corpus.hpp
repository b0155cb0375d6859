// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "framing/labels.hpp"
#include "framing/rng.hpp"

namespace framing {

enum class Domain { news, twitter, online_disc };
enum class Split { train, dev, test };

std::string_view to_string(Domain d);
std::string_view to_string(Split s);
Domain parse_domain(std::string_view text);
Split parse_split(std::string_view text);

struct Instance {
  std::string id;
  std::string text;
  std::vector<std::string> tokens;
  /// Ascending, without duplicates.
  std::vector<int> labels;
  Domain domain = Domain::news;
  Split split = Split::train;

  friend bool operator==(const Instance&, const Instance&) = default;
};

/// A task's data bound to its label set.
struct TaskDataset {
  std::string name;
  LabelSet labels;
  std::vector<Instance> instances;

  std::size_t size() const { return instances.size(); }
  bool empty() const { return instances.empty(); }
  /// Instances carrying each label, aligned with labels.codes().
  std::vector<std::size_t> class_counts() const;
  /// Instances with more than one label.
  std::size_t multi_label_count() const;

  friend bool operator==(const TaskDataset&, const TaskDataset&) = default;
};

struct CorpusOptions {
  /// Unlabeled corpora (e.g. target-domain text for the adversarial task)
  /// may have empty label arrays.
  bool require_labels = true;
};

/// Corpus JSONL: one object per line with `id`, `text`, `labels` (array of
/// integer codes or label names), `domain`, `split` and an optional `tokens`
/// array. Without `tokens` the text is tokenized. Errors name the line.
TaskDataset parse_corpus(std::istream& in, const LabelSet& labels, const std::string& source,
                         const CorpusOptions& options = {});
TaskDataset load_corpus(const std::filesystem::path& path, const LabelSet& labels,
                        const CorpusOptions& options = {});
void write_corpus(std::ostream& out, const TaskDataset& ds);
void save_corpus(const std::filesystem::path& path, const TaskDataset& ds);

/// One line per class ("code name count") plus totals and the multi-label count.
std::string class_distribution_report(const TaskDataset& ds);

/// One single-label copy per label; copies keep the original id.
TaskDataset expand_multilabel(const TaskDataset& ds);

TaskDataset select_split(const TaskDataset& ds, Split split);

/// Relabels `ds` with `labels`, dropping codes outside it and then instances
/// left without labels.
TaskDataset restrict_labels(TaskDataset ds, const LabelSet& labels);

/// Non-owning view of up to `batch size` instances.
struct Batch {
  std::vector<const Instance*> items;
  std::vector<std::size_t> lengths;
  std::size_t max_length = 0;

  std::size_t size() const { return items.size(); }
};

Batch make_batch(std::vector<const Instance*> items);

/// One shuffled pass over `ds`; the last batch may be short.
std::vector<Batch> batches(const TaskDataset& ds, std::size_t batch_size, Rng& rng);

}  // namespace framing
