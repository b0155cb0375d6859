// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "framing/corpus.hpp"
#include "framing/keyvalue.hpp"
#include "framing/metrics.hpp"
#include "framing/model.hpp"
#include "framing/rng.hpp"

namespace framing {

enum class Mode { baseline, multitask, adversarial };

std::string_view to_string(Mode m);
Mode parse_mode(std::string_view text);

struct TrainConfig {
  Mode mode = Mode::baseline;
  /// Probability of drawing a main-task batch. Unset means 1.0 for baseline,
  /// 0.5 for multitask and 0.3 for adversarial training.
  std::optional<double> main_weight;
  std::size_t batch_size = 128;
  double lr = 0.1;
  double weight_decay = 1e-7;
  std::size_t hidden = 100;
  std::size_t layers = 2;
  std::size_t min_epochs = 80;
  std::size_t patience = 5;
  /// Updates per epoch = epoch_factor * ceil(|main| / batch_size).
  std::size_t epoch_factor = 2;
  /// Hard cap on epochs; 0 means no cap.
  std::size_t max_epochs = 1000;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  double lambda_rev = 1.0;

  double effective_main_weight() const;
  void validate() const;

  static const std::vector<std::string>& keys();
  /// Reads the keys above (mode, main_weight, batch_size, lr, weight_decay,
  /// hidden, layers, min_epochs, patience, epoch_factor, max_epochs, seeds,
  /// lambda_rev); other keys are ignored.
  static TrainConfig from_key_values(const KeyValues& kv);
  void write_to(KeyValues& kv) const;
};

/// 0 (main) with probability w_main, otherwise 1..aux_count uniformly.
/// Consumes one uniform draw, plus one bounded draw on the auxiliary branch.
std::size_t sample_task(Rng& rng, double w_main, std::size_t aux_count);

/// Updates per epoch for a main task of `main_size` instances.
std::size_t iterations_per_epoch(std::size_t main_size, std::size_t batch_size,
                                 std::size_t factor);

/// A task's (single-label) training data bound to a model head.
struct TrainingTask {
  std::string name;
  const TaskDataset* data = nullptr;
  std::size_t head = 0;
};

/// Endless stream of batches: a fresh shuffled pass whenever one runs out.
class BatchCycler {
 public:
  BatchCycler(const TaskDataset& data, std::size_t batch_size, Rng rng);
  const Batch& next();
  std::size_t passes() const { return passes_; }

 private:
  const TaskDataset* data_;
  std::size_t batch_size_;
  Rng rng_;
  std::vector<Batch> pass_;
  std::size_t cursor_ = 0;
  std::size_t passes_ = 0;
};

struct EpochStats {
  std::size_t updates = 0;
  /// Per task: number of updates and mean batch loss (0 when not sampled).
  std::vector<std::size_t> task_updates;
  std::vector<double> task_losses;
};

/// One epoch: iterations_per_epoch(...) updates, each on a batch of a task
/// drawn by sample_task. tasks[0] is the main task.
EpochStats run_epoch(Model& model, std::span<const TrainingTask> tasks,
                     std::vector<BatchCycler>& cyclers, const TrainConfig& config, Rng& schedule);

/// Stopping rule: an epoch improves when its dev score is strictly above
/// the best so far. Non-improving epochs after `min_epochs` count toward
/// `patience`; training stops once `patience` of them follow the last
/// improvement, which is never before epoch min_epochs + patience unless the
/// dev score keeps improving.
class EarlyStopping {
 public:
  EarlyStopping(std::size_t min_epochs, std::size_t patience);
  /// Returns true when `score` improves on the best so far.
  bool observe(std::size_t epoch, double score);
  bool should_stop() const;
  std::size_t best_epoch() const { return best_epoch_; }
  double best_score() const { return best_score_; }

 private:
  std::size_t min_epochs_;
  std::size_t patience_;
  std::size_t last_epoch_ = 0;
  std::size_t stale_ = 0;
  std::size_t best_epoch_ = 0;
  double best_score_ = 0.0;
  bool any_ = false;
};

struct EpochRecord {
  std::size_t epoch = 0;
  std::vector<std::string> tasks;
  std::vector<double> task_losses;
  double dev_macro_f = 0.0;
  /// Cumulative update count: a logical clock that keeps run logs replayable.
  std::size_t updates = 0;
};

struct RunRecord {
  std::uint64_t seed = 0;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  double best_dev_macro_f = 0.0;
  std::optional<EvalReport> dev;
  std::optional<EvalReport> test;
  double wall_seconds = 0.0;
};

using DevScorer = std::function<double(const Model&)>;
using EpochObserver = std::function<void(const EpochRecord&)>;

/// Macro-F of the head's predictions on `dev`.
DevScorer macro_f_scorer(const TaskDataset& dev, std::size_t head);

/// Trains until EarlyStopping (or max_epochs) says stop, then restores the
/// parameters of the best dev epoch.
RunRecord train(Model& model, std::span<const TrainingTask> tasks, const DevScorer& dev,
                const TrainConfig& config, Rng rng, const EpochObserver& observer = {});

struct MetricSummary {
  double mean = 0.0;
  /// Sample standard deviation (n - 1); 0 for a single value.
  double std = 0.0;
};

MetricSummary summarize(std::span<const double> values);

/// Mean and std across seeds of best dev macro-F and of every test metric
/// present in all records (keys: dev_macro_f, test_macro_{precision,recall,f},
/// test_micro_{precision,recall,f}).
std::map<std::string, MetricSummary> multi_seed_report(std::span<const RunRecord> records);

struct GridCell {
  double weight = 0.0;
  std::vector<double> dev_scores;
  MetricSummary summary;
};

/// Highest mean, then lowest std, then lowest weight.
std::size_t select_best(std::span<const GridCell> cells);

}  // namespace framing
