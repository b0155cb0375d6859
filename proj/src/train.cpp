// SPDX-License-Identifier: Apache-2.0
#include "framing/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "framing/error.hpp"
#include "framing/optimizer.hpp"

namespace framing {

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::baseline: return "baseline";
    case Mode::multitask: return "multitask";
    case Mode::adversarial: return "adversarial";
  }
  return "baseline";
}

Mode parse_mode(std::string_view text) {
  if (text == "baseline") return Mode::baseline;
  if (text == "multitask") return Mode::multitask;
  if (text == "adversarial") return Mode::adversarial;
  throw ConfigError("unknown mode '" + std::string(text) + "'");
}

double TrainConfig::effective_main_weight() const {
  if (main_weight) return *main_weight;
  switch (mode) {
    case Mode::baseline: return 1.0;
    case Mode::multitask: return 0.5;
    case Mode::adversarial: return 0.3;
  }
  return 1.0;
}

void TrainConfig::validate() const {
  const double w = effective_main_weight();
  if (!(w > 0.0 && w <= 1.0)) throw ConfigError("main_weight must lie in (0, 1]");
  if (mode == Mode::baseline && w != 1.0) {
    throw ConfigError("baseline mode has no auxiliary task; main_weight must be 1");
  }
  if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (!(lr > 0.0)) throw ConfigError("lr must be > 0");
  if (weight_decay < 0.0) throw ConfigError("weight_decay must be >= 0");
  if (hidden == 0 || layers == 0) throw ConfigError("hidden and layers must be >= 1");
  if (patience == 0) throw ConfigError("patience must be >= 1");
  if (epoch_factor == 0) throw ConfigError("epoch_factor must be >= 1");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (lambda_rev < 0.0) throw ConfigError("lambda_rev must be >= 0");
}

const std::vector<std::string>& TrainConfig::keys() {
  static const std::vector<std::string> k{"mode",       "main_weight", "batch_size", "lr",
                                          "weight_decay", "hidden",    "layers",     "min_epochs",
                                          "patience",   "epoch_factor", "max_epochs", "seeds",
                                          "lambda_rev"};
  return k;
}

TrainConfig TrainConfig::from_key_values(const KeyValues& kv) {
  TrainConfig c;
  auto count = [&](const char* key, std::size_t fallback) {
    const auto v = kv.get_int(key, static_cast<std::int64_t>(fallback));
    if (v < 0) throw ConfigError(std::string("'") + key + "' must be >= 0");
    return static_cast<std::size_t>(v);
  };
  c.mode = parse_mode(kv.get_string("mode", "baseline"));
  if (kv.contains("main_weight")) c.main_weight = kv.get_double("main_weight", 1.0);
  c.batch_size = count("batch_size", c.batch_size);
  c.lr = kv.get_double("lr", c.lr);
  c.weight_decay = kv.get_double("weight_decay", c.weight_decay);
  c.hidden = count("hidden", c.hidden);
  c.layers = count("layers", c.layers);
  c.min_epochs = count("min_epochs", c.min_epochs);
  c.patience = count("patience", c.patience);
  c.epoch_factor = count("epoch_factor", c.epoch_factor);
  c.max_epochs = count("max_epochs", c.max_epochs);
  if (kv.contains("seeds")) {
    c.seeds.clear();
    for (const auto& s : kv.get_list("seeds")) {
      try {
        std::size_t used = 0;
        c.seeds.push_back(std::stoull(s, &used));
        if (used != s.size()) throw std::invalid_argument(s);
      } catch (const std::exception&) {
        throw ConfigError("'seeds': '" + s + "' is not an unsigned integer");
      }
    }
  }
  c.lambda_rev = kv.get_double("lambda_rev", c.lambda_rev);
  c.validate();
  return c;
}

void TrainConfig::write_to(KeyValues& kv) const {
  kv.set("mode", std::string(to_string(mode)));
  kv.set("main_weight", format_double(effective_main_weight()));
  kv.set("batch_size", std::to_string(batch_size));
  kv.set("lr", format_double(lr));
  kv.set("weight_decay", format_double(weight_decay));
  kv.set("hidden", std::to_string(hidden));
  kv.set("layers", std::to_string(layers));
  kv.set("min_epochs", std::to_string(min_epochs));
  kv.set("patience", std::to_string(patience));
  kv.set("epoch_factor", std::to_string(epoch_factor));
  kv.set("max_epochs", std::to_string(max_epochs));
  std::string s;
  for (auto seed : seeds) s += (s.empty() ? "" : ",") + std::to_string(seed);
  kv.set("seeds", s);
  kv.set("lambda_rev", format_double(lambda_rev));
}

std::size_t sample_task(Rng& rng, double w_main, std::size_t aux_count) {
  if (!(w_main > 0.0 && w_main <= 1.0)) throw ConfigError("main weight must lie in (0, 1]");
  if (aux_count == 0 && w_main < 1.0) {
    throw ConfigError("main weight below 1 needs at least one auxiliary task");
  }
  if (rng.uniform() < w_main) return 0;
  return 1 + static_cast<std::size_t>(rng.below(aux_count));
}

std::size_t iterations_per_epoch(std::size_t main_size, std::size_t batch_size,
                                 std::size_t factor) {
  if (batch_size == 0) throw ConfigError("batch size must be >= 1");
  if (factor == 0) throw ConfigError("epoch factor must be >= 1");
  if (main_size == 0) throw DataError("main task has no instances");
  return factor * ((main_size + batch_size - 1) / batch_size);
}

BatchCycler::BatchCycler(const TaskDataset& data, std::size_t batch_size, Rng rng)
    : data_(&data), batch_size_(batch_size), rng_(rng) {
  if (data.empty()) throw DataError("task '" + data.name + "' has no instances");
}

const Batch& BatchCycler::next() {
  if (cursor_ == pass_.size()) {
    pass_ = batches(*data_, batch_size_, rng_);
    cursor_ = 0;
    ++passes_;
  }
  return pass_[cursor_++];
}

EpochStats run_epoch(Model& model, std::span<const TrainingTask> tasks,
                     std::vector<BatchCycler>& cyclers, const TrainConfig& config, Rng& schedule) {
  if (tasks.empty()) throw ConfigError("run_epoch: no tasks");
  if (cyclers.size() != tasks.size()) throw ConfigError("run_epoch: one cycler per task");
  EpochStats stats;
  stats.task_updates.assign(tasks.size(), 0);
  stats.task_losses.assign(tasks.size(), 0.0);
  const double w = config.effective_main_weight();
  const std::size_t iterations =
      iterations_per_epoch(tasks[0].data->size(), config.batch_size, config.epoch_factor);
  for (std::size_t it = 0; it < iterations; ++it) {
    const std::size_t t = sample_task(schedule, w, tasks.size() - 1);
    const Batch& batch = cyclers[t].next();
    TaskLoss result = model.task_loss_backward(tasks[t].head, batch);
    if (!std::isfinite(result.loss)) {
      throw NumericError("non-finite loss on task '" + tasks[t].name + "' at update " +
                         std::to_string(it + 1));
    }
    sgd_step(model.parameters(), result.grads, config.lr, config.weight_decay);
    stats.task_losses[t] += result.loss;
    ++stats.task_updates[t];
    ++stats.updates;
  }
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    if (stats.task_updates[t] > 0) {
      stats.task_losses[t] /= static_cast<double>(stats.task_updates[t]);
    }
  }
  return stats;
}

EarlyStopping::EarlyStopping(std::size_t min_epochs, std::size_t patience)
    : min_epochs_(min_epochs), patience_(patience) {
  if (patience == 0) throw ConfigError("patience must be >= 1");
}

bool EarlyStopping::observe(std::size_t epoch, double score) {
  last_epoch_ = epoch;
  if (!any_ || score > best_score_) {
    any_ = true;
    best_score_ = score;
    best_epoch_ = epoch;
    stale_ = 0;
    return true;
  }
  if (epoch > min_epochs_) ++stale_;
  return false;
}

bool EarlyStopping::should_stop() const {
  return last_epoch_ >= min_epochs_ && stale_ >= patience_;
}

DevScorer macro_f_scorer(const TaskDataset& dev, std::size_t head) {
  return [&dev, head](const Model& model) {
    const auto predictions = model.predict_labels(head, dev.instances);
    std::vector<std::vector<int>> gold;
    gold.reserve(dev.size());
    for (const auto& inst : dev.instances) gold.push_back(inst.labels);
    return evaluate(predictions, gold, model.heads()[head].labels.codes()).macro_f;
  };
}

RunRecord train(Model& model, std::span<const TrainingTask> tasks, const DevScorer& dev,
                const TrainConfig& config, Rng rng, const EpochObserver& observer) {
  config.validate();
  if (tasks.empty()) throw ConfigError("train: no tasks");
  const auto started = std::chrono::steady_clock::now();

  Rng schedule = rng.derive("schedule");
  std::vector<BatchCycler> cyclers;
  std::vector<std::string> names;
  for (const auto& task : tasks) {
    cyclers.emplace_back(*task.data, config.batch_size, rng.derive("batches:" + task.name));
    names.push_back(task.name);
  }

  RunRecord record;
  record.seed = rng.seed();
  EarlyStopping stopping(config.min_epochs, config.patience);
  std::vector<Tensor2> best = model.parameters().snapshot();
  std::size_t updates = 0;
  for (std::size_t epoch = 1;; ++epoch) {
    EpochStats stats = run_epoch(model, tasks, cyclers, config, schedule);
    updates += stats.updates;
    EpochRecord rec{epoch, names, stats.task_losses, dev(model), updates};
    if (stopping.observe(epoch, rec.dev_macro_f)) best = model.parameters().snapshot();
    record.history.push_back(rec);
    if (observer) observer(rec);
    if (stopping.should_stop()) break;
    if (config.max_epochs != 0 && epoch >= config.max_epochs) break;
  }
  model.parameters().restore(best);
  record.best_epoch = stopping.best_epoch();
  record.best_dev_macro_f = stopping.best_score();
  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return record;
}

MetricSummary summarize(std::span<const double> values) {
  MetricSummary s;
  if (values.empty()) return s;
  // Shifting by the first value keeps identical inputs exact (std 0).
  const double shift = values[0];
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v - shift;
  const double offset = sum / n;
  s.mean = shift + offset;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - shift - offset) * (v - shift - offset);
    s.std = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

std::map<std::string, MetricSummary> multi_seed_report(std::span<const RunRecord> records) {
  if (records.empty()) throw ConfigError("multi_seed_report: no runs");
  std::map<std::string, std::vector<double>> columns;
  const bool all_test = std::all_of(records.begin(), records.end(),
                                    [](const RunRecord& r) { return r.test.has_value(); });
  for (const auto& r : records) {
    columns["dev_macro_f"].push_back(r.best_dev_macro_f);
    if (all_test) {
      columns["test_macro_precision"].push_back(r.test->macro_precision);
      columns["test_macro_recall"].push_back(r.test->macro_recall);
      columns["test_macro_f"].push_back(r.test->macro_f);
      columns["test_micro_precision"].push_back(r.test->micro_precision);
      columns["test_micro_recall"].push_back(r.test->micro_recall);
      columns["test_micro_f"].push_back(r.test->micro_f);
    }
  }
  std::map<std::string, MetricSummary> out;
  for (const auto& [k, v] : columns) out[k] = summarize(v);
  return out;
}

std::size_t select_best(std::span<const GridCell> cells) {
  if (cells.empty()) throw ConfigError("select_best: empty grid");
  std::size_t best = 0;
  for (std::size_t i = 1; i < cells.size(); ++i) {
    const auto& a = cells[i].summary;
    const auto& b = cells[best].summary;
    const bool better =
        a.mean > b.mean ||
        (a.mean == b.mean &&
         (a.std < b.std || (a.std == b.std && cells[i].weight < cells[best].weight)));
    if (better) best = i;
  }
  return best;
}

}  // namespace framing
