// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "framing/error.hpp"
#include "framing/experiment.hpp"
#include "framing/synth.hpp"
#include "framing/train.hpp"

using namespace framing;

namespace {

// Counts draws per task for `n` calls of sample_task.
std::vector<std::size_t> draw_counts(std::uint64_t seed, double w, std::size_t aux, std::size_t n) {
  Rng rng(seed);
  std::vector<std::size_t> counts(aux + 1, 0);
  for (std::size_t i = 0; i < n; ++i) ++counts.at(sample_task(rng, w, aux));
  return counts;
}

double three_sigma(double p, std::size_t n) {
  return 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

// A small model over a dataset's own vocabulary.
Model tiny_model(const std::vector<const TaskDataset*>& data, std::vector<HeadSpec> heads,
                 std::size_t hidden, std::uint64_t seed) {
  Rng emb_rng(seed + 1000);
  ModelShape shape;
  shape.hidden = hidden;
  return Model(random_embeddings(build_vocabulary(data), 8, emb_rng), shape, std::move(heads),
               Rng(seed));
}

TaskDataset one_instance() {
  Instance i;
  i.id = "only";
  i.tokens = {"w"};
  i.labels = {1};
  return {"main", LabelSet::frames(), {i}};
}

SynthCorpora small_synth(std::size_t per_class, std::size_t classes = 3) {
  SynthSpec s;
  s.classes = classes;
  s.per_class_count = per_class;
  s.target_per_class_count = 10;
  s.unlabeled_count = 30;
  s.max_length = 8;
  return synth_generate(s);
}

ExperimentData small_experiment() {
  auto c = small_synth(12);
  ExperimentData d;
  d.train = c.source;
  d.dev = select_split(c.target, Split::dev);
  d.test = select_split(c.target, Split::test);
  TaskDataset aux = c.source;
  aux.name = "aux";
  d.aux.push_back(std::move(aux));
  d.unlabeled = c.unlabeled;
  Rng emb_rng(5);
  d.embeddings = random_embeddings(c.vocabulary, 8, emb_rng);
  return d;
}

TrainConfig quick_config(Mode mode) {
  TrainConfig cfg;
  cfg.mode = mode;
  cfg.batch_size = 16;
  cfg.hidden = 4;
  cfg.lr = 0.3;
  cfg.min_epochs = 3;
  cfg.patience = 2;
  cfg.max_epochs = 8;
  return cfg;
}

}  // namespace

TEST_SUITE("train") {

TEST_CASE("sample_task: weight 1 always picks main") {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) CHECK(sample_task(rng, 1.0, 0) == 0);
  for (int i = 0; i < 1000; ++i) CHECK(sample_task(rng, 1.0, 3) == 0);
}

TEST_CASE("sample_task: Monte-Carlo frequencies") {
  const std::size_t n = 100000;
  const auto half = draw_counts(7, 0.5, 1, n);
  CHECK(std::abs(half[0] / double(n) - 0.5) <= 0.01);

  const auto adv = draw_counts(8, 0.3, 2, n);
  CHECK(std::abs(adv[0] / double(n) - 0.3) <= 0.01);
  CHECK(std::abs(adv[1] / double(n) - 0.35) <= 0.01);
  CHECK(std::abs(adv[2] / double(n) - 0.35) <= 0.01);
}

TEST_CASE("sample_task: invalid weights") {
  Rng rng(1);
  CHECK_THROWS_AS(sample_task(rng, 0.5, 0), ConfigError);
  CHECK_THROWS_AS(sample_task(rng, 0.0, 2), ConfigError);
  CHECK_THROWS_AS(sample_task(rng, 1.5, 2), ConfigError);
  CHECK_THROWS_AS(sample_task(rng, std::nan(""), 2), ConfigError);
}

TEST_CASE("property: task frequencies stay within 3 sigma of the coin weights") {
  // Each check fails with probability ~0.27% by chance, so over a few hundred
  // checks allow a small number of 3-sigma misses but no 5-sigma ones.
  Rng meta(99);
  const std::size_t n = 10000;
  std::size_t checks = 0;
  std::size_t misses = 0;
  auto check = [&](std::size_t count, double p) {
    const double dev = std::abs(static_cast<double>(count) / double(n) - p);
    ++checks;
    if (dev > three_sigma(p, n)) ++misses;
    CHECK(dev <= 5.0 / 3.0 * three_sigma(p, n));
  };
  for (int trial = 0; trial < 50; ++trial) {
    const double w = 0.05 + 0.9 * meta.uniform();
    const std::size_t k = 1 + meta.below(4);
    const auto counts = draw_counts(meta.next_u64(), w, k, n);
    check(counts[0], w);
    for (std::size_t t = 1; t <= k; ++t) check(counts[t], (1.0 - w) / static_cast<double>(k));
  }
  CAPTURE(checks);
  CHECK(misses <= checks / 50);
}

TEST_CASE("iterations per epoch") {
  CHECK(iterations_per_epoch(1280, 128, 2) == 20);
  CHECK(iterations_per_epoch(1281, 128, 2) == 22);
  CHECK(iterations_per_epoch(1, 128, 2) == 2);
  CHECK(iterations_per_epoch(1000, 128, 1) == 8);
  CHECK_THROWS_AS(iterations_per_epoch(0, 128, 2), DataError);
  CHECK_THROWS_AS(iterations_per_epoch(10, 0, 2), ConfigError);
  CHECK_THROWS_AS(iterations_per_epoch(10, 128, 0), ConfigError);
}

TEST_CASE("train config") {
  TrainConfig cfg;
  CHECK(cfg.batch_size == 128);
  CHECK(cfg.lr == 0.1);
  CHECK(cfg.weight_decay == 1e-7);
  CHECK(cfg.hidden == 100);
  CHECK(cfg.min_epochs == 80);
  CHECK(cfg.patience == 5);
  CHECK(cfg.epoch_factor == 2);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(cfg.lambda_rev == 1.0);
  CHECK(cfg.effective_main_weight() == 1.0);
  cfg.mode = Mode::multitask;
  CHECK(cfg.effective_main_weight() == 0.5);
  cfg.mode = Mode::adversarial;
  CHECK(cfg.effective_main_weight() == 0.3);

  KeyValues kv;
  kv.set("mode", "multitask");
  kv.set("main_weight", "0.7");
  kv.set("seeds", "4, 5");
  kv.set("patience", "3");
  kv.set("train", "ignored.jsonl");
  const auto parsed = TrainConfig::from_key_values(kv);
  CHECK(parsed.mode == Mode::multitask);
  CHECK(parsed.effective_main_weight() == 0.7);
  CHECK(parsed.seeds == std::vector<std::uint64_t>{4, 5});
  CHECK(parsed.patience == 3);
  KeyValues echo;
  parsed.write_to(echo);
  const auto again = TrainConfig::from_key_values(echo);
  KeyValues echo2;
  again.write_to(echo2);
  CHECK(echo.entries() == echo2.entries());

  auto bad = [](const std::string& key, const std::string& value) {
    KeyValues k;
    k.set(key, value);
    return TrainConfig::from_key_values(k);
  };
  CHECK_THROWS_AS(bad("mode", "joint"), ConfigError);
  CHECK_THROWS_AS(bad("patience", "0"), ConfigError);
  CHECK_THROWS_AS(bad("epoch_factor", "0"), ConfigError);
  CHECK_THROWS_AS(bad("main_weight", "0"), ConfigError);
  CHECK_THROWS_AS(bad("main_weight", "1.2"), ConfigError);
  CHECK_THROWS_AS(bad("lr", "fast"), ConfigError);
  CHECK_THROWS_AS(bad("seeds", ""), ConfigError);
  KeyValues base;
  base.set("mode", "baseline");
  base.set("main_weight", "0.5");
  CHECK_THROWS_AS(TrainConfig::from_key_values(base), ConfigError);
}

TEST_CASE("batch cycler reshuffles and never runs dry") {
  const TaskDataset ds = small_synth(5).source;  // 15 instances
  BatchCycler cycler(ds, 4, Rng(3));
  std::map<const Instance*, int> seen;
  for (int i = 0; i < 8; ++i) {
    const Batch& b = cycler.next();
    for (const Instance* p : b.items) ++seen[p];
  }
  // Two full passes of 4 batches each (4, 4, 4, 3).
  CHECK(cycler.passes() == 2);
  CHECK(seen.size() == 15);
  for (const auto& [p, n] : seen) CHECK(n == 2);
  TaskDataset empty{"e", LabelSet::frames(), {}};
  CHECK_THROWS_AS(BatchCycler(empty, 4, Rng(1)), DataError);
}

TEST_CASE("run_epoch: update count, baseline uses only main, deterministic") {
  const auto c = small_synth(20);  // 60 instances
  TaskDataset aux = c.source;
  aux.name = "aux";
  auto run = [&](double w) {
    Model m = tiny_model({&c.source}, {{"main", c.source.labels, false, 1.0},
                                        {"aux", c.source.labels, false, 1.0}},
                         4, 1);
    const std::vector<TrainingTask> tasks{{"main", &c.source, 0}, {"aux", &aux, 1}};
    std::vector<BatchCycler> cyclers;
    cyclers.emplace_back(c.source, 16, Rng(10));
    cyclers.emplace_back(aux, 16, Rng(11));
    TrainConfig cfg;
    cfg.mode = w == 1.0 ? Mode::baseline : Mode::multitask;
    cfg.main_weight = w;
    cfg.batch_size = 16;
    Rng schedule(4);
    const EpochStats stats = run_epoch(m, tasks, cyclers, cfg, schedule);
    return std::make_pair(stats, m.parameters().snapshot());
  };
  const auto [base, base_params] = run(1.0);
  CHECK(base.updates == 8);
  CHECK(base.task_updates == std::vector<std::size_t>{8, 0});
  CHECK(base.task_losses[0] > 0.0);
  CHECK(base.task_losses[1] == 0.0);

  const auto [mixed, mixed_params] = run(0.5);
  CHECK(mixed.updates == 8);
  CHECK(mixed.task_updates[0] + mixed.task_updates[1] == 8);
  const auto [again, again_params] = run(0.5);
  CHECK(again.task_updates == mixed.task_updates);
  CHECK(again.task_losses == mixed.task_losses);
  CHECK(again_params == mixed_params);
}

TEST_CASE("early stopping: a flat dev curve stops at min_epochs + patience") {
  EarlyStopping stop(80, 5);
  std::size_t epoch = 0;
  while (!stop.should_stop()) {
    ++epoch;
    stop.observe(epoch, 0.4);
    REQUIRE(epoch < 1000);
  }
  CHECK(epoch == 85);
  CHECK(stop.best_epoch() == 1);
}

TEST_CASE("early stopping: improvements keep training past min_epochs") {
  EarlyStopping stop(80, 5);
  std::size_t epoch = 0;
  for (; epoch < 92; ++epoch) {
    CHECK_FALSE(stop.should_stop());
    stop.observe(epoch + 1, 0.01 * static_cast<double>(epoch + 1));
  }
  CHECK_FALSE(stop.should_stop());
  CHECK(stop.best_epoch() == 92);
  for (std::size_t k = 1; k <= 5; ++k) {
    CHECK_FALSE(stop.should_stop());
    stop.observe(92 + k, 0.5);
  }
  CHECK(stop.should_stop());
  CHECK(stop.best_epoch() == 92);
}

TEST_CASE("early stopping: patience counts consecutive stale epochs") {
  EarlyStopping stop(2, 3);
  const std::vector<double> curve{0.1, 0.2, 0.2, 0.2, 0.3, 0.3, 0.3, 0.3};
  std::size_t epoch = 0;
  for (double s : curve) {
    stop.observe(++epoch, s);
    if (stop.should_stop()) break;
  }
  CHECK(epoch == 8);
  CHECK(stop.best_epoch() == 5);
  CHECK(stop.best_score() == 0.3);
  CHECK_THROWS_AS(EarlyStopping(80, 0), ConfigError);
}

TEST_CASE("train: flat curve trace") {
  const TaskDataset ds = one_instance();
  Model m = tiny_model({&ds}, {{"main", ds.labels, false, 1.0}}, 2, 1);
  const std::vector<TrainingTask> tasks{{"main", &ds, 0}};
  TrainConfig cfg;
  cfg.hidden = 2;
  std::size_t calls = 0;
  const RunRecord r = train(m, tasks, [&](const Model&) { ++calls; return 0.25; }, cfg, Rng(1));
  CHECK(r.history.size() == 85);
  CHECK(calls == 85);
  CHECK(r.best_epoch == 1);
  for (std::size_t e = 0; e < r.history.size(); ++e) {
    CHECK(r.history[e].epoch == e + 1);
    // ceil(1 / 128) * 2 updates per epoch.
    CHECK(r.history[e].updates == 2 * (e + 1));
  }
}

TEST_CASE("train: a strictly improving curve runs until it stops improving") {
  const TaskDataset ds = one_instance();
  Model m = tiny_model({&ds}, {{"main", ds.labels, false, 1.0}}, 2, 1);
  const std::vector<TrainingTask> tasks{{"main", &ds, 0}};
  TrainConfig cfg;
  cfg.hidden = 2;
  cfg.max_epochs = 0;
  std::size_t calls = 0;
  const RunRecord r = train(
      m, tasks,
      [&](const Model&) {
        ++calls;
        return calls <= 100 ? 0.001 * static_cast<double>(calls) : 0.0;
      },
      cfg, Rng(1));
  CHECK(r.history.size() == 105);
  CHECK(r.best_epoch == 100);
  cfg.max_epochs = 90;
  calls = 0;
  CHECK(train(m, tasks, [&](const Model&) { return 0.001 * static_cast<double>(++calls); }, cfg,
              Rng(1))
            .history.size() == 90);
}

TEST_CASE("train: the restored model scores the best dev value seen") {
  const auto c = small_synth(15);
  const TaskDataset dev = select_split(c.target, Split::dev);
  Model m = tiny_model({&c.source, &dev}, {{"main", c.source.labels, false, 1.0}}, 6, 3);
  const std::vector<TrainingTask> tasks{{"main", &c.source, 0}};
  TrainConfig cfg = quick_config(Mode::baseline);
  cfg.hidden = 6;
  cfg.min_epochs = 10;
  cfg.max_epochs = 25;
  const DevScorer scorer = macro_f_scorer(dev, 0);
  const RunRecord r = train(m, tasks, scorer, cfg, Rng(2));
  double best = 0.0;
  for (const auto& e : r.history) best = std::max(best, e.dev_macro_f);
  CHECK(r.best_dev_macro_f == best);
  CHECK(r.history.at(r.best_epoch - 1).dev_macro_f == best);
  CHECK(scorer(m) == best);
  CHECK(r.best_epoch <= r.history.size());
}

TEST_CASE("overfit: 50 instances of 2 classes reach 99% training accuracy") {
  const auto c = small_synth(25, 2);
  REQUIRE(c.source.size() == 50);
  Model m = tiny_model({&c.source}, {{"main", c.source.labels, false, 1.0}}, 16, 4);
  const std::vector<TrainingTask> tasks{{"main", &c.source, 0}};
  auto accuracy = [&](const Model& model) {
    const auto pred = model.predict_labels(0, c.source.instances);
    std::size_t ok = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) ok += pred[i] == c.source.instances[i].labels[0];
    return static_cast<double>(ok) / static_cast<double>(pred.size());
  };
  TrainConfig cfg;
  cfg.hidden = 16;
  cfg.batch_size = 10;
  cfg.lr = 0.5;
  cfg.min_epochs = 1;
  cfg.patience = 200;
  cfg.max_epochs = 200;
  train(m, tasks, accuracy, cfg, Rng(5));
  CHECK(accuracy(m) >= 0.99);
}

TEST_CASE("multitask with weight 1 is bit-identical to baseline") {
  const ExperimentData data = small_experiment();
  TrainConfig base = quick_config(Mode::baseline);
  TrainConfig multi = quick_config(Mode::multitask);
  multi.main_weight = 1.0;
  const auto a = run_experiment(data, base, 1);
  const auto b = run_experiment(data, multi, 1);
  REQUIRE(a.record.history.size() == b.record.history.size());
  for (std::size_t e = 0; e < a.record.history.size(); ++e) {
    CHECK(a.record.history[e].dev_macro_f == b.record.history[e].dev_macro_f);
    CHECK(a.record.history[e].task_losses[0] == b.record.history[e].task_losses[0]);
  }
  for (const auto& p : a.model.parameters().all()) {
    CAPTURE(p.name);
    CHECK(b.model.parameters().at(p.name).value == p.value);
  }
  CHECK(b.model.parameters().find("head.aux.W") != nullptr);
}

TEST_CASE("experiment heads per mode") {
  const ExperimentData data = small_experiment();
  auto names = [&](Mode mode) {
    std::vector<std::string> out;
    for (const auto& h : experiment_heads(data, quick_config(mode))) out.push_back(h.name);
    return out;
  };
  CHECK(names(Mode::baseline) == std::vector<std::string>{"main"});
  CHECK(names(Mode::multitask) == std::vector<std::string>{"main", "aux"});
  CHECK(names(Mode::adversarial) == std::vector<std::string>{"main", "aux", "domain"});
  TrainConfig adv = quick_config(Mode::adversarial);
  adv.lambda_rev = 0.4;
  const auto heads = experiment_heads(data, adv);
  CHECK(heads[2].adversarial);
  CHECK(heads[2].reversal_strength == 0.4);
  ExperimentData no_target = data;
  no_target.unlabeled.reset();
  CHECK_THROWS_AS(experiment_heads(no_target, adv), ConfigError);
}

TEST_CASE("whole-run determinism") {
  const ExperimentData data = small_experiment();
  const TrainConfig cfg = quick_config(Mode::adversarial);
  const auto a = run_experiment(data, cfg, 2);
  const auto b = run_experiment(data, cfg, 2);
  CHECK(a.model.parameters() == b.model.parameters());
  REQUIRE(a.record.history.size() == b.record.history.size());
  for (std::size_t e = 0; e < a.record.history.size(); ++e) {
    CHECK(a.record.history[e].task_losses == b.record.history[e].task_losses);
    CHECK(a.record.history[e].dev_macro_f == b.record.history[e].dev_macro_f);
  }
  REQUIRE(a.record.test.has_value());
  CHECK(a.record.test->macro_f == b.record.test->macro_f);
}

TEST_CASE("summaries across seeds") {
  const std::vector<double> three{0.50, 0.52, 0.54};
  const auto s = summarize(three);
  CHECK(s.mean == doctest::Approx(0.52).epsilon(1e-12));
  CHECK(s.std == doctest::Approx(0.02).epsilon(1e-9));
  const std::vector<double> one{0.7};
  CHECK(summarize(one).mean == 0.7);
  CHECK(summarize(one).std == 0.0);
  const std::vector<double> same{0.4, 0.4, 0.4};
  CHECK(summarize(same).std == 0.0);

  std::vector<RunRecord> records(3);
  for (std::size_t i = 0; i < 3; ++i) {
    records[i].best_dev_macro_f = three[i];
    records[i].history.push_back({});
  }
  auto report = multi_seed_report(records);
  CHECK(report.at("dev_macro_f").mean == doctest::Approx(0.52).epsilon(1e-12));
  CHECK(report.count("test_macro_f") == 0);
  for (auto& r : records) {
    r.test = EvalReport{};
    r.test->macro_f = 0.3;
  }
  report = multi_seed_report(records);
  CHECK(report.at("test_macro_f").mean == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(report.at("test_macro_f").std == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(report.count("test_micro_f") == 1);
}

TEST_CASE("grid cell selection") {
  std::vector<GridCell> cells(3);
  cells[0].weight = 0.5;
  cells[0].summary = {0.6, 0.02};
  cells[1].weight = 0.3;
  cells[1].summary = {0.6, 0.01};
  cells[2].weight = 0.7;
  cells[2].summary = {0.59, 0.0};
  CHECK(select_best(cells) == 1);
  cells[0].summary.std = 0.01;
  CHECK(select_best(cells) == 1);  // lower weight on a full tie
  cells[2].summary.mean = 0.61;
  CHECK(select_best(cells) == 2);
}

TEST_CASE("grid search: single value, and results independent of thread count") {
  const ExperimentData data = small_experiment();
  TrainConfig cfg = quick_config(Mode::multitask);
  cfg.seeds = {1, 2};
  const auto single = grid_search_weight(data, cfg, {0.4}, 1);
  REQUIRE(single.cells.size() == 1);
  CHECK(single.best == 0);
  CHECK(single.cells[0].weight == 0.4);
  CHECK(single.cells[0].dev_scores.size() == 2);

  std::size_t calls = 0;
  const auto serial = grid_search_weight(data, cfg, {0.3, 0.6}, 1,
                                         [&](double, std::uint64_t, const RunRecord&) { ++calls; });
  const auto parallel = grid_search_weight(data, cfg, {0.3, 0.6}, 3);
  CHECK(calls == 4);
  REQUIRE(parallel.cells.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(parallel.cells[i].weight == serial.cells[i].weight);
    CHECK(parallel.cells[i].dev_scores == serial.cells[i].dev_scores);
  }
  CHECK(parallel.best == serial.best);
  CHECK(default_weight_grid().size() == 9);
  CHECK(default_weight_grid().front() == 0.1);
  CHECK_THROWS_AS(grid_search_weight(data, quick_config(Mode::baseline), {0.5}, 1), ConfigError);
}

}  // TEST_SUITE
