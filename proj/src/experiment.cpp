// SPDX-License-Identifier: Apache-2.0
#include "framing/experiment.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "framing/error.hpp"

namespace framing {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

TaskDataset domain_dataset(const TaskDataset& source, const TaskDataset& target) {
  TaskDataset ds{"domain", LabelSet::domain(), {}};
  ds.instances.reserve(source.size() + target.size());
  for (const auto& inst : source.instances) {
    ds.instances.push_back(inst);
    ds.instances.back().labels = {0};
  }
  for (const auto& inst : target.instances) {
    ds.instances.push_back(inst);
    ds.instances.back().labels = {1};
  }
  return ds;
}

}  // namespace

const std::vector<std::string>& experiment_keys() {
  static const std::vector<std::string> k{"train",     "dev",        "test",
                                          "main_labels", "main_classes", "aux",
                                          "unlabeled", "embeddings", "embedding_dim",
                                          "embedding_seed"};
  return k;
}

KeyValues resolve_experiment_paths(KeyValues kv, const std::filesystem::path& base) {
  auto absolute = [&](const std::string& p) {
    return std::filesystem::absolute(resolve(base, p)).lexically_normal().string();
  };
  for (const char* key : {"train", "dev", "test", "unlabeled", "embeddings"}) {
    if (auto v = kv.get(key)) kv.set(key, absolute(*v));
  }
  if (kv.contains("aux")) {
    std::string out;
    for (const auto& entry : kv.get_list("aux")) {
      const auto a = entry.find(':');
      const auto b = a == std::string::npos ? a : entry.find(':', a + 1);
      if (b == std::string::npos) {
        throw ConfigError("'aux' entry '" + entry + "' is not name:label_set:path");
      }
      out += (out.empty() ? "" : ",") + entry.substr(0, b + 1) + absolute(entry.substr(b + 1));
    }
    kv.set("aux", out);
  }
  return kv;
}

ExperimentData load_experiment_data(const KeyValues& kv, const std::filesystem::path& base) {
  for (const char* key : {"train", "dev"}) {
    if (!kv.contains(key)) throw ConfigError(std::string("missing '") + key + "' corpus path");
  }
  LabelSet main_labels = LabelSet::by_name(kv.get_string("main_labels", "frames"));
  const auto k = kv.get_int("main_classes", 0);
  if (k < 0 || static_cast<std::size_t>(k) > main_labels.size()) {
    throw ConfigError("'main_classes' must lie in [0, " + std::to_string(main_labels.size()) + "]");
  }
  if (k > 0) main_labels = main_labels.first(static_cast<std::size_t>(k));

  auto load_main = [&](const char* key) {
    TaskDataset ds = load_corpus(resolve(base, *kv.get(key)), LabelSet::by_name(main_labels.name()));
    ds = restrict_labels(std::move(ds), main_labels);
    ds.name = key;
    if (ds.empty()) throw DataError(std::string("'") + key + "' has no instances in the label set");
    return ds;
  };

  ExperimentData data;
  data.train = load_main("train");
  data.dev = load_main("dev");
  if (kv.contains("test")) data.test = load_main("test");

  for (const auto& entry : kv.get_list("aux")) {
    const auto a = entry.find(':');
    const auto b = a == std::string::npos ? a : entry.find(':', a + 1);
    if (b == std::string::npos) {
      throw ConfigError("'aux' entry '" + entry + "' is not name:label_set:path");
    }
    const std::string name = entry.substr(0, a);
    if (name == "main" || name == "domain") throw ConfigError("aux task name '" + name + "' is reserved");
    TaskDataset ds = load_corpus(resolve(base, entry.substr(b + 1)),
                                 LabelSet::by_name(entry.substr(a + 1, b - a - 1)));
    ds.name = name;
    data.aux.push_back(std::move(ds));
  }
  if (kv.contains("unlabeled")) {
    CorpusOptions opts;
    opts.require_labels = false;
    data.unlabeled = load_corpus(resolve(base, *kv.get("unlabeled")), LabelSet::domain(), opts);
    data.unlabeled->name = "unlabeled";
  }

  std::vector<const TaskDataset*> all{&data.train, &data.dev};
  if (data.test) all.push_back(&*data.test);
  for (const auto& ds : data.aux) all.push_back(&ds);
  if (data.unlabeled) all.push_back(&*data.unlabeled);
  const auto vocab = build_vocabulary(all);
  const auto dim = kv.get_int("embedding_dim", 0);
  if (dim < 0) throw ConfigError("'embedding_dim' must be >= 0");
  if (kv.contains("embeddings")) {
    data.embeddings = load_embeddings(resolve(base, *kv.get("embeddings")), vocab,
                                      static_cast<std::size_t>(dim));
  } else {
    if (dim == 0) throw ConfigError("either 'embeddings' or 'embedding_dim' is required");
    Rng rng = Rng(static_cast<std::uint64_t>(kv.get_int("embedding_seed", 1))).derive("embeddings");
    data.embeddings = random_embeddings(vocab, static_cast<std::size_t>(dim), rng);
  }
  return data;
}

std::vector<HeadSpec> experiment_heads(const ExperimentData& data, const TrainConfig& config) {
  std::vector<HeadSpec> heads{{"main", data.train.labels, false, 1.0}};
  if (config.mode == Mode::baseline) return heads;
  if (config.mode == Mode::multitask && data.aux.empty()) {
    throw ConfigError("multitask mode needs at least one aux task");
  }
  if (config.mode == Mode::adversarial && !data.unlabeled) {
    throw ConfigError("adversarial mode needs an unlabeled target-domain corpus");
  }
  for (const auto& ds : data.aux) heads.push_back({ds.name, ds.labels, false, 1.0});
  if (config.mode == Mode::adversarial) {
    heads.push_back({"domain", LabelSet::domain(), true, config.lambda_rev});
  }
  return heads;
}

ExperimentRun run_experiment(const ExperimentData& data, const TrainConfig& config,
                             std::uint64_t seed, const EpochObserver& observer) {
  config.validate();

  const Rng root(seed);
  ModelShape shape;
  shape.hidden = config.hidden;
  shape.layers = config.layers;
  ExperimentRun run{{}, Model(data.embeddings, shape, experiment_heads(data, config),
                              root.derive("model"))};

  // Training copies live here; tasks point into them.
  std::vector<TaskDataset> owned;
  owned.reserve(2 + data.aux.size());
  owned.push_back(expand_multilabel(data.train));
  owned.back().name = "main";
  if (config.mode != Mode::baseline) {
    for (const auto& ds : data.aux) owned.push_back(expand_multilabel(ds));
    if (config.mode == Mode::adversarial) owned.push_back(domain_dataset(data.train, *data.unlabeled));
  }
  std::vector<TrainingTask> tasks;
  for (std::size_t i = 0; i < owned.size(); ++i) {
    const std::string name = i == 0 ? "main" : owned[i].name;
    tasks.push_back({name, &owned[i], run.model.head_index(name)});
  }

  run.record = train(run.model, tasks, macro_f_scorer(data.dev, 0), config, root.derive("train"),
                     observer);
  run.record.seed = seed;

  auto report = [&](const TaskDataset& ds) {
    const auto predictions = run.model.predict_labels(0, ds.instances);
    std::vector<std::vector<int>> gold;
    for (const auto& inst : ds.instances) gold.push_back(inst.labels);
    return evaluate(predictions, gold, data.train.labels.codes());
  };
  run.record.dev = report(data.dev);
  if (data.test) run.record.test = report(*data.test);
  return run;
}

std::vector<double> default_weight_grid() {
  return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
}

GridResult grid_search_weight(const ExperimentData& data, const TrainConfig& config,
                              const std::vector<double>& grid, std::size_t jobs,
                              const GridProgress& progress) {
  if (grid.empty()) throw ConfigError("empty weight grid");
  for (double w : grid) {
    TrainConfig c = config;
    c.main_weight = w;
    c.validate();
  }
  const std::size_t seeds = config.seeds.size();
  const std::size_t total = grid.size() * seeds;
  std::vector<double> scores(total, 0.0);
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= total) return;
      {
        std::lock_guard lock(mu);
        if (failure) return;
      }
      try {
        TrainConfig c = config;
        c.main_weight = grid[i / seeds];
        const std::uint64_t seed = config.seeds[i % seeds];
        ExperimentRun run = run_experiment(data, c, seed);
        scores[i] = run.record.best_dev_macro_f;
        if (progress) {
          std::lock_guard lock(mu);
          progress(grid[i / seeds], seed, run.record);
        }
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const std::size_t n = std::max<std::size_t>(1, std::min(jobs, total));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  GridResult result;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    GridCell cell;
    cell.weight = grid[g];
    cell.dev_scores.assign(scores.begin() + static_cast<std::ptrdiff_t>(g * seeds),
                           scores.begin() + static_cast<std::ptrdiff_t>((g + 1) * seeds));
    cell.summary = summarize(cell.dev_scores);
    result.cells.push_back(std::move(cell));
  }
  result.best = select_best(result.cells);
  return result;
}

}  // namespace framing
