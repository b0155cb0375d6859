// SPDX-License-Identifier: Apache-2.0
#include "framing/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "framing/baselines.hpp"
#include "framing/checkpoint.hpp"
#include "framing/error.hpp"
#include "framing/experiment.hpp"
#include "framing/metrics.hpp"
#include "framing/ops.hpp"
#include "framing/preprocess.hpp"
#include "framing/synth.hpp"
#include "framing/tokenize.hpp"

namespace framing {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<double> main_weight;
  std::optional<std::size_t> batch_size;
  std::optional<double> lr;
  std::optional<std::size_t> hidden;
  std::optional<std::size_t> min_epochs;
  std::optional<std::size_t> patience;
  std::optional<double> lambda_rev;
  std::size_t jobs = 1;
  std::string out_dir = "framing-out";

  std::string kind;
  std::vector<std::string> inputs;
  std::string input;
  std::string model;
  std::string corpus;
  std::string baseline;
  std::string train;
  std::string file_a;
  std::string file_b;
  std::string grid;
};

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

// A missing file is a data error; a malformed one is a config error.
KeyValues load_config(const std::string& path) {
  if (!fs::exists(path)) throw DataError("cannot open " + path);
  try {
    return KeyValues::load(path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
}

void print_report(std::ostream& out, const EvalReport& r, const LabelSet& labels) {
  out << "class\tP\tR\tF\n";
  for (const auto& c : r.per_class) {
    out << c.code << ' ' << labels.name_of(c.code) << '\t' << fixed(c.precision) << '\t'
        << fixed(c.recall) << '\t' << fixed(c.f) << '\n';
  }
  out << "macro\t" << fixed(r.macro_precision) << '\t' << fixed(r.macro_recall) << '\t'
      << fixed(r.macro_f) << '\n';
  out << "micro\t" << fixed(r.micro_precision) << '\t' << fixed(r.micro_recall) << '\t'
      << fixed(r.micro_f) << '\n';
}

std::vector<std::vector<int>> gold_of(const TaskDataset& ds) {
  std::vector<std::vector<int>> gold;
  gold.reserve(ds.size());
  for (const auto& inst : ds.instances) gold.push_back(inst.labels);
  return gold;
}

EvalReport random_reference(const TaskDataset& ds, std::uint64_t seed) {
  Rng rng = Rng(seed).derive("random-baseline");
  const auto predictions = baseline_random(ds.labels, ds.size(), rng);
  return evaluate(predictions, gold_of(ds), ds.labels.codes());
}

// Train/gridsearch config: file, then flags. Data paths become absolute so
// the echo replays from any directory.
struct TrainSetup {
  KeyValues echo;
  TrainConfig config;
  fs::path base;
};

TrainSetup train_setup(const Flags& f, const std::vector<std::string>& extra_keys = {}) {
  TrainSetup s;
  KeyValues kv;
  s.base = fs::current_path();
  if (!f.config.empty()) {
    kv = load_config(f.config);
    s.base = fs::absolute(f.config).parent_path();
  }
  if (f.seed) kv.set("seeds", std::to_string(*f.seed));
  if (f.mode) kv.set("mode", *f.mode);
  if (f.main_weight) kv.set("main_weight", format_double(*f.main_weight));
  if (f.batch_size) kv.set("batch_size", std::to_string(*f.batch_size));
  if (f.lr) kv.set("lr", format_double(*f.lr));
  if (f.hidden) kv.set("hidden", std::to_string(*f.hidden));
  if (f.min_epochs) kv.set("min_epochs", std::to_string(*f.min_epochs));
  if (f.patience) kv.set("patience", std::to_string(*f.patience));
  if (f.lambda_rev) kv.set("lambda_rev", format_double(*f.lambda_rev));

  std::vector<std::string> known = TrainConfig::keys();
  known.insert(known.end(), experiment_keys().begin(), experiment_keys().end());
  known.insert(known.end(), extra_keys.begin(), extra_keys.end());
  kv.require_known(known);
  s.config = TrainConfig::from_key_values(kv);
  s.echo = resolve_experiment_paths(kv, s.base);
  s.config.write_to(s.echo);
  return s;
}

std::string epoch_line(const EpochRecord& r) {
  ordered_json j;
  j["epoch"] = r.epoch;
  ordered_json losses = ordered_json::object();
  for (std::size_t i = 0; i < r.tasks.size(); ++i) losses[r.tasks[i]] = r.task_losses[i];
  j["task_losses"] = losses;
  j["dev_macro_f"] = r.dev_macro_f;
  j["timestamp"] = r.updates;
  return j.dump();
}

std::string run_record_json(const RunRecord& r) {
  ordered_json j;
  j["seed"] = r.seed;
  j["epochs"] = r.history.size();
  j["best_epoch"] = r.best_epoch;
  j["best_dev_macro_f"] = r.best_dev_macro_f;
  std::vector<double> curve;
  for (const auto& e : r.history) curve.push_back(e.dev_macro_f);
  j["dev_macro_f_history"] = curve;
  if (r.dev) j["dev"] = json::parse(to_json(*r.dev));
  if (r.test) j["test"] = json::parse(to_json(*r.test));
  return j.dump(2) + "\n";
}

int cmd_train(const Flags& f, std::ostream& out) {
  TrainSetup setup = train_setup(f);
  const fs::path dir(f.out_dir);
  fs::create_directories(dir);
  setup.echo.save(dir / "config.txt");
  const ExperimentData data = load_experiment_data(setup.echo, setup.base);
  const auto& labels = data.train.labels;

  std::vector<RunRecord> records;
  for (std::uint64_t seed : setup.config.seeds) {
    const fs::path run_dir =
        setup.config.seeds.size() == 1 ? dir : dir / ("seed-" + std::to_string(seed));
    fs::create_directories(run_dir);
    KeyValues echo = setup.echo;
    echo.set("seeds", std::to_string(seed));
    if (run_dir != dir) echo.save(run_dir / "config.txt");

    std::ofstream log(run_dir / "run_log.jsonl", std::ios::binary);
    if (!log) throw DataError("cannot write " + (run_dir / "run_log.jsonl").string());
    auto observer = [&](const EpochRecord& r) {
      log << epoch_line(r) << '\n';
      if (r.epoch % 10 == 0) {
        out << "seed " << seed << " epoch " << r.epoch << " dev macro-F " << fixed(r.dev_macro_f)
            << '\n';
      }
    };
    ExperimentRun run = run_experiment(data, setup.config, seed, observer);
    log.close();

    for (auto* report : {&run.record.dev, &run.record.test}) {
      if (*report) (*report)->config = echo.entries();
    }
    save_checkpoint(run_dir / "checkpoint.json", run.model, echo);
    write_text(run_dir / "run_record.json", run_record_json(run.record));
    write_text(run_dir / "dev_report.json", to_json(*run.record.dev) + "\n");
    const TaskDataset& scored = data.test ? *data.test : data.dev;
    const EvalReport& system = data.test ? *run.record.test : *run.record.dev;
    if (data.test) write_text(run_dir / "test_report.json", to_json(*run.record.test) + "\n");
    write_text(run_dir / "class_delta.csv",
               per_class_delta_csv(system, random_reference(scored, seed)));

    out << "seed " << seed << ": stopped after " << run.record.history.size()
        << " epochs, best epoch " << run.record.best_epoch << ", dev macro-F "
        << fixed(run.record.best_dev_macro_f) << " (" << fixed(run.record.wall_seconds, 1)
        << " s)\n";
    out << (data.test ? "test" : "dev") << " scores:\n";
    print_report(out, system, labels);
    records.push_back(std::move(run.record));
  }

  const auto summary = multi_seed_report(records);
  ordered_json j;
  for (const auto& [k, v] : summary) j[k] = {{"mean", v.mean}, {"std", v.std}};
  write_text(dir / "summary.json", j.dump(2) + "\n");
  out << "metric\tmean\tstd\n";
  for (const auto& [k, v] : summary) out << k << '\t' << fixed(v.mean) << '\t' << fixed(v.std) << '\n';
  return kExitOk;
}

int cmd_gridsearch(const Flags& f, std::ostream& out) {
  TrainSetup setup = train_setup(f, {"grid"});
  if (setup.config.mode == Mode::baseline) {
    throw ConfigError("gridsearch needs mode multitask or adversarial");
  }
  std::vector<double> grid = default_weight_grid();
  std::string grid_text = f.grid.empty() ? setup.echo.get_string("grid", "") : f.grid;
  if (!grid_text.empty()) {
    KeyValues g;
    g.set("grid", grid_text);
    try {
      grid = g.get_doubles("grid", {});
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
  std::string echo_grid;
  for (double w : grid) echo_grid += (echo_grid.empty() ? "" : ",") + format_double(w);
  setup.echo.set("grid", echo_grid);
  // The grid owns main_weight; the echoed value would be misleading.
  setup.echo.set("main_weight", format_double(grid.front()));

  const fs::path dir(f.out_dir);
  fs::create_directories(dir);
  setup.echo.save(dir / "config.txt");
  const ExperimentData data = load_experiment_data(setup.echo, setup.base);

  const GridResult result = grid_search_weight(
      data, setup.config, grid, f.jobs,
      [&](double w, std::uint64_t seed, const RunRecord& r) {
        out << "w " << format_double(w) << " seed " << seed << ": dev macro-F "
            << fixed(r.best_dev_macro_f) << " at epoch " << r.best_epoch << '\n';
      });

  std::ostringstream table;
  table << "weight\tmean_dev_macro_f\tstd\tscores\n";
  for (const auto& cell : result.cells) {
    table << format_double(cell.weight) << '\t' << format_double(cell.summary.mean) << '\t'
          << format_double(cell.summary.std) << '\t';
    for (std::size_t i = 0; i < cell.dev_scores.size(); ++i) {
      table << (i ? "," : "") << format_double(cell.dev_scores[i]);
    }
    table << '\n';
  }
  write_text(dir / "grid.tsv", table.str());

  KeyValues best = setup.echo;
  best.set("main_weight", format_double(result.cells[result.best].weight));
  KeyValues trimmed;
  for (const auto& [k, v] : best.entries()) {
    if (k != "grid") trimmed.set(k, v);
  }
  trimmed.save(dir / "best_config.txt");

  out << "weight\tmean\tstd\n";
  for (std::size_t i = 0; i < result.cells.size(); ++i) {
    const auto& c = result.cells[i];
    out << format_double(c.weight) << '\t' << fixed(c.summary.mean) << '\t' << fixed(c.summary.std)
        << (i == result.best ? "\t<- best" : "") << '\n';
  }
  return kExitOk;
}

int cmd_synth(const Flags& f, std::ostream& out) {
  KeyValues kv;
  if (!f.config.empty()) kv = load_config(f.config);
  if (f.seed) kv.set("seed", std::to_string(*f.seed));
  const SynthSpec spec = SynthSpec::from_key_values(kv);
  const SynthCorpora corpora = synth_generate(spec);

  const fs::path dir(f.out_dir);
  fs::create_directories(dir);
  spec.to_key_values().save(dir / "config.txt");
  TaskDataset dev = select_split(corpora.target, Split::dev);
  TaskDataset test = select_split(corpora.target, Split::test);
  dev.name = "dev";
  test.name = "test";
  save_corpus(dir / "source.jsonl", corpora.source);
  save_corpus(dir / "dev.jsonl", dev);
  save_corpus(dir / "test.jsonl", test);
  save_corpus(dir / "unlabeled.jsonl", corpora.unlabeled);
  const EmbeddingTable table = synth_embeddings(spec, corpora.vocabulary);
  std::ostringstream emb;
  write_embeddings(emb, table);
  write_text(dir / "embeddings.txt", emb.str());

  KeyValues train;
  train.set("train", "source.jsonl");
  train.set("dev", "dev.jsonl");
  train.set("test", "test.jsonl");
  train.set("unlabeled", "unlabeled.jsonl");
  train.set("embeddings", "embeddings.txt");
  train.set("main_classes", std::to_string(spec.classes));
  train.set("mode", "baseline");
  train.save(dir / "train.cfg");

  out << class_distribution_report(corpora.source) << class_distribution_report(dev)
      << class_distribution_report(test) << "unlabeled: " << corpora.unlabeled.size()
      << " instances\nwrote " << dir.string() << "/{source,dev,test,unlabeled}.jsonl, "
      << "embeddings.txt, train.cfg\n";
  return kExitOk;
}

int cmd_preprocess(const Flags& f, std::ostream& out) {
  const fs::path dir(f.out_dir);
  fs::create_directories(dir);
  KeyValues echo;
  echo.set("command", "preprocess");
  echo.set("kind", f.kind);
  std::string inputs;
  for (const auto& i : f.inputs) inputs += (inputs.empty() ? "" : ",") + fs::absolute(i).string();
  echo.set("inputs", inputs);

  TaskDataset ds;
  std::string file;
  std::string extra;
  if (f.kind == "spans") {
    ds = TaskDataset{"frames", LabelSet::frames(), {}};
    for (const auto& path : f.inputs) {
      for (const auto& doc : load_span_documents(path)) {
        for (auto& inst : project_spans(doc)) ds.instances.push_back(std::move(inst));
      }
    }
    file = "frames.jsonl";
  } else if (f.kind == "tweets") {
    ds = TaskDataset{"tweets", LabelSet::frames(), {}};
    for (const auto& path : f.inputs) {
      for (auto& inst : load_tweets(path).instances) ds.instances.push_back(std::move(inst));
    }
    file = "tweets.jsonl";
  } else if (f.kind == "quality") {
    std::vector<QualityAnnotation> all;
    for (const auto& path : f.inputs) {
      for (auto& q : load_quality(path)) all.push_back(std::move(q));
    }
    const TaskDataset raw = quality_dataset(all);
    const std::uint64_t seed = f.seed.value_or(1);
    echo.set("seed", std::to_string(seed));
    Rng rng = Rng(seed).derive("balance");
    ds = balance_binary(raw, rng);
    extra = "before balancing:\n" + class_distribution_report(raw);
    file = "quality.jsonl";
  } else {
    throw ConfigError("--kind must be spans, tweets or quality");
  }
  if (ds.empty()) throw DataError("preprocess produced no instances");
  echo.save(dir / "config.txt");
  save_corpus(dir / file, ds);
  const std::string report = extra + class_distribution_report(ds);
  write_text(dir / "report.txt", report);
  out << report << "wrote " << (dir / file).string() << '\n';
  return kExitOk;
}

int cmd_evaluate(const Flags& f, std::ostream& out) {
  if (f.model.empty() == f.baseline.empty()) {
    throw ConfigError("evaluate needs exactly one of --model or --baseline");
  }
  const fs::path dir(f.out_dir);
  fs::create_directories(dir);
  KeyValues echo;
  echo.set("command", "evaluate");
  echo.set("corpus", fs::absolute(f.corpus).string());
  const std::uint64_t seed = f.seed.value_or(1);
  echo.set("seed", std::to_string(seed));

  std::vector<int> predictions;
  TaskDataset test;
  if (!f.model.empty()) {
    echo.set("model", fs::absolute(f.model).string());
    const Checkpoint ckpt = load_checkpoint(f.model);
    const LabelSet& labels = ckpt.model.heads()[0].labels;
    test = restrict_labels(load_corpus(f.corpus, LabelSet::by_name(labels.name())), labels);
    predictions = ckpt.model.predict_labels(0, test.instances);
  } else {
    echo.set("baseline", f.baseline);
    test = load_corpus(f.corpus, LabelSet::frames());
    if (f.baseline == "random") {
      Rng rng = Rng(seed).derive("random-baseline");
      predictions = baseline_random(test.labels, test.size(), rng);
    } else if (f.baseline == "majority" || f.baseline == "tfidf") {
      if (f.train.empty()) throw ConfigError("--baseline " + f.baseline + " needs --train");
      echo.set("train", fs::absolute(f.train).string());
      const TaskDataset train = load_corpus(f.train, LabelSet::frames());
      if (f.baseline == "majority") {
        predictions = baseline_majority(train, test);
      } else {
        SoftmaxRegressionConfig cfg;
        cfg.seed = seed;
        predictions = tfidf_softmax_baseline(train, test, cfg);
      }
    } else {
      throw ConfigError("--baseline must be random, majority or tfidf");
    }
  }
  echo.save(dir / "config.txt");
  EvalReport report = evaluate(predictions, gold_of(test), test.labels.codes());
  report.config = echo.entries();
  write_text(dir / "report.json", to_json(report) + "\n");
  write_text(dir / "class_delta.csv", per_class_delta_csv(report, random_reference(test, seed)));
  out << test.size() << " instances, " << report.gold_labels << " gold labels\n";
  print_report(out, report, test.labels);
  return kExitOk;
}

int cmd_predict(const Flags& f, std::ostream& out) {
  const Checkpoint ckpt = load_checkpoint(f.model);
  const Model& model = ckpt.model;
  std::ifstream file;
  std::istream* in = &std::cin;
  if (f.input != "-") {
    file.open(f.input);
    if (!file) throw DataError("cannot open " + f.input);
    in = &file;
  }
  const fs::path dir(f.out_dir);
  fs::create_directories(dir);
  KeyValues echo;
  echo.set("command", "predict");
  echo.set("model", fs::absolute(f.model).string());
  echo.set("input", f.input == "-" ? "-" : fs::absolute(f.input).string());
  echo.save(dir / "config.txt");

  const auto& codes = model.heads()[0].labels.codes();
  std::ostringstream table;
  table << "code";
  for (int c : codes) table << "\tp_" << c;
  table << '\n';
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(*in, line)) {
    ++lineno;
    const auto tokens = tokenize(line);
    if (tokens.empty()) throw DataError(f.input, lineno, "line has no tokens");
    const auto probs = model.predict(0, tokens);
    table << codes[argmax(probs)];
    for (double p : probs) table << '\t' << format_double(p);
    table << '\n';
  }
  write_text(dir / "predictions.tsv", table.str());
  out << table.str();
  return kExitOk;
}

std::vector<int> read_label_lines(const std::string& path, const LabelSet& labels) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<int> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    try {
      out.push_back(labels.parse(t));
    } catch (const LabelError& e) {
      throw DataError(path, lineno, e.what());
    }
  }
  return out;
}

int cmd_agreement(const Flags& f, std::ostream& out) {
  const LabelSet frames = LabelSet::frames();
  const auto a = read_label_lines(f.file_a, frames);
  const auto b = read_label_lines(f.file_b, frames);
  if (a.size() != b.size()) {
    throw DataError("annotation files differ in length (" + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + ")");
  }
  const auto kappa = cohen_kappa(a, b);
  const auto [fa, fb] = agreement_macro_f(a, b);

  const fs::path dir(f.out_dir);
  fs::create_directories(dir);
  KeyValues echo;
  echo.set("command", "agreement");
  echo.set("a", fs::absolute(f.file_a).string());
  echo.set("b", fs::absolute(f.file_b).string());
  echo.save(dir / "config.txt");
  ordered_json j;
  j["items"] = a.size();
  j["kappa"] = kappa ? json(*kappa) : json(nullptr);
  j["macro_f_a_gold"] = fa;
  j["macro_f_b_gold"] = fb;
  write_text(dir / "agreement.json", j.dump(2) + "\n");

  out << "items\t" << a.size() << '\n';
  out << "kappa\t" << (kappa ? fixed(*kappa) : std::string("undefined")) << '\n';
  out << "macro-F (a as gold)\t" << fixed(fa) << '\n';
  out << "macro-F (b as gold)\t" << fixed(fb) << '\n';
  return kExitOk;
}

void add_out_dir(CLI::App* app, Flags& f) {
  app->add_option("--out-dir", f.out_dir, "Directory for outputs and the config echo");
}

void add_training_flags(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "Key-value config file");
  app->add_option("--seed", f.seed, "Single seed (overrides the config's seeds)");
  app->add_option("--mode", f.mode, "baseline, multitask or adversarial");
  app->add_option("--main-weight", f.main_weight, "Probability of a main-task batch");
  app->add_option("--batch-size", f.batch_size);
  app->add_option("--lr", f.lr);
  app->add_option("--hidden", f.hidden);
  app->add_option("--min-epochs", f.min_epochs);
  app->add_option("--patience", f.patience);
  app->add_option("--lambda-rev", f.lambda_rev, "Gradient reversal strength");
  add_out_dir(app, f);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Flags f;
  CLI::App app{"Frame classification with multi-task and adversarial training", "framing"};
  app.require_subcommand(1);

  auto* preprocess = app.add_subcommand("preprocess", "Build corpora from raw annotations");
  preprocess->add_option("--kind", f.kind, "spans, tweets or quality")->required();
  preprocess->add_option("--input", f.inputs, "Input JSONL (repeatable)")->required();
  preprocess->add_option("--seed", f.seed, "Seed for quality balancing");
  add_out_dir(preprocess, f);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic domain-shift corpus");
  synth->add_option("--config", f.config, "Synthetic spec file");
  synth->add_option("--seed", f.seed);
  add_out_dir(synth, f);

  auto* train = app.add_subcommand("train", "Train one model per seed");
  add_training_flags(train, f);

  auto* gridsearch = app.add_subcommand("gridsearch", "Grid search over the main-task weight");
  add_training_flags(gridsearch, f);
  gridsearch->add_option("--grid", f.grid, "Comma-separated weights (default 0.1..0.9)");
  gridsearch->add_option("--jobs", f.jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a model or a baseline on a corpus");
  evaluate_cmd->add_option("--model", f.model, "Checkpoint");
  evaluate_cmd->add_option("--baseline", f.baseline, "random, majority or tfidf");
  evaluate_cmd->add_option("--train", f.train, "Training corpus for majority/tfidf");
  evaluate_cmd->add_option("--corpus", f.corpus, "Corpus to score")->required();
  evaluate_cmd->add_option("--seed", f.seed);
  add_out_dir(evaluate_cmd, f);

  auto* predict = app.add_subcommand("predict", "Predict a frame for each input line");
  predict->add_option("--model", f.model, "Checkpoint")->required();
  predict->add_option("--input", f.input, "Text file, one instance per line; - for stdin")
      ->required();
  add_out_dir(predict, f);

  auto* agreement = app.add_subcommand("agreement", "Inter-annotator agreement");
  agreement->add_option("--a", f.file_a, "Labels of annotator a, one per line")->required();
  agreement->add_option("--b", f.file_b, "Labels of annotator b, one per line")->required();
  add_out_dir(agreement, f);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*preprocess) return cmd_preprocess(f, out);
    if (*synth) return cmd_synth(f, out);
    if (*train) return cmd_train(f, out);
    if (*gridsearch) return cmd_gridsearch(f, out);
    if (*evaluate_cmd) return cmd_evaluate(f, out);
    if (*predict) return cmd_predict(f, out);
    if (*agreement) return cmd_agreement(f, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace framing
