// SPDX-License-Identifier: Apache-2.0
#include "framing/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "framing/error.hpp"
#include "framing/tokenize.hpp"

namespace framing {

using nlohmann::json;

std::string_view to_string(Domain d) {
  switch (d) {
    case Domain::news: return "news";
    case Domain::twitter: return "twitter";
    case Domain::online_disc: return "online_disc";
  }
  return "news";
}

std::string_view to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
  }
  return "train";
}

Domain parse_domain(std::string_view text) {
  if (text == "news") return Domain::news;
  if (text == "twitter") return Domain::twitter;
  if (text == "online_disc") return Domain::online_disc;
  throw DataError("unknown domain '" + std::string(text) + "'");
}

Split parse_split(std::string_view text) {
  if (text == "train") return Split::train;
  if (text == "dev") return Split::dev;
  if (text == "test") return Split::test;
  throw DataError("unknown split '" + std::string(text) + "'");
}

std::vector<std::size_t> TaskDataset::class_counts() const {
  std::vector<std::size_t> counts(labels.size(), 0);
  for (const auto& inst : instances) {
    for (int code : inst.labels) ++counts[labels.index_of(code)];
  }
  return counts;
}

std::size_t TaskDataset::multi_label_count() const {
  return static_cast<std::size_t>(std::count_if(
      instances.begin(), instances.end(), [](const Instance& i) { return i.labels.size() > 1; }));
}

namespace {

const json& field(const json& obj, const char* key, const std::string& source, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) throw DataError(source, line, std::string("missing field '") + key + "'");
  return *it;
}

std::string string_field(const json& obj, const char* key, const std::string& source,
                         std::size_t line) {
  const json& v = field(obj, key, source, line);
  if (!v.is_string()) {
    throw DataError(source, line, std::string("field '") + key + "' must be a string");
  }
  return v.get<std::string>();
}

Instance parse_instance(const json& obj, const LabelSet& labels, const std::string& source,
                        std::size_t line, const CorpusOptions& options) {
  if (!obj.is_object()) throw DataError(source, line, "expected a JSON object");
  Instance inst;
  inst.id = string_field(obj, "id", source, line);
  inst.text = string_field(obj, "text", source, line);
  try {
    inst.domain = parse_domain(string_field(obj, "domain", source, line));
    inst.split = parse_split(string_field(obj, "split", source, line));
  } catch (const DataError& e) {
    if (std::string(e.what()).rfind(source, 0) == 0) throw;
    throw DataError(source, line, e.what());
  }

  const json& ls = field(obj, "labels", source, line);
  if (!ls.is_array()) throw DataError(source, line, "field 'labels' must be an array");
  for (const json& l : ls) {
    try {
      if (l.is_number_integer()) {
        const int code = l.get<int>();
        labels.index_of(code);
        inst.labels.push_back(code);
      } else if (l.is_string()) {
        inst.labels.push_back(labels.parse(l.get<std::string>()));
      } else {
        throw DataError(source, line, "labels must be integers or strings");
      }
    } catch (const LabelError& e) {
      throw LabelError(source + ":" + std::to_string(line) + ": " + e.what());
    }
  }
  std::sort(inst.labels.begin(), inst.labels.end());
  inst.labels.erase(std::unique(inst.labels.begin(), inst.labels.end()), inst.labels.end());
  if (options.require_labels && inst.labels.empty()) {
    throw DataError(source, line, "instance '" + inst.id + "' has no labels");
  }

  if (auto it = obj.find("tokens"); it != obj.end()) {
    if (!it->is_array()) throw DataError(source, line, "field 'tokens' must be an array");
    for (const json& t : *it) {
      if (!t.is_string()) throw DataError(source, line, "tokens must be strings");
      inst.tokens.push_back(t.get<std::string>());
    }
  } else {
    inst.tokens = tokenize(inst.text);
  }
  if (inst.tokens.empty()) {
    throw DataError(source, line, "instance '" + inst.id + "' has no tokens");
  }
  return inst;
}

}  // namespace

TaskDataset parse_corpus(std::istream& in, const LabelSet& labels, const std::string& source,
                         const CorpusOptions& options) {
  TaskDataset ds;
  ds.name = std::filesystem::path(source).stem().string();
  ds.labels = labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(source, lineno, std::string("malformed JSON: ") + e.what());
    }
    ds.instances.push_back(parse_instance(obj, labels, source, lineno, options));
  }
  if (ds.instances.empty()) throw DataError("corpus " + source + " is empty");
  return ds;
}

TaskDataset load_corpus(const std::filesystem::path& path, const LabelSet& labels,
                        const CorpusOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus " + path.string());
  return parse_corpus(in, labels, path.string(), options);
}

void write_corpus(std::ostream& out, const TaskDataset& ds) {
  for (const auto& inst : ds.instances) {
    json obj;
    obj["id"] = inst.id;
    obj["text"] = inst.text;
    obj["tokens"] = inst.tokens;
    obj["labels"] = inst.labels;
    obj["domain"] = to_string(inst.domain);
    obj["split"] = to_string(inst.split);
    out << obj.dump() << '\n';
  }
}

void save_corpus(const std::filesystem::path& path, const TaskDataset& ds) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write corpus " + path.string());
  write_corpus(out, ds);
}

std::string class_distribution_report(const TaskDataset& ds) {
  std::ostringstream out;
  const auto counts = ds.class_counts();
  out << "dataset " << ds.name << ": " << ds.size() << " instances\n";
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out << "  " << ds.labels.codes()[i] << "\t" << ds.labels.names()[i] << "\t" << counts[i]
        << "\n";
  }
  out << "  labels\t" << std::accumulate(counts.begin(), counts.end(), std::size_t{0}) << "\n";
  out << "  multi\t" << ds.multi_label_count() << "\n";
  return out.str();
}

TaskDataset expand_multilabel(const TaskDataset& ds) {
  TaskDataset out{ds.name, ds.labels, {}};
  for (const auto& inst : ds.instances) {
    for (int code : inst.labels) {
      Instance copy = inst;
      copy.labels = {code};
      out.instances.push_back(std::move(copy));
    }
  }
  return out;
}

TaskDataset select_split(const TaskDataset& ds, Split split) {
  TaskDataset out{ds.name, ds.labels, {}};
  std::copy_if(ds.instances.begin(), ds.instances.end(), std::back_inserter(out.instances),
               [&](const Instance& i) { return i.split == split; });
  return out;
}

Batch make_batch(std::vector<const Instance*> items) {
  Batch b;
  b.items = std::move(items);
  for (const Instance* inst : b.items) {
    b.lengths.push_back(inst->tokens.size());
    b.max_length = std::max(b.max_length, inst->tokens.size());
  }
  return b;
}

std::vector<Batch> batches(const TaskDataset& ds, std::size_t batch_size, Rng& rng) {
  if (batch_size == 0) throw ConfigError("batch size must be >= 1");
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span(order));
  std::vector<Batch> out;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    std::vector<const Instance*> items;
    for (std::size_t i = start; i < std::min(order.size(), start + batch_size); ++i) {
      items.push_back(&ds.instances[order[i]]);
    }
    out.push_back(make_batch(std::move(items)));
  }
  return out;
}

TaskDataset restrict_labels(TaskDataset ds, const LabelSet& labels) {
  ds.labels = labels;
  std::vector<Instance> kept;
  for (auto& inst : ds.instances) {
    std::vector<int> l;
    for (int c : inst.labels) {
      if (labels.contains(c)) l.push_back(c);
    }
    if (l.empty()) continue;
    inst.labels = std::move(l);
    kept.push_back(std::move(inst));
  }
  ds.instances = std::move(kept);
  return ds;
}

}  // namespace framing
