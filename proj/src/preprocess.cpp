// SPDX-License-Identifier: Apache-2.0
#include "framing/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "framing/error.hpp"
#include "framing/tokenize.hpp"

namespace framing {

using nlohmann::json;

std::string clean_tweet(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string chunk;
  std::string out;
  while (in >> chunk) {
    if (chunk.front() == '@') continue;
    std::size_t cut = chunk.size();
    for (const char* prefix : {"http://", "https://", "www."}) {
      cut = std::min(cut, chunk.find(prefix));
    }
    chunk.resize(cut);
    if (chunk.empty()) continue;
    if (!out.empty()) out.push_back(' ');
    out += chunk;
  }
  return out;
}

std::vector<Instance> project_spans(const AnnotatedDocument& doc, const LabelSet& keep) {
  std::size_t length = doc.tokens.size();
  for (const auto& [start, end] : doc.sentences) {
    if (start >= end || end > length) {
      throw DataError("document " + doc.doc_id + ": sentence [" + std::to_string(start) + ", " +
                      std::to_string(end) + ") outside " + std::to_string(length) + " tokens");
    }
  }
  for (const auto& span : doc.spans) {
    if (span.start >= span.end || span.end > length) {
      throw DataError("document " + doc.doc_id + ": span [" + std::to_string(span.start) + ", " +
                      std::to_string(span.end) + ") outside " + std::to_string(length) +
                      " tokens");
    }
  }

  std::vector<Instance> out;
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    const auto [first, last] = doc.sentences[s];
    const std::size_t sentence_length = last - first;
    std::map<int, std::set<std::string>> voters;
    for (const auto& span : doc.spans) {
      const bool inside = span.start >= first && span.end <= last;
      const bool covers = 2 * (span.end - span.start) >= sentence_length;
      if (inside && covers) voters[span.label].insert(span.annotator);
    }
    Instance inst;
    for (const auto& [label, who] : voters) {
      if (who.size() >= 2 && keep.contains(label)) inst.labels.push_back(label);
    }
    if (inst.labels.empty()) continue;
    inst.id = doc.doc_id + "#s" + std::to_string(s);
    inst.tokens.assign(doc.tokens.begin() + static_cast<std::ptrdiff_t>(first),
                       doc.tokens.begin() + static_cast<std::ptrdiff_t>(last));
    inst.text = join_tokens(inst.tokens);
    inst.domain = doc.domain;
    inst.split = doc.split;
    out.push_back(std::move(inst));
  }
  return out;
}

namespace {

std::size_t index_value(const json& v, const std::string& source, std::size_t line) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw DataError(source, line, "token index must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::string label_text(const json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

template <typename Fn>
void for_each_json_line(std::istream& in, const std::string& source, Fn&& fn) {
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
    try {
      fn(obj, lineno);
    } catch (const json::exception& e) {
      throw DataError(source, lineno, e.what());
    }
  }
}

}  // namespace

std::vector<AnnotatedDocument> parse_span_documents(std::istream& in, const std::string& source) {
  std::vector<AnnotatedDocument> docs;
  for_each_json_line(in, source, [&](const json& obj, std::size_t line) {
    AnnotatedDocument doc;
    doc.doc_id = obj.at("doc_id").get<std::string>();
    if (obj.contains("tokens")) {
      doc.tokens = obj.at("tokens").get<std::vector<std::string>>();
    } else {
      doc.tokens = tokenize(obj.at("text").get<std::string>());
    }
    for (const json& s : obj.at("sentences")) {
      if (!s.is_array() || s.size() != 2) {
        throw DataError(source, line, "sentence boundary must be [start, end]");
      }
      doc.sentences.emplace_back(index_value(s[0], source, line), index_value(s[1], source, line));
    }
    for (const json& s : obj.at("spans")) {
      SpanAnnotation span;
      span.start = index_value(s.at("start"), source, line);
      span.end = index_value(s.at("end"), source, line);
      const json& label = s.at("label");
      if (label.is_number_integer()) {
        span.label = label.get<int>();
      } else {
        // Names are resolved against the frame set; unknown names are dropped later.
        const auto frames = LabelSet::frames();
        try {
          span.label = frames.parse(label_text(label));
        } catch (const LabelError&) {
          span.label = -1;
        }
      }
      span.annotator = label_text(s.at("annotator"));
      doc.spans.push_back(std::move(span));
    }
    if (obj.contains("domain")) doc.domain = parse_domain(obj.at("domain").get<std::string>());
    if (obj.contains("split")) doc.split = parse_split(obj.at("split").get<std::string>());
    docs.push_back(std::move(doc));
  });
  return docs;
}

std::vector<AnnotatedDocument> load_span_documents(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_span_documents(in, path.string());
}

int binarize_quality(const QualityAnnotation& q) {
  if (q.scores.size() != kQualityRatings) {
    throw DataError("annotation " + q.id + ": expected " + std::to_string(kQualityRatings) +
                    " ratings, got " + std::to_string(q.scores.size()));
  }
  const double mean = std::accumulate(q.scores.begin(), q.scores.end(), 0.0) /
                      static_cast<double>(q.scores.size());
  return mean >= 0.5 ? 1 : 0;
}

std::vector<QualityAnnotation> parse_quality(std::istream& in, const std::string& source) {
  std::vector<QualityAnnotation> out;
  for_each_json_line(in, source, [&](const json& obj, std::size_t line) {
    QualityAnnotation q;
    q.id = obj.at("id").get<std::string>();
    q.text = obj.at("text").get<std::string>();
    q.scores = obj.at("scores").get<std::vector<double>>();
    for (double s : q.scores) {
      if (!(s >= 0.0 && s <= 1.0)) throw DataError(source, line, "rating outside [0, 1]");
    }
    if (q.scores.size() != kQualityRatings) {
      throw DataError(source, line,
                      "expected " + std::to_string(kQualityRatings) + " ratings, got " +
                          std::to_string(q.scores.size()));
    }
    out.push_back(std::move(q));
  });
  return out;
}

std::vector<QualityAnnotation> load_quality(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_quality(in, path.string());
}

TaskDataset parse_tweets(std::istream& in, const std::string& source) {
  const LabelSet frames = LabelSet::frames();
  TaskDataset ds{"tweets", frames, {}};
  for_each_json_line(in, source, [&](const json& obj, std::size_t) {
    Instance inst;
    inst.id = label_text(obj.at("id"));
    inst.text = clean_tweet(obj.at("text").get<std::string>());
    inst.domain = Domain::twitter;
    if (obj.contains("split")) inst.split = parse_split(obj.at("split").get<std::string>());
    for (const json& l : obj.at("labels")) {
      int code = -1;
      try {
        code = l.is_number_integer() ? l.get<int>() : frames.parse(label_text(l));
      } catch (const LabelError&) {
        continue;
      }
      if (frames.contains(code)) inst.labels.push_back(code);
    }
    std::sort(inst.labels.begin(), inst.labels.end());
    inst.labels.erase(std::unique(inst.labels.begin(), inst.labels.end()), inst.labels.end());
    inst.tokens = tokenize(inst.text);
    if (inst.labels.empty() || inst.tokens.empty()) return;
    ds.instances.push_back(std::move(inst));
  });
  return ds;
}

TaskDataset load_tweets(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_tweets(in, path.string());
}

TaskDataset quality_dataset(const std::vector<QualityAnnotation>& annotations) {
  TaskDataset ds{"quality", LabelSet::quality(), {}};
  for (const auto& q : annotations) {
    Instance inst;
    inst.id = q.id;
    inst.text = q.text;
    inst.tokens = tokenize(q.text);
    inst.labels = {binarize_quality(q)};
    inst.domain = Domain::news;
    if (inst.tokens.empty()) throw DataError("annotation " + q.id + " has no tokens");
    ds.instances.push_back(std::move(inst));
  }
  return ds;
}

TaskDataset balance_binary(const TaskDataset& ds, Rng& rng) {
  if (ds.labels.size() != 2) throw ConfigError("balance_binary: label set is not binary");
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& labels = ds.instances[i].labels;
    if (labels.size() != 1) {
      throw DataError("balance_binary: instance " + ds.instances[i].id + " is not single-label");
    }
    by_class[ds.labels.index_of(labels[0])].push_back(i);
  }
  if (by_class[0].empty() || by_class[1].empty()) {
    throw DataError("balance_binary: a class has no instances (" +
                    std::to_string(by_class[0].size()) + ", " +
                    std::to_string(by_class[1].size()) + ")");
  }
  const std::size_t major = by_class[0].size() >= by_class[1].size() ? 0 : 1;
  const std::size_t minority = by_class[1 - major].size();
  const auto cap = static_cast<std::size_t>(std::floor(1.05 * static_cast<double>(minority)));

  std::vector<std::size_t>& pool = by_class[major];
  if (pool.size() > cap) {
    rng.shuffle(std::span(pool));
    pool.resize(cap);
  }
  std::vector<std::uint8_t> keep(ds.size(), 0);
  for (auto& cls : by_class) {
    for (std::size_t i : cls) keep[i] = 1;
  }
  TaskDataset out{ds.name, ds.labels, {}};
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (keep[i]) out.instances.push_back(ds.instances[i]);
  }
  return out;
}

}  // namespace framing
