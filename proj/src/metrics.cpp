// SPDX-License-Identifier: Apache-2.0
#include "framing/metrics.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "framing/error.hpp"
#include "framing/keyvalue.hpp"

namespace framing {

namespace {

std::size_t class_index(const std::vector<int>& classes, int code) {
  auto it = std::find(classes.begin(), classes.end(), code);
  if (it == classes.end()) throw LabelError("label " + std::to_string(code) + " is not scored");
  return static_cast<std::size_t>(it - classes.begin());
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

}  // namespace

ClassCounts& ConfusionCounts::at(int code) { return counts[class_index(classes, code)]; }
const ClassCounts& ConfusionCounts::at(int code) const {
  return counts[class_index(classes, code)];
}

ConfusionCounts score(std::span<const int> predictions, std::span<const std::vector<int>> gold,
                      const std::vector<int>& classes) {
  if (predictions.size() != gold.size()) {
    throw DataError("score: " + std::to_string(predictions.size()) + " predictions for " +
                    std::to_string(gold.size()) + " gold instances");
  }
  ConfusionCounts out;
  out.classes = classes;
  out.counts.assign(classes.size(), {});
  out.instances = predictions.size();
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const int predicted = predictions[i];
    const auto& g = gold[i];
    out.gold_labels += g.size();
    const bool hit = std::find(g.begin(), g.end(), predicted) != g.end();
    if (hit) {
      ++out.at(predicted).tp;
    } else {
      ++out.at(predicted).fp;
    }
    for (int code : g) {
      if (code != predicted) ++out.at(code).fn;
    }
  }
  return out;
}

const ClassScores& EvalReport::for_class(int code) const {
  for (const auto& c : per_class) {
    if (c.code == code) return c;
  }
  throw LabelError("report has no class " + std::to_string(code));
}

EvalReport prf(const ConfusionCounts& counts) {
  if (counts.classes.empty()) throw ConfigError("prf: no classes");
  EvalReport r;
  r.instances = counts.instances;
  r.gold_labels = counts.gold_labels;
  ClassCounts pooled;
  for (std::size_t i = 0; i < counts.classes.size(); ++i) {
    const ClassCounts& c = counts.counts[i];
    ClassScores s;
    s.code = counts.classes[i];
    s.counts = c;
    s.precision = ratio(c.tp, c.tp + c.fp);
    s.recall = ratio(c.tp, c.tp + c.fn);
    s.f = harmonic(s.precision, s.recall);
    r.macro_precision += s.precision;
    r.macro_recall += s.recall;
    r.macro_f += s.f;
    pooled.tp += c.tp;
    pooled.fp += c.fp;
    pooled.fn += c.fn;
    r.per_class.push_back(s);
  }
  const auto n = static_cast<double>(counts.classes.size());
  r.macro_precision /= n;
  r.macro_recall /= n;
  r.macro_f /= n;
  r.micro_precision = ratio(pooled.tp, pooled.tp + pooled.fp);
  r.micro_recall = ratio(pooled.tp, pooled.tp + pooled.fn);
  r.micro_f = harmonic(r.micro_precision, r.micro_recall);
  return r;
}

std::string to_json(const EvalReport& report) {
  nlohmann::json doc;
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& c : report.per_class) {
    classes.push_back({{"class", c.code},
                       {"precision", c.precision},
                       {"recall", c.recall},
                       {"f", c.f},
                       {"tp", c.counts.tp},
                       {"fp", c.counts.fp},
                       {"fn", c.counts.fn}});
  }
  doc["per_class"] = classes;
  doc["macro"] = {{"precision", report.macro_precision},
                  {"recall", report.macro_recall},
                  {"f", report.macro_f}};
  doc["micro"] = {{"precision", report.micro_precision},
                  {"recall", report.micro_recall},
                  {"f", report.micro_f}};
  doc["instances"] = report.instances;
  doc["gold_labels"] = report.gold_labels;
  doc["config"] = report.config;
  return doc.dump(2) + "\n";
}

std::string per_class_delta_csv(const EvalReport& system, const EvalReport& reference) {
  std::ostringstream out;
  out << "class,f,random_f,delta\n";
  for (const auto& c : system.per_class) {
    const double ref = reference.for_class(c.code).f;
    out << c.code << ',' << format_double(c.f) << ',' << format_double(ref) << ','
        << format_double(c.f - ref) << '\n';
  }
  return out.str();
}

std::optional<double> cohen_kappa(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw DataError("cohen_kappa: sequences differ in length");
  if (a.empty()) return std::nullopt;
  const auto n = static_cast<double>(a.size());
  std::map<int, std::size_t> count_a;
  std::map<int, std::size_t> count_b;
  std::size_t agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++count_a[a[i]];
    ++count_b[b[i]];
    if (a[i] == b[i]) ++agree;
  }
  double expected = 0.0;
  for (const auto& [code, ca] : count_a) {
    auto it = count_b.find(code);
    if (it != count_b.end()) {
      expected += (static_cast<double>(ca) / n) * (static_cast<double>(it->second) / n);
    }
  }
  if (expected >= 1.0) return std::nullopt;
  const double observed = static_cast<double>(agree) / n;
  return (observed - expected) / (1.0 - expected);
}

std::pair<double, double> agreement_macro_f(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw DataError("agreement_macro_f: sequences differ in length");
  std::set<int> used(a.begin(), a.end());
  used.insert(b.begin(), b.end());
  const std::vector<int> classes(used.begin(), used.end());
  if (classes.empty()) return {0.0, 0.0};
  auto as_gold = [](std::span<const int> labels) {
    std::vector<std::vector<int>> g;
    for (int l : labels) g.push_back({l});
    return g;
  };
  const auto gold_a = as_gold(a);
  const auto gold_b = as_gold(b);
  return {evaluate(b, gold_a, classes).macro_f, evaluate(a, gold_b, classes).macro_f};
}

}  // namespace framing
