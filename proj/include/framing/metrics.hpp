// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace framing {

struct ClassCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

/// Per-class counts, aligned with `classes`.
struct ConfusionCounts {
  std::vector<int> classes;
  std::vector<ClassCounts> counts;
  std::size_t instances = 0;
  std::size_t gold_labels = 0;

  ClassCounts& at(int code);
  const ClassCounts& at(int code) const;
};

/// One prediction per instance against a gold label set per instance:
/// a prediction inside the gold set is a TP for that class, otherwise a FP;
/// every gold label other than the prediction is a FN. Predictions and gold
/// labels must be in `classes`; lengths must match.
ConfusionCounts score(std::span<const int> predictions, std::span<const std::vector<int>> gold,
                      const std::vector<int>& classes);

struct ClassScores {
  int code = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
  ClassCounts counts;
};

struct EvalReport {
  std::vector<ClassScores> per_class;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f = 0.0;
  double micro_precision = 0.0;
  double micro_recall = 0.0;
  double micro_f = 0.0;
  std::size_t instances = 0;
  std::size_t gold_labels = 0;
  std::map<std::string, std::string> config;

  const ClassScores& for_class(int code) const;
};

/// P = TP/(TP+FP), R = TP/(TP+FN), F = 2PR/(P+R), with 0/0 taken as 0.
/// Macro values are unweighted means over the classes; micro values come
/// from the pooled counts.
EvalReport prf(const ConfusionCounts& counts);

inline EvalReport evaluate(std::span<const int> predictions,
                           std::span<const std::vector<int>> gold,
                           const std::vector<int>& classes) {
  return prf(score(predictions, gold, classes));
}

/// JSON object with per-class and aggregate scores plus the config echo.
std::string to_json(const EvalReport& report);
/// CSV `class,f,random_f,delta` with the per-class F gain over a reference
/// (normally the random baseline).
std::string per_class_delta_csv(const EvalReport& system, const EvalReport& reference);

/// Cohen's kappa for two aligned single-label annotations. Returns nullopt
/// when chance agreement is 1 (both annotators constant and equal) or the
/// sequences are empty.
std::optional<double> cohen_kappa(std::span<const int> a, std::span<const int> b);

/// Macro-F with `a` as gold and `b` as prediction, then the reverse. Macro
/// averages run over the labels used by either annotator.
std::pair<double, double> agreement_macro_f(std::span<const int> a, std::span<const int> b);

}  // namespace framing
