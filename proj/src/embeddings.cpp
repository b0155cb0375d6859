// SPDX-License-Identifier: Apache-2.0
#include "framing/embeddings.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <unordered_set>

#include "framing/error.hpp"
#include "framing/keyvalue.hpp"

namespace framing {

EmbeddingTable::EmbeddingTable(std::vector<std::string> words, Tensor2 vectors)
    : words_(std::move(words)), vectors_(std::move(vectors)) {
  if (vectors_.rows() != words_.size() + 1) {
    throw ShapeError("embedding table needs " + std::to_string(words_.size() + 1) +
                     " rows (UNK + words), got " + std::to_string(vectors_.rows()));
  }
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], i + 1).second) {
      throw DataError("embedding table repeats word '" + words_[i] + "'");
    }
  }
}

std::size_t EmbeddingTable::id(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? kUnknownId : it->second;
}

EmbeddingTable parse_embeddings(std::istream& in, const std::vector<std::string>& vocab,
                                const std::string& source, std::size_t expected_dim) {
  const std::unordered_set<std::string> wanted(vocab.begin(), vocab.end());
  std::size_t dim = expected_dim;
  std::vector<std::string> words;
  std::vector<double> kept;
  std::vector<double> sum;
  std::size_t total = 0;
  std::unordered_set<std::string> seen;

  std::string line;
  std::size_t lineno = 0;
  std::vector<double> row;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(' ') == std::string::npos) continue;
    const std::size_t sp = line.find(' ');
    if (sp == std::string::npos || sp == 0) throw DataError(source, lineno, "expected 'word v1 ... vD'");
    std::string word = line.substr(0, sp);

    row.clear();
    const char* p = line.c_str() + sp;
    const char* end = line.c_str() + line.size();
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p >= end) break;
      char* next = nullptr;
      const double v = std::strtod(p, &next);
      if (next == p) throw DataError(source, lineno, "not a number in vector for '" + word + "'");
      row.push_back(v);
      p = next;
    }
    if (dim == 0) dim = row.size();
    if (row.size() != dim || dim == 0) {
      throw DataError(source, lineno,
                      "vector for '" + word + "' has " + std::to_string(row.size()) +
                          " values, expected " + std::to_string(dim));
    }
    if (sum.empty()) sum.assign(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) sum[i] += row[i];
    ++total;
    if ((wanted.empty() || wanted.count(word) != 0) && seen.insert(word).second) {
      words.push_back(std::move(word));
      kept.insert(kept.end(), row.begin(), row.end());
    }
  }
  if (total == 0) throw DataError("embedding file " + source + " has no vectors");

  Tensor2 vectors(words.size() + 1, dim);
  for (std::size_t i = 0; i < dim; ++i) vectors(0, i) = sum[i] / static_cast<double>(total);
  std::copy(kept.begin(), kept.end(), vectors.data() + dim);
  return EmbeddingTable(std::move(words), std::move(vectors));
}

EmbeddingTable load_embeddings(const std::filesystem::path& path,
                               const std::vector<std::string>& vocab, std::size_t expected_dim) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embeddings " + path.string());
  return parse_embeddings(in, vocab, path.string(), expected_dim);
}

void write_embeddings(std::ostream& out, const EmbeddingTable& table) {
  for (std::size_t i = 0; i < table.words().size(); ++i) {
    out << table.words()[i];
    for (double v : table.matrix().row(i + 1)) out << ' ' << format_double(v);
    out << '\n';
  }
}

EmbeddingTable random_embeddings(const std::vector<std::string>& vocab, std::size_t dim, Rng& rng) {
  std::vector<std::string> words;
  std::set<std::string> seen;
  for (const auto& w : vocab) {
    if (seen.insert(w).second) words.push_back(w);
  }
  Tensor2 vectors(words.size() + 1, dim);
  for (std::size_t r = 1; r < vectors.rows(); ++r) {
    for (double& v : vectors.row(r)) v = rng.uniform(-1.0, 1.0);
  }
  if (!words.empty()) {
    for (std::size_t c = 0; c < dim; ++c) {
      double s = 0.0;
      for (std::size_t r = 1; r < vectors.rows(); ++r) s += vectors(r, c);
      vectors(0, c) = s / static_cast<double>(words.size());
    }
  }
  return EmbeddingTable(std::move(words), std::move(vectors));
}

std::vector<std::string> build_vocabulary(const std::vector<const TaskDataset*>& datasets) {
  std::set<std::string> all;
  for (const TaskDataset* ds : datasets) {
    for (const auto& inst : ds->instances) all.insert(inst.tokens.begin(), inst.tokens.end());
  }
  return {all.begin(), all.end()};
}

}  // namespace framing
