// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "framing/corpus.hpp"
#include "framing/rng.hpp"
#include "framing/tensor.hpp"

namespace framing {

/// Frozen word vectors. Row 0 is the UNK vector; word i of words() is row i + 1.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  /// `vectors` has words.size() + 1 rows, UNK first.
  EmbeddingTable(std::vector<std::string> words, Tensor2 vectors);

  static constexpr std::size_t kUnknownId = 0;

  std::size_t dimension() const { return vectors_.cols(); }
  /// Rows including UNK.
  std::size_t rows() const { return vectors_.rows(); }
  const std::vector<std::string>& words() const { return words_; }
  const Tensor2& matrix() const { return vectors_; }

  /// Row for a word; kUnknownId when out of vocabulary.
  std::size_t id(std::string_view word) const;
  std::span<const double> vector(std::string_view word) const { return vectors_.row(id(word)); }
  bool contains(std::string_view word) const { return id(word) != kUnknownId; }

 private:
  std::vector<std::string> words_;
  Tensor2 vectors_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Text format, one `word v1 ... vD` per line. Words outside `vocab` are
/// skipped (an empty vocab keeps everything); UNK is the componentwise mean
/// of every vector in the file. All lines must share one dimension
/// (`expected_dim` when non-zero); violations raise DataError with the line.
EmbeddingTable parse_embeddings(std::istream& in, const std::vector<std::string>& vocab,
                                const std::string& source, std::size_t expected_dim = 0);
EmbeddingTable load_embeddings(const std::filesystem::path& path,
                               const std::vector<std::string>& vocab,
                               std::size_t expected_dim = 0);
void write_embeddings(std::ostream& out, const EmbeddingTable& table);

/// Vectors uniform in [-1, 1]; UNK is their mean.
EmbeddingTable random_embeddings(const std::vector<std::string>& vocab, std::size_t dim, Rng& rng);

/// Sorted distinct tokens of the given datasets.
std::vector<std::string> build_vocabulary(const std::vector<const TaskDataset*>& datasets);

}  // namespace framing
