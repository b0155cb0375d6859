// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "framing/corpus.hpp"
#include "framing/rng.hpp"

namespace framing {

/// Drops whitespace-delimited chunks that start with '@' and cuts URLs
/// (from "http://", "https://" or "www." to the end of the chunk). The
/// surviving chunks are rejoined with single spaces.
std::string clean_tweet(std::string_view text);

/// Tweet JSONL (`id`, `text`, `labels`, optional `split`): text passes
/// through clean_tweet, labels outside the frame set are dropped, and so are
/// tweets left without labels or tokens.
TaskDataset parse_tweets(std::istream& in, const std::string& source);
TaskDataset load_tweets(const std::filesystem::path& path);

/// Labeled token span; [start, end) in document token indices.
struct SpanAnnotation {
  std::size_t start = 0;
  std::size_t end = 0;
  int label = 0;
  std::string annotator;
};

/// A document with sentence boundaries and span annotations. Sentence
/// boundaries are [start, end) token ranges supplied with the data.
struct AnnotatedDocument {
  std::string doc_id;
  std::vector<std::string> tokens;
  std::vector<std::pair<std::size_t, std::size_t>> sentences;
  std::vector<SpanAnnotation> spans;
  Domain domain = Domain::news;
  Split split = Split::train;
};

/// Sentence-level instances from span annotations.
///
/// A span votes label l for a sentence when it lies inside the sentence and
/// covers at least half of the sentence's tokens. The sentence keeps l when
/// at least two distinct annotators voted for it. Labels outside `keep` are
/// dropped, and so are sentences left without labels. Spans outside the
/// document raise DataError.
std::vector<Instance> project_spans(const AnnotatedDocument& doc,
                                    const LabelSet& keep = LabelSet::frames());

/// Span-annotation JSONL: `doc_id`, `tokens` (or `text`), `sentences`
/// ([[start, end], ...]), `spans` ([{start, end, label, annotator}, ...]),
/// optional `domain` and `split`.
std::vector<AnnotatedDocument> load_span_documents(const std::filesystem::path& path);
std::vector<AnnotatedDocument> parse_span_documents(std::istream& in, const std::string& source);

inline constexpr std::size_t kQualityRatings = 7;

/// Crowd ratings for one sentence, each in [0, 1].
struct QualityAnnotation {
  std::string id;
  std::string text;
  std::vector<double> scores;
};

/// 1 when the mean rating is >= 0.5 (inclusive), else 0. Requires exactly
/// seven ratings.
int binarize_quality(const QualityAnnotation& q);

/// Quality JSONL: `id`, `text`, `scores` (seven numbers).
std::vector<QualityAnnotation> load_quality(const std::filesystem::path& path);
std::vector<QualityAnnotation> parse_quality(std::istream& in, const std::string& source);

/// Quality instances labeled by binarize_quality.
TaskDataset quality_dataset(const std::vector<QualityAnnotation>& annotations);

/// Downsamples the majority class of a binary dataset, uniformly at random,
/// to at most floor(1.05 * minority) instances. The minority class and the
/// relative order of kept instances are untouched. Throws DataError when a
/// class is empty.
TaskDataset balance_binary(const TaskDataset& ds, Rng& rng);

}  // namespace framing
