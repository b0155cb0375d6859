// SPDX-License-Identifier: Apache-2.0
#include "framing/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "framing/error.hpp"
#include "framing/tokenize.hpp"

namespace framing {

SynthSpec SynthSpec::from_key_values(const KeyValues& kv) {
  kv.require_known({"classes", "per_class_count", "target_per_class_count", "unlabeled_count",
                    "vocab_size", "keywords_per_class", "marker_count", "keyword_rate",
                    "marker_rate", "marker_offset", "min_length", "max_length", "shift", "seed",
                    "embedding_dim"});
  SynthSpec s;
  auto count = [&](const char* key, std::size_t fallback) {
    const auto v = kv.get_int(key, static_cast<std::int64_t>(fallback));
    if (v < 0) throw ConfigError(std::string("synth key '") + key + "' must be >= 0");
    return static_cast<std::size_t>(v);
  };
  s.classes = count("classes", s.classes);
  s.per_class_count = count("per_class_count", s.per_class_count);
  s.target_per_class_count = count("target_per_class_count", s.target_per_class_count);
  s.unlabeled_count = count("unlabeled_count", s.unlabeled_count);
  s.vocab_size = count("vocab_size", s.vocab_size);
  s.keywords_per_class = count("keywords_per_class", s.keywords_per_class);
  s.marker_count = count("marker_count", s.marker_count);
  s.keyword_rate = kv.get_double("keyword_rate", s.keyword_rate);
  s.marker_rate = kv.get_double("marker_rate", s.marker_rate);
  s.marker_offset = kv.get_double("marker_offset", s.marker_offset);
  s.min_length = count("min_length", s.min_length);
  s.max_length = count("max_length", s.max_length);
  s.shift = kv.get_double("shift", s.shift);
  s.seed = static_cast<std::uint64_t>(kv.get_int("seed", static_cast<std::int64_t>(s.seed)));
  s.embedding_dim = count("embedding_dim", s.embedding_dim);
  s.validate();
  return s;
}

KeyValues SynthSpec::to_key_values() const {
  KeyValues kv;
  kv.set("classes", std::to_string(classes));
  kv.set("per_class_count", std::to_string(per_class_count));
  kv.set("target_per_class_count", std::to_string(target_per_class_count));
  kv.set("unlabeled_count", std::to_string(unlabeled_count));
  kv.set("vocab_size", std::to_string(vocab_size));
  kv.set("keywords_per_class", std::to_string(keywords_per_class));
  kv.set("marker_count", std::to_string(marker_count));
  kv.set("keyword_rate", format_double(keyword_rate));
  kv.set("marker_rate", format_double(marker_rate));
  kv.set("marker_offset", format_double(marker_offset));
  kv.set("min_length", std::to_string(min_length));
  kv.set("max_length", std::to_string(max_length));
  kv.set("shift", format_double(shift));
  kv.set("seed", std::to_string(seed));
  kv.set("embedding_dim", std::to_string(embedding_dim));
  return kv;
}

void SynthSpec::validate() const {
  if (classes == 0) throw ConfigError("synth: zero classes");
  if (classes > LabelSet::frames().size()) {
    throw ConfigError("synth: at most " + std::to_string(LabelSet::frames().size()) +
                      " classes (one per frame)");
  }
  if (vocab_size == 0 || keywords_per_class == 0) throw ConfigError("synth: empty vocabulary");
  if (marker_count == 0) throw ConfigError("synth: marker_count must be >= 1");
  if (!(shift >= 0.0 && shift <= 1.0)) throw ConfigError("synth: shift must lie in [0, 1]");
  if (!(keyword_rate >= 0.0 && keyword_rate <= 1.0)) {
    throw ConfigError("synth: keyword_rate must lie in [0, 1]");
  }
  if (!(marker_rate > 0.0 && marker_rate <= 1.0)) {
    throw ConfigError("synth: marker_rate must lie in (0, 1]");
  }
  if (!(marker_offset >= 0.0 && std::isfinite(marker_offset))) {
    throw ConfigError("synth: marker_offset must be finite and >= 0");
  }
  if (min_length == 0 || min_length > max_length) throw ConfigError("synth: bad length range");
  if (embedding_dim == 0) throw ConfigError("synth: embedding_dim must be >= 1");
}

namespace {

std::string numbered(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%03zu", prefix, i);
  return buf;
}

/// Draws indices with probability proportional to 1/(rank+1).
class ZipfSampler {
 public:
  explicit ZipfSampler(std::size_t n) : cumulative_(n) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      total += 1.0 / static_cast<double>(i + 1);
      cumulative_[i] = total;
    }
    for (double& c : cumulative_) c /= total;
  }

  std::size_t operator()(Rng& rng) const {
    const double u = rng.uniform();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                 cumulative_.size() - 1);
  }

 private:
  std::vector<double> cumulative_;
};

struct Generator {
  const SynthSpec& spec;
  std::vector<std::vector<std::string>> keywords;
  std::vector<std::string> common;
  std::vector<std::string> source_markers;
  std::vector<std::string> target_markers;
  ZipfSampler keyword_sampler;
  ZipfSampler common_sampler;

  explicit Generator(const SynthSpec& s)
      : spec(s), keyword_sampler(s.keywords_per_class), common_sampler(s.vocab_size) {
    for (std::size_t c = 0; c < s.classes; ++c) {
      std::vector<std::string> kws;
      for (std::size_t j = 0; j < s.keywords_per_class; ++j) {
        kws.push_back("c" + std::to_string(c) + numbered("k", j));
      }
      keywords.push_back(std::move(kws));
    }
    for (std::size_t j = 0; j < s.vocab_size; ++j) common.push_back(numbered("w", j));
    for (std::size_t j = 0; j < s.marker_count; ++j) {
      source_markers.push_back(numbered("src", j));
      target_markers.push_back(numbered("tgt", j));
    }
  }

  std::vector<std::string> sentence(std::size_t cls, bool target, Rng& rng) const {
    const std::size_t span = spec.max_length - spec.min_length + 1;
    const std::size_t length = spec.min_length + rng.below(span);
    const auto markers = static_cast<std::size_t>(
        std::ceil(spec.shift * spec.marker_rate * static_cast<double>(length) - 1e-12));

    std::vector<std::size_t> positions(length);
    std::iota(positions.begin(), positions.end(), std::size_t{0});
    rng.shuffle(std::span(positions));
    std::vector<std::uint8_t> is_marker(length, 0);
    for (std::size_t i = 0; i < std::min(markers, length); ++i) is_marker[positions[i]] = 1;

    const auto& marker_pool = target ? target_markers : source_markers;
    std::vector<std::string> tokens;
    tokens.reserve(length);
    for (std::size_t i = 0; i < length; ++i) {
      if (is_marker[i]) {
        tokens.push_back(marker_pool[rng.below(marker_pool.size())]);
      } else if (rng.bernoulli(spec.keyword_rate)) {
        tokens.push_back(keywords[cls][keyword_sampler(rng)]);
      } else {
        tokens.push_back(common[common_sampler(rng)]);
      }
    }
    return tokens;
  }

  Instance instance(const std::string& id, std::size_t cls, const LabelSet& labels, Domain domain,
                    Split split, bool labeled, Rng& rng) const {
    Instance inst;
    inst.id = id;
    inst.tokens = sentence(cls, domain != Domain::news, rng);
    inst.text = join_tokens(inst.tokens);
    if (labeled) inst.labels = {labels.code_at(cls)};
    inst.domain = domain;
    inst.split = split;
    return inst;
  }
};

}  // namespace

SynthCorpora synth_generate(const SynthSpec& spec) {
  spec.validate();
  const LabelSet labels = LabelSet::frames().first(spec.classes);
  const Generator gen(spec);
  const Rng root(spec.seed);

  SynthCorpora out;
  out.source = TaskDataset{"synth_source", labels, {}};
  out.target = TaskDataset{"synth_target", labels, {}};
  out.unlabeled = TaskDataset{"synth_unlabeled", labels, {}};

  Rng src = root.derive("source");
  std::size_t n = 0;
  for (std::size_t c = 0; c < spec.classes; ++c) {
    for (std::size_t i = 0; i < spec.per_class_count; ++i) {
      out.source.instances.push_back(gen.instance(numbered("src-", ++n), c, labels, Domain::news,
                                                  Split::train, true, src));
    }
  }

  Rng tgt = root.derive("target");
  n = 0;
  for (std::size_t c = 0; c < spec.classes; ++c) {
    for (std::size_t i = 0; i < spec.target_per_class_count; ++i) {
      const Split split = i % 2 == 0 ? Split::dev : Split::test;
      out.target.instances.push_back(gen.instance(numbered("tgt-", ++n), c, labels,
                                                  Domain::online_disc, split, true, tgt));
    }
  }

  Rng unl = root.derive("unlabeled");
  for (std::size_t i = 0; i < spec.unlabeled_count; ++i) {
    const std::size_t c = unl.below(spec.classes);
    out.unlabeled.instances.push_back(gen.instance(numbered("unl-", i + 1), c, labels,
                                                   Domain::online_disc, Split::train, false, unl));
  }

  for (const auto& kws : gen.keywords) out.vocabulary.insert(out.vocabulary.end(), kws.begin(), kws.end());
  out.vocabulary.insert(out.vocabulary.end(), gen.common.begin(), gen.common.end());
  out.vocabulary.insert(out.vocabulary.end(), gen.source_markers.begin(), gen.source_markers.end());
  out.vocabulary.insert(out.vocabulary.end(), gen.target_markers.begin(), gen.target_markers.end());
  return out;
}

EmbeddingTable synth_embeddings(const SynthSpec& spec, const std::vector<std::string>& vocabulary) {
  spec.validate();
  Rng rng = Rng(spec.seed).derive("embeddings");
  const EmbeddingTable base = random_embeddings(vocabulary, spec.embedding_dim, rng);
  if (spec.marker_offset == 0.0) return base;

  const std::size_t dim = spec.embedding_dim;
  Rng dir_rng = Rng(spec.seed).derive("domain-directions");
  auto direction = [&] {
    std::vector<double> v(dim);
    double norm = 0.0;
    while (norm == 0.0) {
      norm = 0.0;
      for (double& x : v) {
        x = dir_rng.uniform(-1.0, 1.0);
        norm += x * x;
      }
    }
    norm = std::sqrt(norm);
    for (double& x : v) x *= spec.marker_offset / norm;
    return v;
  };
  const std::vector<double> source_dir = direction();
  const std::vector<double> target_dir = direction();

  std::map<std::string, const std::vector<double>*> shifted;
  for (std::size_t j = 0; j < spec.marker_count; ++j) {
    shifted[numbered("src", j)] = &source_dir;
    shifted[numbered("tgt", j)] = &target_dir;
  }
  Tensor2 vectors = base.matrix();
  const auto& words = base.words();
  for (std::size_t w = 0; w < words.size(); ++w) {
    auto it = shifted.find(words[w]);
    if (it == shifted.end()) continue;
    auto row = vectors.row(w + 1);
    for (std::size_t c = 0; c < dim; ++c) row[c] += (*it->second)[c];
  }
  if (!words.empty()) {
    for (std::size_t c = 0; c < dim; ++c) {
      double s = 0.0;
      for (std::size_t r = 1; r < vectors.rows(); ++r) s += vectors(r, c);
      vectors(0, c) = s / static_cast<double>(words.size());
    }
  }
  return EmbeddingTable(words, std::move(vectors));
}

}  // namespace framing
