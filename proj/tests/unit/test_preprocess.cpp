// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "framing/embeddings.hpp"
#include "framing/error.hpp"
#include "framing/preprocess.hpp"
#include "framing/tokenize.hpp"

using namespace framing;

namespace {

using Tokens = std::vector<std::string>;

AnnotatedDocument document(std::size_t length, std::vector<std::pair<std::size_t, std::size_t>> sentences,
                           std::vector<SpanAnnotation> spans) {
  AnnotatedDocument doc;
  doc.doc_id = "d";
  for (std::size_t i = 0; i < length; ++i) doc.tokens.push_back("w" + std::to_string(i));
  doc.sentences = std::move(sentences);
  doc.spans = std::move(spans);
  return doc;
}

TaskDataset binary(std::size_t zeros, std::size_t ones) {
  TaskDataset ds{"q", LabelSet::quality(), {}};
  for (std::size_t i = 0; i < zeros + ones; ++i) {
    Instance inst;
    inst.id = "q" + std::to_string(i);
    inst.tokens = {"x"};
    inst.labels = {i < zeros ? 0 : 1};
    ds.instances.push_back(inst);
  }
  return ds;
}

std::pair<std::size_t, std::size_t> counts(const TaskDataset& ds) {
  const auto c = ds.class_counts();
  return {c[0], c[1]};
}

}  // namespace

TEST_SUITE("preprocess") {

TEST_CASE("tokenize examples") {
  CHECK(tokenize("Gun control is about preventing such security risks.") ==
        Tokens{"gun", "control", "is", "about", "preventing", "such", "security", "risks", "."});
  CHECK(tokenize("").empty());
  CHECK(tokenize("A  b") == Tokens{"a", "b"});
  CHECK(tokenize("don't re-elect him, 3.5 or 1,000!") ==
        Tokens{"don't", "re-elect", "him", ",", "3.5", "or", "1,000", "!"});
  CHECK(tokenize("'quoted' -x") == Tokens{"'", "quoted", "'", "-", "x"});
  CHECK(tokenize("caf\xc3\xa9 ok") == Tokens{"caf\xc3\xa9", "ok"});
}

TEST_CASE("property: tokenize is idempotent on its joined output") {
  Rng rng(8);
  const std::string alphabet = "abcXYZ019 .,'-!?\t\n()@#";
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    const std::size_t n = rng.below(40);
    for (std::size_t i = 0; i < n; ++i) text.push_back(alphabet[rng.below(alphabet.size())]);
    const auto once = tokenize(text);
    CAPTURE(text);
    CHECK(tokenize(join_tokens(once)) == once);
  }
}

TEST_CASE("clean_tweet examples") {
  CHECK(clean_tweet("@rep vote now http://x.co") == "vote now");
  CHECK(clean_tweet("no urls here") == "no urls here");
  CHECK(clean_tweet("email a@b.com stays") == "email a@b.com stays");
  CHECK(clean_tweet("see www.example.org and https://t.co/abc now") == "see and now");
}

TEST_CASE("tweet corpora keep frame labels only") {
  std::istringstream in(
      R"({"id":1,"text":"@a Guns and crime http://t.co/x","labels":[7,2]})"
      "\n"
      R"({"id":2,"text":"only a link https://t.co","labels":[9]})"
      "\n"
      R"({"id":3,"text":"@user http://t.co","labels":[1]})"
      "\n");
  const auto ds = parse_tweets(in, "tweets.jsonl");
  REQUIRE(ds.size() == 1);
  CHECK(ds.instances[0].text == "Guns and crime");
  CHECK(ds.instances[0].labels == std::vector<int>{7});
  CHECK(ds.instances[0].domain == Domain::twitter);
}

TEST_CASE("projection: exactly half coverage with two annotators is labeled") {
  const auto doc = document(10, {{0, 10}}, {{0, 5, 5, "a"}, {0, 5, 5, "b"}});
  const auto out = project_spans(doc);
  REQUIRE(out.size() == 1);
  CHECK(out[0].labels == std::vector<int>{5});
  CHECK(out[0].tokens.size() == 10);
  CHECK(out[0].id == "d#s0");
}

TEST_CASE("projection: 4 of 10 tokens is below the threshold") {
  const auto doc = document(10, {{0, 10}}, {{0, 4, 5, "a"}, {0, 4, 5, "b"}});
  CHECK(project_spans(doc).empty());
}

TEST_CASE("projection: one annotator is not enough") {
  const auto doc = document(10, {{0, 10}}, {{0, 10, 5, "a"}, {2, 9, 5, "a"}});
  CHECK(project_spans(doc).empty());
}

TEST_CASE("projection: odd lengths round toward inclusion") {
  // 3 of 5 tokens is 60%, 2 of 5 is 40%.
  CHECK(project_spans(document(5, {{0, 5}}, {{0, 3, 1, "a"}, {2, 5, 1, "b"}})).size() == 1);
  CHECK(project_spans(document(5, {{0, 5}}, {{0, 2, 1, "a"}, {0, 2, 1, "b"}})).empty());
}

TEST_CASE("projection: spans crossing a sentence boundary do not count") {
  const auto doc = document(10, {{0, 4}, {4, 10}}, {{2, 8, 7, "a"}, {2, 8, 7, "b"}});
  CHECK(project_spans(doc).empty());
}

TEST_CASE("projection: labels outside the frame set are dropped") {
  const auto doc = document(4, {{0, 4}}, {{0, 4, 2, "a"}, {0, 4, 2, "b"}, {0, 4, 13, "a"},
                                          {0, 3, 13, "c"}, {0, 2, 6, "a"}, {0, 2, 6, "b"}});
  const auto out = project_spans(doc);
  REQUIRE(out.size() == 1);
  CHECK(out[0].labels == std::vector<int>{6, 13});
}

TEST_CASE("projection: indices past the document raise") {
  CHECK_THROWS_AS(project_spans(document(5, {{0, 5}}, {{3, 7, 1, "a"}})), DataError);
  CHECK_THROWS_AS(project_spans(document(5, {{0, 6}}, {})), DataError);
}

TEST_CASE("property: projected labels satisfy the coverage and annotator rule") {
  Rng rng(23);
  const auto frames = LabelSet::frames();
  const std::vector<int> label_pool{1, 2, 5, 6, 7, 13, 15};
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t length = 0;
    std::vector<std::pair<std::size_t, std::size_t>> sentences;
    const std::size_t n_sent = 1 + rng.below(4);
    for (std::size_t s = 0; s < n_sent; ++s) {
      const std::size_t len = 1 + rng.below(8);
      sentences.emplace_back(length, length + len);
      length += len;
    }
    std::vector<SpanAnnotation> spans;
    const std::size_t n_spans = rng.below(12);
    for (std::size_t k = 0; k < n_spans; ++k) {
      const std::size_t a = rng.below(length);
      const std::size_t b = a + 1 + rng.below(length - a);
      spans.push_back({a, b, label_pool[rng.below(label_pool.size())],
                       std::string(1, static_cast<char>('a' + rng.below(3)))});
    }
    const auto doc = document(length, sentences, spans);
    const auto out = project_spans(doc);

    // Independent recount, sentence by sentence.
    std::vector<std::vector<int>> expected(sentences.size());
    for (std::size_t s = 0; s < sentences.size(); ++s) {
      const auto [lo, hi] = sentences[s];
      for (int label : frames.codes()) {
        std::set<std::string> voters;
        for (const auto& sp : spans) {
          const bool inside = sp.start >= lo && sp.end <= hi;
          const bool half = 2 * (sp.end - sp.start) >= hi - lo;
          if (sp.label == label && inside && half) voters.insert(sp.annotator);
        }
        if (voters.size() >= 2) expected[s].push_back(label);
      }
    }
    std::size_t k = 0;
    for (std::size_t s = 0; s < sentences.size(); ++s) {
      if (expected[s].empty()) continue;
      REQUIRE(k < out.size());
      CHECK(out[k].id == "d#s" + std::to_string(s));
      CHECK(out[k].labels == expected[s]);
      for (int l : out[k].labels) CHECK(frames.contains(l));
      ++k;
    }
    CHECK(k == out.size());
  }
}

TEST_CASE("span documents parse from JSONL") {
  std::istringstream in(
      R"({"doc_id":"n1","tokens":["a","b","c","d"],"sentences":[[0,2],[2,4]],)"
      R"("spans":[{"start":0,"end":1,"label":"Economic","annotator":"x"},)"
      R"({"start":0,"end":2,"label":1,"annotator":"y"}],"split":"dev"})"
      "\n");
  const auto docs = parse_span_documents(in, "spans.jsonl");
  REQUIRE(docs.size() == 1);
  CHECK(docs[0].split == Split::dev);
  const auto out = project_spans(docs[0]);
  REQUIRE(out.size() == 1);
  CHECK(out[0].labels == std::vector<int>{1});
  CHECK(out[0].split == Split::dev);
  std::istringstream bad(R"({"doc_id":"n1","tokens":["a"],"sentences":[[0]],"spans":[]})");
  CHECK_THROWS_AS(parse_span_documents(bad, "spans.jsonl"), DataError);
}

TEST_CASE("quality binarization examples") {
  CHECK(binarize_quality({"a", "", std::vector<double>(7, 0.5)}) == 1);
  CHECK(binarize_quality({"a", "", std::vector<double>(7, 0.49)}) == 0);
  CHECK(binarize_quality({"a", "", {0.9, 0.9, 0.9, 0.1, 0.1, 0.1, 0.1}}) == 0);
  CHECK_THROWS_AS(binarize_quality({"a", "", std::vector<double>(6, 0.5)}), DataError);
}

TEST_CASE("property: binarization is 1 exactly when the mean is at least 0.5") {
  // Multiples of 1/64 keep every partial sum exact, so the oracle can
  // compare the sum against 3.5 without rounding.
  Rng rng(31);
  for (int trial = 0; trial < 2000; ++trial) {
    QualityAnnotation q{"q", "", {}};
    int sum64 = 0;
    for (std::size_t i = 0; i < kQualityRatings; ++i) {
      const int k = static_cast<int>(rng.below(65));
      sum64 += k;
      q.scores.push_back(k / 64.0);
    }
    CHECK(binarize_quality(q) == (2 * sum64 >= 7 * 64 ? 1 : 0));
  }
}

TEST_CASE("quality JSONL rejects bad rows") {
  std::istringstream six(R"({"id":"a","text":"t","scores":[1,1,1,1,1,1]})");
  CHECK_THROWS_AS(parse_quality(six, "q.jsonl"), DataError);
  std::istringstream range(R"({"id":"a","text":"t","scores":[1,1,1,1,1,1,1.5]})");
  CHECK_THROWS_AS(parse_quality(range, "q.jsonl"), DataError);
}

TEST_CASE("balance: appendix counts") {
  Rng rng(1);
  const auto out = balance_binary(binary(2435, 1350), rng);
  const auto [zeros, ones] = counts(out);
  CHECK(ones == 1350);
  CHECK(zeros <= 1350 * 1.05);
  CHECK(zeros >= 1350);
  const std::size_t total = zeros + ones;
  CHECK(zeros - ones <= static_cast<std::size_t>(std::ceil(0.05 * static_cast<double>(total))));
}

TEST_CASE("balance: already balanced is the identity") {
  Rng rng(1);
  const auto ds = binary(100, 100);
  CHECK(balance_binary(ds, rng) == ds);
  const auto near = binary(104, 100);
  CHECK(balance_binary(near, rng) == near);
}

TEST_CASE("balance: empty class is an error") {
  Rng rng(1);
  CHECK_THROWS_AS(balance_binary(binary(10, 0), rng), DataError);
  CHECK_THROWS_AS(balance_binary(binary(0, 10), rng), DataError);
}

TEST_CASE("property: balancing keeps the minority and never duplicates") {
  Rng gen(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t a = 1 + gen.below(300);
    const std::size_t b = 1 + gen.below(300);
    const auto ds = binary(a, b);
    const std::uint64_t seed = gen.next_u64();
    Rng r1(seed);
    Rng r2(seed);
    const auto out = balance_binary(ds, r1);
    CHECK(balance_binary(ds, r2) == out);

    const auto [zeros, ones] = counts(out);
    const std::size_t minority = std::min(a, b);
    CHECK(std::min(zeros, ones) == minority);
    const std::size_t gap = std::max(zeros, ones) - minority;
    CHECK(gap <= static_cast<std::size_t>(std::ceil(0.05 * static_cast<double>(zeros + ones))));

    std::set<std::string> ids;
    for (const auto& inst : out.instances) CHECK(ids.insert(inst.id).second);
    // The minority class survives in full and kept instances stay in order.
    std::size_t last = 0;
    std::size_t minority_seen = 0;
    const int minority_label = a <= b ? 0 : 1;
    for (const auto& inst : out.instances) {
      const std::size_t idx = std::stoul(inst.id.substr(1));
      CHECK((idx >= last || last == 0));
      last = idx;
      if (inst.labels[0] == minority_label) ++minority_seen;
    }
    CHECK(minority_seen == minority);
  }
}

TEST_CASE("quality corpus from annotations") {
  const auto ds = quality_dataset({{"a", "Good point.", std::vector<double>(7, 0.8)},
                                   {"b", "meh", std::vector<double>(7, 0.2)}});
  REQUIRE(ds.size() == 2);
  CHECK(ds.instances[0].labels == std::vector<int>{1});
  CHECK(ds.instances[1].labels == std::vector<int>{0});
  CHECK(ds.instances[0].tokens == Tokens{"good", "point", "."});
}

TEST_CASE("embeddings: known word, OOV mean and dimension errors") {
  std::istringstream in("cat 1 2 3\ndog 3 4 5\n");
  const auto t = parse_embeddings(in, {}, "emb.txt");
  CHECK(t.dimension() == 3);
  CHECK(t.rows() == 3);
  const auto cat = t.vector("cat");
  CHECK(std::vector<double>(cat.begin(), cat.end()) == std::vector<double>{1, 2, 3});
  const auto unk = t.vector("zebra");
  CHECK(std::vector<double>(unk.begin(), unk.end()) == std::vector<double>{2, 3, 4});
  CHECK(t.id("zebra") == EmbeddingTable::kUnknownId);

  std::ostringstream wide;
  wide << "a";
  for (int i = 0; i < 100; ++i) wide << " 0.1";
  wide << "\nb";
  for (int i = 0; i < 99; ++i) wide << " 0.1";
  wide << "\n";
  std::istringstream bad(wide.str());
  try {
    parse_embeddings(bad, {}, "emb.txt");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("emb.txt:2") != std::string::npos);
  }
  std::istringstream wrong_dim("a 1 2\n");
  CHECK_THROWS_AS(parse_embeddings(wrong_dim, {}, "emb.txt", 3), DataError);
}

TEST_CASE("embeddings: vocabulary filter keeps the mean over the whole file") {
  std::istringstream in("cat 1 0\ndog 3 0\nemu 5 0\n");
  const auto t = parse_embeddings(in, {"dog", "yak"}, "emb.txt");
  CHECK(t.words() == std::vector<std::string>{"dog"});
  CHECK(t.vector("dog")[0] == 3.0);
  CHECK(t.vector("cat")[0] == 3.0);  // mean of 1, 3, 5
  std::ostringstream out;
  write_embeddings(out, t);
  std::istringstream back(out.str());
  const auto u = parse_embeddings(back, {}, "emb.txt");
  CHECK(u.vector("dog")[0] == 3.0);
}

TEST_CASE("vocabulary is sorted and distinct") {
  TaskDataset a{"a", LabelSet::frames(), {}};
  Instance i;
  i.tokens = {"b", "a", "b"};
  a.instances.push_back(i);
  TaskDataset b = a;
  b.instances[0].tokens = {"c", "a"};
  CHECK(build_vocabulary({&a, &b}) == std::vector<std::string>{"a", "b", "c"});
}

}  // TEST_SUITE
