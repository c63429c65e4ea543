#include <doctest.h>

#include <random>
#include <set>

#include "domainkit/common/text.hpp"
#include "domainkit/dedup/dedup.hpp"
#include "domainkit/ingest/tokenizer.hpp"
#include "support.hpp"

using namespace domainkit;

namespace {

Document doc_of(const std::string& text, SourceKind kind = SourceKind::domain_book) {
  Document d;
  d.text = text;
  d.source_kind = kind;
  d.doc_id = make_doc_id(text, kind);
  d.token_count = count_tokens(text);
  d.char_count = text::count_effective_chars(text);
  return d;
}

std::string random_cjk(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> dist(0x4E00, 0x4E00 + 3000);
  std::u32string s;
  for (std::size_t i = 0; i < n; ++i) s.push_back(static_cast<char32_t>(dist(rng)));
  return text::encode_utf8(s);
}

// O(n^2) oracle over exact shingle sets.
std::set<std::pair<std::string, std::string>> oracle_pairs(const std::vector<Document>& docs, double threshold) {
  std::vector<ShingleSet> sets;
  for (const auto& d : docs) sets.push_back(make_shingles(d, 5));
  std::set<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = i + 1; j < sets.size(); ++j) {
      if (jaccard(sets[i], sets[j]) >= threshold) {
        out.insert(std::minmax(sets[i].doc_id, sets[j].doc_id));
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("jaccard set arithmetic") {
  const ShingleSet a{"a", {1, 2, 3, 4}};
  const ShingleSet b{"b", {1, 2, 3, 5}};
  CHECK(jaccard(a, b) == doctest::Approx(0.6));
  CHECK(jaccard(a, a) == 1.0);
  CHECK(jaccard(a, ShingleSet{"c", {7, 8}}) == 0.0);
  CHECK(testing::error_of([&] { jaccard(a, ShingleSet{"e", {}}); }) == ErrorCode::EmptyShingleSet);
}

TEST_CASE("shingles are code-point n-grams over collapsed whitespace") {
  CHECK(shingle_hashes("abcdef", 5).size() == 2);
  CHECK(shingle_hashes("ab  c", 5) == shingle_hashes("ab c", 5));
  CHECK(shingle_hashes("ab", 5).size() == 1);
  CHECK(shingle_hashes("家装工程验收规范", 5).size() == 4);
}

TEST_CASE("exact dedup") {
  const auto a = doc_of("完全相同的文档内容");
  const auto out = exact_dedup({a, a});
  std::size_t active = 0;
  for (const auto& d : out) active += is_active(d);
  CHECK(active == 1);
  const auto ws = exact_dedup({doc_of("空白 不同"), doc_of("空白   不同")});
  active = 0;
  for (const auto& d : ws) active += is_active(d);
  CHECK(active == 1);
  const auto distinct = exact_dedup({doc_of("第一篇"), doc_of("第二篇")});
  for (const auto& d : distinct) CHECK(is_active(d));
}

TEST_CASE("near dedup finds a document with one appended sentence") {
  std::mt19937_64 rng(5);
  const std::string base = random_cjk(rng, 400);
  const auto a = doc_of(base + "。");
  const auto b = doc_of(base + "。另外补充一句说明。");
  const auto c = doc_of(random_cjk(rng, 400));
  std::vector<Document> docs{a, b, c};
  const auto oracle = oracle_pairs(docs, 0.9);
  REQUIRE(oracle.size() == 1);
  DedupConfig cfg;
  const auto res = near_dedup(docs, cfg);
  REQUIRE(res.pairs.size() == 1);
  CHECK(std::make_pair(res.pairs[0].a, res.pairs[0].b) == *oracle.begin());
  std::size_t active = 0;
  for (const auto& d : res.docs) active += is_active(d);
  CHECK(active == 2);
  // The survivor is the smaller doc_id.
  for (const auto& d : res.docs) {
    if (d.doc_id == std::min(a.doc_id, b.doc_id)) CHECK(is_active(d));
  }
}

TEST_CASE("near dedup on disjoint docs yields no pairs") {
  std::mt19937_64 rng(11);
  std::vector<Document> docs;
  for (int i = 0; i < 30; ++i) docs.push_back(doc_of(random_cjk(rng, 200)));
  CHECK(near_dedup(docs, DedupConfig{}).pairs.empty());
}

TEST_CASE("near dedup recall against the O(n^2) oracle on 200 docs") {
  std::mt19937_64 rng(2024);
  std::vector<Document> docs;
  for (int i = 0; i < 180; ++i) docs.push_back(doc_of(random_cjk(rng, 300)));
  for (int i = 0; i < 20; ++i) {
    std::u32string s = *text::decode_utf8(docs[i].text);
    // Replace ~1% of characters: true Jaccard stays well above 0.8.
    for (int e = 0; e < 3; ++e) s[(rng() % s.size())] = U'鑫';
    docs.push_back(doc_of(text::encode_utf8(s)));
  }
  const auto oracle = oracle_pairs(docs, 0.8);
  const auto res = near_dedup(docs, DedupConfig{});
  std::set<std::pair<std::string, std::string>> found;
  for (const auto& p : res.pairs) {
    CHECK(oracle.contains({p.a, p.b}));  // precision 1.0 after verification
    found.insert({p.a, p.b});
  }
  std::size_t hit = 0;
  for (const auto& p : oracle) hit += found.contains(p);
  REQUIRE(!oracle.empty());
  CHECK(static_cast<double>(hit) / static_cast<double>(oracle.size()) >= 0.95);
}

TEST_CASE("sentence dedup caps repeats in doc_id order") {
  const std::string boiler = "本文仅供参考。";
  std::vector<Document> docs;
  for (int i = 0; i < 10; ++i) docs.push_back(doc_of("独立内容第" + std::to_string(i) + "段。" + boiler));
  DedupConfig cfg;
  SentenceDedupStats stats;
  auto out = sentence_dedup(docs, cfg, {}, &stats);
  std::sort(out.begin(), out.end(), [](const Document& a, const Document& b) { return a.doc_id < b.doc_id; });
  std::size_t kept = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const bool has = out[i].text.find(boiler) != std::string::npos;
    kept += has;
    CHECK(has == (i < 2));
    CHECK(out[i].token_count == count_tokens(out[i].text));
  }
  CHECK(kept == 2);
  CHECK(stats.sentences_removed == 8);

  std::sort(docs.begin(), docs.end(), [](const Document& a, const Document& b) { return a.doc_id < b.doc_id; });
  cfg.sentence_max_repeats = DedupConfig::kUnlimited;
  const auto unlimited = sentence_dedup(docs, cfg);
  for (std::size_t i = 0; i < docs.size(); ++i) CHECK(unlimited[i].text == docs[i].text);

  std::vector<Document> unique{doc_of("第一句。第二句。"), doc_of("第三句！第四句？")};
  std::sort(unique.begin(), unique.end(), [](const Document& a, const Document& b) { return a.doc_id < b.doc_id; });
  const auto same = sentence_dedup(unique, DedupConfig{});
  for (std::size_t i = 0; i < unique.size(); ++i) CHECK(same[i].text == unique[i].text);
}

TEST_CASE("split_sentences preserves the text") {
  const std::string t = "第一句。第二句！！第三句?\n最后没有标点";
  const auto parts = split_sentences(t);
  std::string joined;
  for (const auto& p : parts) joined += p;
  CHECK(joined == t);
  CHECK(parts == std::vector<std::string>{"第一句。", "第二句！！", "第三句?", "\n", "最后没有标点"});
}

TEST_CASE("run_dedup marks survivors retained and reports removals") {
  std::mt19937_64 rng(3);
  const std::string base = random_cjk(rng, 300);
  std::vector<Document> docs{doc_of(base), doc_of(base), doc_of(base + "补充"), doc_of(random_cjk(rng, 300))};
  const auto res = run_dedup(docs, DedupConfig{});
  CHECK(res.report.input == 4);
  CHECK(res.report.exact_removed == 1);
  CHECK(res.report.near_removed == 1);
  CHECK(res.retained.size() == 2);
  for (const auto& d : res.retained) CHECK(d.status.state == DocState::retained);
  CHECK(res.removed.size() == 2);
}

TEST_CASE("dedup config validation") {
  DedupConfig cfg;
  cfg.lsh_bands = 10;  // 10 * 8 != 128
  CHECK(testing::error_of([&] { cfg.validate(); }) == ErrorCode::ConfigError);
  const auto parsed = DedupConfig::from_json(json{{"sentence_max_repeats", nullptr}});
  CHECK(parsed.sentence_max_repeats == DedupConfig::kUnlimited);
}
