#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "domainkit/common/jsonl.hpp"
#include "domainkit/ingest/document.hpp"
#include "domainkit/ingest/tokenizer.hpp"
#include "domainkit/simd/kernels.hpp"

namespace domainkit {

enum class SentenceScope {
  corpus,    // cap each sentence's occurrences across the whole corpus
  document,  // cap repeats inside each document only
};

struct DedupConfig {
  static constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();

  std::size_t ngram = 5;
  std::size_t num_perm = 128;
  double jaccard_threshold = 0.8;
  std::size_t lsh_bands = 16;
  std::size_t lsh_rows = 8;
  std::size_t sentence_max_repeats = 2;
  SentenceScope sentence_scope = SentenceScope::corpus;
  std::uint64_t seed = 1;
  std::size_t workers = 1;

  // Throws ConfigError unless bands * rows == num_perm, 0 < threshold <= 1,
  // ngram >= 1.
  void validate() const;
  // "sentence_max_repeats": null or a negative number means unlimited.
  static DedupConfig from_json(const json& j);
  json to_json() const;
};

struct ShingleSet {
  std::string doc_id;
  std::vector<std::uint64_t> shingles;  // sorted, unique
};

// Hashes of every character n-gram (code points, whitespace-collapsed text).
// Texts shorter than n yield one shingle for the whole text; empty text yields
// none.
std::vector<std::uint64_t> shingle_hashes(std::string_view text, std::size_t n);
ShingleSet make_shingles(const Document& doc, std::size_t n);

// Exact |a ∩ b| / |a ∪ b|. Throws EmptyShingleSet if either side is empty.
double jaccard(const ShingleSet& a, const ShingleSet& b);

struct MinHashSignature {
  std::string doc_id;
  std::vector<std::uint64_t> sig;
};

class MinHasher {
 public:
  MinHasher(std::size_t num_perm, std::uint64_t seed);

  MinHashSignature sign(const ShingleSet& set,
                        const simd::Kernels& kernels = simd::active_kernels()) const;
  std::size_t num_perm() const { return mul_.size(); }

 private:
  std::vector<std::uint64_t> mul_;
  std::vector<std::uint64_t> add_;
};

// Share of coordinates on which two signatures agree (a MinHash estimate of
// Jaccard similarity).
double signature_agreement(const MinHashSignature& a, const MinHashSignature& b,
                           const simd::Kernels& kernels = simd::active_kernels());

struct DupPair {
  std::string a;  // a < b
  std::string b;
  double jaccard = 0.0;

  json to_json() const { return json{{"a", a}, {"b", b}, {"jaccard", jaccard}}; }
};

// Every function below leaves documents that are already filtered/deduped out
// untouched and returns all documents sorted by doc_id.

// Among documents with equal whitespace-collapsed text the smallest doc_id
// survives; the rest become deduped_out(exact).
std::vector<Document> exact_dedup(std::vector<Document> docs);

struct NearDedupResult {
  std::vector<Document> docs;
  std::vector<DupPair> pairs;  // verified pairs, sorted by (a, b)
};

// MinHash + banded LSH candidates, each verified by exact Jaccard; connected
// components of verified pairs collapse to their smallest doc_id, the rest
// become deduped_out(near).
NearDedupResult near_dedup(std::vector<Document> docs, const DedupConfig& cfg);

// Splits after terminal punctuation (。！？!?.) and newlines. Concatenating the
// pieces reproduces the input exactly.
std::vector<std::string> split_sentences(std::string_view text);

struct SentenceDedupStats {
  std::size_t sentences_removed = 0;
  std::size_t docs_emptied = 0;
};

// Occurrences of a sentence beyond `sentence_max_repeats` are deleted, visiting
// documents in doc_id order. Emptied documents become deduped_out(sentence);
// modified ones are re-counted with `tokenizer`. doc_id is kept.
std::vector<Document> sentence_dedup(std::vector<Document> docs, const DedupConfig& cfg,
                                     const TokenizerSpec& tokenizer = {},
                                     SentenceDedupStats* stats = nullptr);

struct DedupReport {
  std::size_t input = 0;
  std::size_t exact_removed = 0;
  std::size_t near_removed = 0;
  std::size_t sentence_emptied = 0;
  std::size_t sentences_removed = 0;
  std::size_t retained = 0;
  std::size_t tokens_before = 0;
  std::size_t tokens_after = 0;
  std::size_t pairs = 0;

  json to_json() const;
};

struct DedupResult {
  std::vector<Document> retained;  // status retained, sorted by doc_id
  std::vector<Document> removed;   // status deduped_out(reason)
  std::vector<DupPair> pairs;
  DedupReport report;
};

// exact -> near -> sentence.
DedupResult run_dedup(std::vector<Document> docs, const DedupConfig& cfg,
                      const TokenizerSpec& tokenizer = {});

inline bool is_active(const Document& d) {
  return d.status.state == DocState::ingested || d.status.state == DocState::retained;
}

}  // namespace domainkit
