#include <algorithm>
#include <cmath>
#include <random>

#include "domainkit/common/error.hpp"
#include "domainkit/common/hash.hpp"
#include "domainkit/common/text.hpp"
#include "domainkit/dedup/dedup.hpp"

namespace domainkit {

void DedupConfig::validate() const {
  if (ngram == 0) throw Error(ErrorCode::ConfigError, "ngram must be >= 1");
  if (num_perm == 0) throw Error(ErrorCode::ConfigError, "num_perm must be >= 1");
  if (lsh_bands * lsh_rows != num_perm) {
    throw Error(ErrorCode::ConfigError, "lsh_bands * lsh_rows (" + std::to_string(lsh_bands) +
                                            " * " + std::to_string(lsh_rows) +
                                            ") must equal num_perm (" + std::to_string(num_perm) + ")");
  }
  if (!(jaccard_threshold > 0.0 && jaccard_threshold <= 1.0)) {
    throw Error(ErrorCode::ConfigError, "jaccard_threshold must lie in (0, 1]");
  }
}

DedupConfig DedupConfig::from_json(const json& j) {
  DedupConfig cfg;
  if (j.is_null()) return cfg;
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "dedup config must be an object");
  try {
    auto count = [&](const char* key, std::size_t& out) {
      if (!j.contains(key)) return;
      const auto v = j[key].get<long long>();
      if (v < 0) throw Error(ErrorCode::ConfigError, std::string(key) + " must be >= 0");
      out = static_cast<std::size_t>(v);
    };
    count("ngram", cfg.ngram);
    count("num_perm", cfg.num_perm);
    count("lsh_bands", cfg.lsh_bands);
    count("lsh_rows", cfg.lsh_rows);
    count("workers", cfg.workers);
    if (j.contains("jaccard_threshold")) cfg.jaccard_threshold = j["jaccard_threshold"].get<double>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("sentence_max_repeats")) {
      const auto& v = j["sentence_max_repeats"];
      if (v.is_null() || (v.is_number_integer() && v.get<long long>() < 0)) {
        cfg.sentence_max_repeats = kUnlimited;
      } else {
        cfg.sentence_max_repeats = v.get<std::size_t>();
      }
    }
    if (j.contains("sentence_scope")) {
      const auto scope = j["sentence_scope"].get<std::string>();
      if (scope == "corpus") cfg.sentence_scope = SentenceScope::corpus;
      else if (scope == "document") cfg.sentence_scope = SentenceScope::document;
      else throw Error(ErrorCode::ConfigError, "sentence_scope must be corpus or document");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("dedup config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

json DedupConfig::to_json() const {
  return json{{"ngram", ngram},
              {"num_perm", num_perm},
              {"jaccard_threshold", jaccard_threshold},
              {"lsh_bands", lsh_bands},
              {"lsh_rows", lsh_rows},
              {"sentence_max_repeats",
               sentence_max_repeats == kUnlimited ? json(nullptr) : json(sentence_max_repeats)},
              {"sentence_scope", sentence_scope == SentenceScope::corpus ? "corpus" : "document"},
              {"seed", seed}};
}

std::vector<std::uint64_t> shingle_hashes(std::string_view text, std::size_t n) {
  const auto cps = text::decode_utf8(text::collapse_whitespace(text));
  std::vector<std::uint64_t> out;
  if (!cps || cps->empty() || n == 0) return out;
  if (cps->size() < n) {
    out.push_back(hash64(text::encode_utf8(*cps)));
    return out;
  }
  out.reserve(cps->size() - n + 1);
  std::string gram;
  for (std::size_t i = 0; i + n <= cps->size(); ++i) {
    gram.clear();
    for (std::size_t k = 0; k < n; ++k) text::append_utf8(gram, (*cps)[i + k]);
    out.push_back(hash64(gram));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ShingleSet make_shingles(const Document& doc, std::size_t n) {
  return ShingleSet{doc.doc_id, shingle_hashes(doc.text, n)};
}

double jaccard(const ShingleSet& a, const ShingleSet& b) {
  if (a.shingles.empty() || b.shingles.empty()) {
    throw Error(ErrorCode::EmptyShingleSet,
                "jaccard of empty shingle set (" + (a.shingles.empty() ? a.doc_id : b.doc_id) + ")");
  }
  std::size_t inter = 0;
  auto i = a.shingles.begin();
  auto j = b.shingles.begin();
  while (i != a.shingles.end() && j != b.shingles.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++inter;
      ++i;
      ++j;
    }
  }
  const std::size_t uni = a.shingles.size() + b.shingles.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

MinHasher::MinHasher(std::size_t num_perm, std::uint64_t seed) : mul_(num_perm), add_(num_perm) {
  std::mt19937_64 rng(seed);
  for (std::size_t j = 0; j < num_perm; ++j) {
    mul_[j] = rng() | 1ULL;
    add_[j] = rng();
  }
}

MinHashSignature MinHasher::sign(const ShingleSet& set, const simd::Kernels& kernels) const {
  MinHashSignature out{set.doc_id, std::vector<std::uint64_t>(mul_.size(), ~0ULL)};
  simd::minhash_update(set.shingles, mul_, add_, out.sig, kernels);
  return out;
}

double signature_agreement(const MinHashSignature& a, const MinHashSignature& b,
                           const simd::Kernels& kernels) {
  const std::size_t n = std::min(a.sig.size(), b.sig.size());
  if (n == 0) return 0.0;
  return static_cast<double>(simd::count_equal(a.sig, b.sig, kernels)) / static_cast<double>(n);
}

}  // namespace domainkit
