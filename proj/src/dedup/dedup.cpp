#include <algorithm>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "domainkit/common/hash.hpp"
#include "domainkit/common/parallel.hpp"
#include "domainkit/common/text.hpp"
#include "domainkit/dedup/dedup.hpp"

namespace domainkit {
namespace {

void sort_by_id(std::vector<Document>& docs) {
  std::stable_sort(docs.begin(), docs.end(),
                   [](const Document& a, const Document& b) { return a.doc_id < b.doc_id; });
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // The smaller index always becomes the root.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

std::vector<Document> exact_dedup(std::vector<Document> docs) {
  sort_by_id(docs);
  std::unordered_set<std::string> seen;
  for (auto& doc : docs) {
    if (!is_active(doc)) continue;
    if (!seen.insert(text::collapse_whitespace(doc.text)).second) {
      doc.status = DocStatus::deduped("exact");
    }
  }
  return docs;
}

NearDedupResult near_dedup(std::vector<Document> docs, const DedupConfig& cfg) {
  cfg.validate();
  sort_by_id(docs);

  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (is_active(docs[i])) active.push_back(i);
  }

  const MinHasher hasher(cfg.num_perm, cfg.seed);
  const auto& kernels = simd::active_kernels();
  std::vector<ShingleSet> sets(active.size());
  std::vector<MinHashSignature> sigs(active.size());
  parallel_for(active.size(), cfg.workers, [&](std::size_t k) {
    sets[k] = make_shingles(docs[active[k]], cfg.ngram);
    sigs[k] = hasher.sign(sets[k], kernels);
  });

  // Banded LSH; documents are visited in doc_id order so every bucket lists
  // ascending indices.
  std::vector<std::uint64_t> candidates;
  for (std::size_t band = 0; band < cfg.lsh_bands; ++band) {
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets;
    for (std::size_t k = 0; k < active.size(); ++k) {
      if (sets[k].shingles.empty()) continue;
      const auto* rows = sigs[k].sig.data() + band * cfg.lsh_rows;
      const std::string_view key(reinterpret_cast<const char*>(rows),
                                 cfg.lsh_rows * sizeof(std::uint64_t));
      buckets[hash64(key, band)].push_back(static_cast<std::uint32_t>(k));
    }
    for (const auto& [_, members] : buckets) {
      for (std::size_t x = 0; x < members.size(); ++x) {
        for (std::size_t y = x + 1; y < members.size(); ++y) {
          candidates.push_back((std::uint64_t(members[x]) << 32) | members[y]);
        }
      }
    }
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  NearDedupResult result;
  DisjointSets components(active.size());
  for (std::uint64_t c : candidates) {
    const auto x = static_cast<std::size_t>(c >> 32);
    const auto y = static_cast<std::size_t>(c & 0xffffffffULL);
    const double j = jaccard(sets[x], sets[y]);
    if (j >= cfg.jaccard_threshold) {
      components.unite(x, y);
      result.pairs.push_back({sets[x].doc_id, sets[y].doc_id, j});
    }
  }
  for (std::size_t k = 0; k < active.size(); ++k) {
    if (components.find(k) != k) docs[active[k]].status = DocStatus::deduped("near");
  }
  std::sort(result.pairs.begin(), result.pairs.end(), [](const DupPair& p, const DupPair& q) {
    return std::tie(p.a, p.b) < std::tie(q.a, q.b);
  });
  result.docs = std::move(docs);
  return result;
}

json DedupReport::to_json() const {
  return json{{"input", input},
              {"removed", {{"exact", exact_removed}, {"near", near_removed}, {"sentence", sentence_emptied}}},
              {"sentences_removed", sentences_removed},
              {"retained", retained},
              {"tokens_before", tokens_before},
              {"tokens_after", tokens_after},
              {"pairs", pairs}};
}

DedupResult run_dedup(std::vector<Document> docs, const DedupConfig& cfg,
                      const TokenizerSpec& tokenizer) {
  cfg.validate();
  DedupResult result;
  result.report.input = docs.size();
  for (const auto& d : docs) result.report.tokens_before += is_active(d) ? d.token_count : 0;

  auto removed_with = [](const std::vector<Document>& ds, std::string_view reason) {
    return static_cast<std::size_t>(std::count_if(ds.begin(), ds.end(), [&](const Document& d) {
      return d.status.state == DocState::deduped_out && d.status.reason == reason;
    }));
  };

  docs = exact_dedup(std::move(docs));
  auto near = near_dedup(std::move(docs), cfg);
  SentenceDedupStats sstats;
  docs = sentence_dedup(std::move(near.docs), cfg, tokenizer, &sstats);

  result.report.exact_removed = removed_with(docs, "exact");
  result.report.near_removed = removed_with(docs, "near");
  result.report.sentence_emptied = removed_with(docs, "sentence");
  result.report.sentences_removed = sstats.sentences_removed;
  for (auto& d : docs) {
    if (is_active(d)) {
      d.status = {DocState::retained, {}};
      result.report.tokens_after += d.token_count;
      result.retained.push_back(std::move(d));
    } else {
      result.removed.push_back(std::move(d));
    }
  }
  result.report.retained = result.retained.size();
  result.pairs = std::move(near.pairs);
  result.report.pairs = result.pairs.size();
  return result;
}

}  // namespace domainkit
