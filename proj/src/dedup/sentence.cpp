#include <algorithm>
#include <unordered_map>

#include "domainkit/common/text.hpp"
#include "domainkit/dedup/dedup.hpp"

namespace domainkit {
namespace {

bool is_terminator(char32_t cp) {
  switch (cp) {
    case U'。': case U'！': case U'？': case U'!': case U'?': case U'.':
      return true;
    default:
      return false;
  }
}

}  // namespace

std::vector<std::string> split_sentences(std::string_view s) {
  std::vector<std::string> pieces;
  const auto cps = text::decode_utf8(s);
  if (!cps) {
    pieces.emplace_back(s);
    return pieces;
  }
  std::string current;
  for (std::size_t i = 0; i < cps->size(); ++i) {
    const char32_t cp = (*cps)[i];
    text::append_utf8(current, cp);
    if (cp == U'\n') {
      pieces.push_back(std::move(current));
      current.clear();
    } else if (is_terminator(cp)) {
      // "？！" and "..." stay attached to their sentence.
      while (i + 1 < cps->size() && is_terminator((*cps)[i + 1])) text::append_utf8(current, (*cps)[++i]);
      pieces.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) pieces.push_back(std::move(current));
  return pieces;
}

std::vector<Document> sentence_dedup(std::vector<Document> docs, const DedupConfig& cfg,
                                     const TokenizerSpec& tokenizer, SentenceDedupStats* stats) {
  std::stable_sort(docs.begin(), docs.end(),
                   [](const Document& a, const Document& b) { return a.doc_id < b.doc_id; });
  SentenceDedupStats local;
  if (cfg.sentence_max_repeats == DedupConfig::kUnlimited) {
    if (stats) *stats = local;
    return docs;
  }

  std::unordered_map<std::string, std::size_t> corpus_counts;
  for (auto& doc : docs) {
    if (!is_active(doc)) continue;
    std::unordered_map<std::string, std::size_t> doc_counts;
    auto& counts = cfg.sentence_scope == SentenceScope::corpus ? corpus_counts : doc_counts;

    std::string kept;
    bool changed = false;
    for (auto& piece : split_sentences(doc.text)) {
      std::string key = text::collapse_whitespace(piece);
      if (key.empty()) {
        kept += piece;
        continue;
      }
      if (++counts[std::move(key)] > cfg.sentence_max_repeats) {
        changed = true;
        ++local.sentences_removed;
        continue;
      }
      kept += piece;
    }
    if (!changed) continue;
    doc.text = text::normalize_whitespace(kept);
    doc.token_count = count_tokens(doc.text, tokenizer);
    doc.char_count = text::count_effective_chars(doc.text);
    if (doc.text.empty()) {
      doc.status = DocStatus::deduped("sentence");
      ++local.docs_emptied;
    }
  }
  if (stats) *stats = local;
  return docs;
}

}  // namespace domainkit
