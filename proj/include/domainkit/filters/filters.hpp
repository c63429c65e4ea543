#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "domainkit/common/jsonl.hpp"
#include "domainkit/ingest/document.hpp"

namespace domainkit {

enum class Language { zh, en };

struct FilterConfig {
  // Newline-delimited lexicon; unset means an empty lexicon.
  std::optional<std::filesystem::path> sensitive_word_list;
  std::size_t min_effective_chars = 50;
  Language target_language = Language::zh;
  double min_language_ratio = 0.7;

  // Relative lexicon paths resolve against `base_dir`. Throws ConfigError on
  // invariant violations.
  static FilterConfig from_json(const json& j, const std::filesystem::path& base_dir = {});
  json to_json() const;
};

using Lexicon = std::set<std::string>;

// Blank lines and lines starting with '#' are skipped. Throws LexiconMissing.
Lexicon load_lexicon(const std::filesystem::path& path);

struct Verdict {
  bool pass = true;
  std::vector<std::string> matched;  // sensitive filter only, sorted
  double ratio = 0.0;                // language filter only

  explicit operator bool() const { return pass; }
};

Verdict filter_sensitive(const Document& doc, const Lexicon& lexicon);
// Share of target-language characters among non-whitespace, non-punctuation
// characters; 0 when there are none.
double language_ratio(std::string_view text, Language lang);
Verdict filter_language(const Document& doc, const FilterConfig& cfg);
Verdict filter_length(const Document& doc, const FilterConfig& cfg);

struct FilterReport {
  std::size_t input = 0;
  std::size_t retained = 0;
  std::size_t dropped_sensitive = 0;
  std::size_t dropped_language = 0;
  std::size_t dropped_length = 0;

  json to_json() const;
};

struct FilterResult {
  std::vector<Document> retained;  // status unchanged (ingested)
  std::vector<Document> dropped;   // status filtered_out(reason)
  FilterReport report;
};

// Filters run sensitive -> language -> length; the first failure decides the
// drop reason.
FilterResult run_filters(std::span<const Document> docs, const FilterConfig& cfg,
                         const Lexicon& lexicon);
FilterResult run_filters(std::span<const Document> docs, const FilterConfig& cfg);

}  // namespace domainkit
