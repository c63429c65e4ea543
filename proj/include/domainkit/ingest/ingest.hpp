#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "domainkit/common/jsonl.hpp"
#include "domainkit/ingest/document.hpp"
#include "domainkit/ingest/tokenizer.hpp"

namespace domainkit {

// Cleaning applied to every payload, iterated to a fixpoint:
//   1. HTML entities decoded
//   2. table / image / script regions (and comments) removed whole
//   3. remaining tags stripped; block-level tags become line breaks
//   4. plain-text table lines (cell-separator density > 30%) dropped
//   5. URL tokens removed (http://, https://, ftp://, bare www.)
//   6. whitespace normalized (see text::normalize_whitespace)
std::string clean_text(std::string_view payload);

// Throws DecodeError for invalid UTF-8 and EmptyAfterExtraction when nothing
// survives cleaning.
Document extract_text(const RawRecord& record, const TokenizerSpec& tokenizer = {});

struct KindStats {
  std::size_t records = 0;
  std::size_t documents = 0;
  std::size_t tokens = 0;
  std::size_t chars = 0;
};

struct PipelineStats {
  std::string tokenizer{kDefaultTokenizer};
  std::size_t records = 0;
  std::size_t documents = 0;
  std::map<std::string, KindStats> per_kind;
  std::map<std::string, std::size_t> failures;

  void merge(const PipelineStats& other);
  std::size_t total_tokens() const;
  json to_json() const;
};

struct IngestResult {
  std::vector<Document> docs;  // sorted by doc_id
  PipelineStats stats;
};

IngestResult ingest_stream(std::span<const RawRecord> records, const TokenizerSpec& tokenizer = {},
                           std::size_t workers = 1);

// Reads raw records from a file or a directory tree (files visited in sorted
// path order). `.jsonl` files carry {"id","text","kind","uri"} per line, where
// "kind" overrides `default_kind`; any other file is one record.
std::vector<RawRecord> load_raw_records(const std::filesystem::path& path,
                                        std::optional<SourceKind> default_kind);

}  // namespace domainkit
