#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "domainkit/common/jsonl.hpp"

namespace domainkit {

enum class SourceKind { national_standard, domain_book, domain_website, general };

std::string_view to_string(SourceKind kind);
std::optional<SourceKind> parse_source_kind(std::string_view name);
inline bool is_domain(SourceKind kind) { return kind != SourceKind::general; }

struct RawRecord {
  std::string source_id;
  SourceKind source_kind = SourceKind::general;
  std::string payload;
  std::optional<std::string> uri;
};

enum class DocState { ingested, filtered_out, deduped_out, retained };

struct DocStatus {
  DocState state = DocState::ingested;
  std::string reason;  // set for filtered_out / deduped_out

  static DocStatus filtered(std::string why) { return {DocState::filtered_out, std::move(why)}; }
  static DocStatus deduped(std::string why) { return {DocState::deduped_out, std::move(why)}; }

  // "ingested", "retained", "filtered_out(language)", "deduped_out(exact)"
  std::string str() const;
  static DocStatus parse(std::string_view s);

  friend bool operator==(const DocStatus&, const DocStatus&) = default;
};

struct Document {
  std::string doc_id;
  std::string text;
  SourceKind source_kind = SourceKind::general;
  std::size_t token_count = 0;
  std::size_t char_count = 0;
  DocStatus status;

  friend bool operator==(const Document&, const Document&) = default;
};

// doc_id: hex MurmurHash3-128 of (normalized text, 0x1F, source kind name).
std::string make_doc_id(std::string_view text, SourceKind kind);

json to_json(const Document& doc);
// Throws SchemaError on missing/ill-typed fields.
Document document_from_json(const json& j);

std::vector<Document> read_documents(const std::filesystem::path& path);
void write_documents(const std::filesystem::path& path, const std::vector<Document>& docs);

}  // namespace domainkit
