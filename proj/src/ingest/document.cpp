#include "domainkit/ingest/document.hpp"

#include "domainkit/common/error.hpp"
#include "domainkit/common/hash.hpp"
#include "domainkit/common/text.hpp"

namespace domainkit {

std::string_view to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::national_standard: return "national_standard";
    case SourceKind::domain_book: return "domain_book";
    case SourceKind::domain_website: return "domain_website";
    case SourceKind::general: return "general";
  }
  return "general";
}

std::optional<SourceKind> parse_source_kind(std::string_view name) {
  for (auto k : {SourceKind::national_standard, SourceKind::domain_book,
                 SourceKind::domain_website, SourceKind::general}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::string DocStatus::str() const {
  switch (state) {
    case DocState::ingested: return "ingested";
    case DocState::retained: return "retained";
    case DocState::filtered_out: return "filtered_out(" + reason + ")";
    case DocState::deduped_out: return "deduped_out(" + reason + ")";
  }
  return "ingested";
}

DocStatus DocStatus::parse(std::string_view s) {
  if (s == "ingested") return {};
  if (s == "retained") return {DocState::retained, {}};
  auto with_reason = [&](std::string_view prefix, DocState state) -> std::optional<DocStatus> {
    if (s.size() > prefix.size() + 1 && s.substr(0, prefix.size()) == prefix &&
        s[prefix.size()] == '(' && s.back() == ')') {
      return DocStatus{state, std::string(s.substr(prefix.size() + 1, s.size() - prefix.size() - 2))};
    }
    return std::nullopt;
  };
  if (auto st = with_reason("filtered_out", DocState::filtered_out)) return *st;
  if (auto st = with_reason("deduped_out", DocState::deduped_out)) return *st;
  throw Error(ErrorCode::SchemaError, "unknown document status '" + std::string(s) + "'");
}

std::string make_doc_id(std::string_view text, SourceKind kind) {
  std::string key = text::normalize_whitespace(text);
  key.push_back('\x1f');
  key += to_string(kind);
  return to_hex(murmur3_128(key));
}

json to_json(const Document& doc) {
  return json{{"doc_id", doc.doc_id},
              {"text", doc.text},
              {"source_kind", to_string(doc.source_kind)},
              {"token_count", doc.token_count},
              {"char_count", doc.char_count},
              {"status", doc.status.str()}};
}

Document document_from_json(const json& j) {
  auto field = [&](const char* name) -> const json& {
    if (!j.is_object() || !j.contains(name)) {
      throw Error(ErrorCode::SchemaError, std::string("document is missing '") + name + "'");
    }
    return j.at(name);
  };
  try {
    Document doc;
    doc.doc_id = field("doc_id").get<std::string>();
    doc.text = field("text").get<std::string>();
    const auto kind_name = field("source_kind").get<std::string>();
    const auto kind = parse_source_kind(kind_name);
    if (!kind) throw Error(ErrorCode::SchemaError, "unknown source_kind '" + kind_name + "'");
    doc.source_kind = *kind;
    doc.token_count = field("token_count").get<std::size_t>();
    doc.char_count = field("char_count").get<std::size_t>();
    doc.status = DocStatus::parse(field("status").get<std::string>());
    return doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("document field has wrong type: ") + e.what());
  }
}

std::vector<Document> read_documents(const std::filesystem::path& path) {
  std::vector<Document> docs;
  for_each_jsonl(path, [&](const json& j, std::size_t line) {
    try {
      docs.push_back(document_from_json(j));
    } catch (const Error& e) {
      throw Error(ErrorCode::SchemaError, path.string() + ":" + std::to_string(line) + ": " + e.detail());
    }
  });
  return docs;
}

void write_documents(const std::filesystem::path& path, const std::vector<Document>& docs) {
  std::string out;
  for (const auto& d : docs) {
    out += dump_line(to_json(d));
    out += '\n';
  }
  write_file(path, out);
}

}  // namespace domainkit
