#include "domainkit/ingest/ingest.hpp"

#include <algorithm>
#include <variant>

#include "domainkit/common/error.hpp"
#include "domainkit/common/parallel.hpp"

namespace domainkit {

void PipelineStats::merge(const PipelineStats& other) {
  records += other.records;
  documents += other.documents;
  for (const auto& [kind, s] : other.per_kind) {
    auto& mine = per_kind[kind];
    mine.records += s.records;
    mine.documents += s.documents;
    mine.tokens += s.tokens;
    mine.chars += s.chars;
  }
  for (const auto& [reason, n] : other.failures) failures[reason] += n;
}

std::size_t PipelineStats::total_tokens() const {
  std::size_t n = 0;
  for (const auto& [_, s] : per_kind) n += s.tokens;
  return n;
}

json PipelineStats::to_json() const {
  json kinds = json::object();
  for (const auto& [kind, s] : per_kind) {
    kinds[kind] = {{"records", s.records},
                   {"documents", s.documents},
                   {"tokens", s.tokens},
                   {"chars", s.chars}};
  }
  json fails = json::object();
  for (const auto& [reason, n] : failures) fails[reason] = n;
  return json{{"tokenizer", tokenizer},
              {"records", records},
              {"documents", documents},
              {"total_tokens", total_tokens()},
              {"per_kind", kinds},
              {"failures", fails}};
}

IngestResult ingest_stream(std::span<const RawRecord> records, const TokenizerSpec& tokenizer,
                           std::size_t workers) {
  if (!is_registered_tokenizer(tokenizer.name)) {
    throw Error(ErrorCode::UnknownTokenizer, "tokenizer '" + tokenizer.name + "' is not registered");
  }
  using Outcome = std::variant<Document, ErrorCode>;
  std::vector<Outcome> outcomes(records.size(), ErrorCode::EmptyAfterExtraction);
  parallel_for(records.size(), workers, [&](std::size_t i) {
    try {
      outcomes[i] = extract_text(records[i], tokenizer);
    } catch (const Error& e) {
      outcomes[i] = e.code();
    }
  });

  IngestResult result;
  result.stats.tokenizer = tokenizer.name;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::string kind(to_string(records[i].source_kind));
    auto& ks = result.stats.per_kind[kind];
    ++ks.records;
    ++result.stats.records;
    if (auto* doc = std::get_if<Document>(&outcomes[i])) {
      ++ks.documents;
      ks.tokens += doc->token_count;
      ks.chars += doc->char_count;
      ++result.stats.documents;
      result.docs.push_back(std::move(*doc));
    } else {
      ++result.stats.failures[std::string(error_code_name(std::get<ErrorCode>(outcomes[i])))];
    }
  }
  std::sort(result.docs.begin(), result.docs.end(), [](const Document& a, const Document& b) {
    return a.doc_id < b.doc_id;
  });
  return result;
}

std::vector<RawRecord> load_raw_records(const std::filesystem::path& path,
                                        std::optional<SourceKind> default_kind) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::recursive_directory_iterator(path)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  } else if (fs::exists(path)) {
    files.push_back(path);
  } else {
    throw Error(ErrorCode::IoError, "input '" + path.string() + "' does not exist");
  }

  std::vector<RawRecord> records;
  for (const auto& file : files) {
    if (file.extension() == ".jsonl") {
      for_each_jsonl(file, [&](const json& j, std::size_t line) {
        const std::string where = file.string() + ":" + std::to_string(line);
        if (!j.is_object() || !j.contains("text") || !j["text"].is_string()) {
          throw Error(ErrorCode::SchemaError, where + ": record needs a string 'text'");
        }
        RawRecord r;
        r.payload = j["text"].get<std::string>();
        r.source_id = j.contains("id") ? (j["id"].is_string() ? j["id"].get<std::string>()
                                                              : j["id"].dump())
                                       : where;
        if (j.contains("uri") && j["uri"].is_string()) r.uri = j["uri"].get<std::string>();
        std::optional<SourceKind> kind = default_kind;
        if (j.contains("kind") && j["kind"].is_string()) {
          kind = parse_source_kind(j["kind"].get<std::string>());
          if (!kind) throw Error(ErrorCode::SchemaError, where + ": unknown kind " + j["kind"].dump());
        }
        if (!kind) throw Error(ErrorCode::ConfigError, where + ": no source kind given");
        r.source_kind = *kind;
        records.push_back(std::move(r));
      });
    } else {
      if (!default_kind) {
        throw Error(ErrorCode::ConfigError, file.string() + ": no source kind given (use --kind)");
      }
      RawRecord r;
      r.source_id = file.string();
      r.source_kind = *default_kind;
      r.payload = read_file(file);
      records.push_back(std::move(r));
    }
  }
  return records;
}

}  // namespace domainkit
