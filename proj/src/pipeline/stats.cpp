#include "domainkit/pipeline/stats.hpp"

#include <cstdio>
#include <map>

#include "domainkit/common/error.hpp"
#include "domainkit/evalharness/dataset.hpp"
#include "domainkit/evalharness/eval.hpp"
#include "domainkit/ingest/document.hpp"
#include "domainkit/ingest/tokenizer.hpp"
#include "domainkit/pipeline/manifest.hpp"
#include "domainkit/sftgen/instruction.hpp"
#include "domainkit/sftgen/templates.hpp"
#include "domainkit/sftgen/term_frequency.hpp"

namespace domainkit {

namespace fs = std::filesystem;

std::string_view to_string(ArtifactSchema s) {
  switch (s) {
    case ArtifactSchema::documents: return "documents";
    case ArtifactSchema::instructions: return "instructions";
    case ArtifactSchema::mcq: return "mcq";
    case ArtifactSchema::training_items: return "training_items";
    case ArtifactSchema::dup_pairs: return "dup_pairs";
    case ArtifactSchema::manifest: return "manifest";
    case ArtifactSchema::eval_report: return "eval_report";
    case ArtifactSchema::filter_report: return "filter_report";
    case ArtifactSchema::dedup_report: return "dedup_report";
    case ArtifactSchema::mix_report: return "mix_report";
    case ArtifactSchema::trainer_config: return "trainer_config";
  }
  return "unknown";
}

namespace {

bool has_all(const json& j, std::initializer_list<const char*> keys) {
  if (!j.is_object()) return false;
  for (const char* k : keys) {
    if (!j.contains(k)) return false;
  }
  return true;
}

std::optional<ArtifactSchema> classify_row(const json& j) {
  if (has_all(j, {"doc_id", "text", "source_kind", "status"})) return ArtifactSchema::documents;
  if (has_all(j, {"kind", "turns"})) return ArtifactSchema::instructions;
  if (has_all(j, {"question", "options", "correct_option"})) return ArtifactSchema::mcq;
  if (has_all(j, {"origin", "text"})) return ArtifactSchema::training_items;
  if (has_all(j, {"a", "b", "jaccard"})) return ArtifactSchema::dup_pairs;
  if (has_all(j, {"stage", "inputs", "outputs", "config_digest"})) return ArtifactSchema::manifest;
  return std::nullopt;
}

std::optional<ArtifactSchema> classify_object(const json& j) {
  if (has_all(j, {"overall_micro", "per_item"}) || has_all(j, {"runs", "best_shots"})) {
    return ArtifactSchema::eval_report;
  }
  if (has_all(j, {"input", "retained", "dropped"})) return ArtifactSchema::filter_report;
  if (has_all(j, {"input", "retained", "removed", "tokens_before"})) return ArtifactSchema::dedup_report;
  if (has_all(j, {"domain_tokens", "general_tokens", "achieved_ratio"})) return ArtifactSchema::mix_report;
  if (has_all(j, {"precision", "epochs", "max_length"})) return ArtifactSchema::trainer_config;
  return classify_row(j);
}

std::string line(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

std::string terms_text(const std::vector<TermCount>& terms) {
  std::string out = "top terms:\n";
  for (const auto& [t, c] : terms) out += line("  %-12s %zu\n", t.c_str(), c);
  return out;
}

json terms_json(const std::vector<TermCount>& terms) {
  json arr = json::array();
  for (const auto& [t, c] : terms) arr.push_back({{"term", t}, {"count", c}});
  return arr;
}

std::set<std::string> stopwords_for(const fs::path& file) {
  const fs::path p = file.empty() ? default_data_dir() / "stopwords.txt" : file;
  if (file.empty() && !fs::exists(p)) return {};
  return load_stopwords(p);
}

ArtifactStats documents_stats(const fs::path& path) {
  const auto docs = read_documents(path);
  std::map<std::string, std::pair<std::size_t, std::size_t>> per_kind;
  std::map<std::string, std::size_t> per_status;
  std::size_t tokens = 0;
  std::size_t chars = 0;
  for (const auto& d : docs) {
    auto& k = per_kind[std::string(to_string(d.source_kind))];
    ++k.first;
    k.second += d.token_count;
    ++per_status[d.status.str()];
    tokens += d.token_count;
    chars += d.char_count;
  }
  ArtifactStats s;
  s.schema = ArtifactSchema::documents;
  json kinds = json::object();
  std::string text = line("documents: %zu\ntokens (%s): %zu\nchars: %zu\n", docs.size(),
                          std::string(kDefaultTokenizer).c_str(), tokens, chars);
  text += line("%-18s %8s %12s\n", "source_kind", "docs", "tokens");
  for (const auto& [k, v] : per_kind) {
    kinds[k] = {{"documents", v.first}, {"tokens", v.second}};
    text += line("%-18s %8zu %12zu\n", k.c_str(), v.first, v.second);
  }
  text += "status:\n";
  for (const auto& [k, v] : per_status) text += line("  %-24s %zu\n", k.c_str(), v);
  s.summary = {{"documents", docs.size()}, {"tokens", tokens}, {"chars", chars},
               {"tokenizer", kDefaultTokenizer}, {"per_source_kind", kinds}, {"per_status", per_status}};
  s.text = std::move(text);
  return s;
}

ArtifactStats instruction_stats(const fs::path& path, std::size_t top, const fs::path& stopwords) {
  const auto samples = read_instructions(path);
  std::map<std::string, std::size_t> per_kind;
  std::map<std::string, std::size_t> per_category;
  std::size_t turns = 0;
  for (const auto& s : samples) {
    ++per_kind[std::string(to_string(s.kind))];
    if (s.category) ++per_category[*s.category];
    turns += s.turns.size();
  }
  const auto terms = term_frequency(samples, stopwords_for(stopwords), top);
  ArtifactStats s;
  s.schema = ArtifactSchema::instructions;
  s.summary = {{"samples", samples.size()}, {"turns", turns}, {"per_kind", per_kind},
               {"per_category", per_category}, {"top_terms", terms_json(terms)}};
  s.text = line("samples: %zu\nturns: %zu\n", samples.size(), turns);
  for (const auto& [k, v] : per_kind) s.text += line("  %-12s %zu\n", k.c_str(), v);
  if (!per_category.empty()) {
    s.text += "categories:\n";
    for (const auto& [k, v] : per_category) s.text += line("  %-16s %zu\n", k.c_str(), v);
  }
  s.text += terms_text(terms);
  return s;
}

ArtifactStats mcq_stats(const fs::path& path, std::size_t top, const fs::path& stopwords) {
  const auto ds = load_dataset(path);
  const auto st = ds.stats();
  const auto terms = term_frequency(ds.items, stopwords_for(stopwords), top);
  ArtifactStats s;
  s.schema = ArtifactSchema::mcq;
  s.summary = st.to_json();
  s.summary["top_terms"] = terms_json(terms);
  s.text = line("questions: %zu\n", st.total) + st.table();
  s.text += "categories:\n";
  for (const auto& [k, v] : st.per_category) s.text += line("  %-20s %zu\n", k.c_str(), v);
  s.text += terms_text(terms);
  return s;
}

ArtifactStats training_stats(const fs::path& path) {
  std::map<std::string, std::pair<std::size_t, std::size_t>> per_origin;
  std::size_t n = 0;
  for_each_jsonl(path, [&](const json& j, std::size_t) {
    auto& o = per_origin[j.value("origin", "")];
    ++o.first;
    o.second += j.value("token_count", std::size_t{0});
    ++n;
  });
  ArtifactStats s;
  s.schema = ArtifactSchema::training_items;
  json origins = json::object();
  s.text = line("items: %zu\n%-20s %8s %12s\n", n, "origin", "items", "tokens");
  for (const auto& [k, v] : per_origin) {
    origins[k] = {{"items", v.first}, {"tokens", v.second}};
    s.text += line("%-20s %8zu %12zu\n", k.c_str(), v.first, v.second);
  }
  s.summary = {{"items", n}, {"per_origin", origins}};
  return s;
}

ArtifactStats eval_stats(const json& j) {
  ArtifactStats s;
  s.schema = ArtifactSchema::eval_report;
  std::vector<EvalReport> reports;
  if (j.contains("runs")) {
    for (const auto& r : j["runs"]) reports.push_back(EvalReport::from_json(r));
  } else {
    reports.push_back(EvalReport::from_json(j));
  }
  json runs = json::array();
  for (const auto& r : reports) {
    runs.push_back({{"dataset", r.dataset}, {"shots", r.config.shots}, {"correct", r.overall.correct},
                    {"total", r.overall.total}, {"overall_micro", r.overall_micro},
                    {"overall_macro", r.overall_macro}, {"degraded", r.degraded}});
    s.text += line("%s k=%zu: micro %s (%zu/%zu), macro %.2f%s\n", r.dataset.c_str(), r.config.shots,
                   format_percent(r.overall.hundredths()).c_str(), r.overall.correct, r.overall.total, r.overall_macro,
                   r.degraded ? " [degraded]" : "");
    for (const auto& [cat, sc] : r.per_category) {
      s.text += line("  %-20s %s (%zu/%zu)\n", cat.c_str(), format_percent(sc.hundredths()).c_str(), sc.correct,
                     sc.total);
    }
  }
  s.summary = {{"runs", runs}};
  return s;
}

ArtifactStats rows_stats(ArtifactSchema schema, const fs::path& path) {
  ArtifactStats s;
  s.schema = schema;
  const auto rows = read_jsonl(path);
  if (schema == ArtifactSchema::manifest) {
    json stages = json::array();
    for (const auto& r : rows) {
      const auto e = ManifestEntry::from_json(r);
      stages.push_back(e.stage);
      s.text += line("%-8s %zu in, %zu out, config %.12s\n", e.stage.c_str(), e.inputs.size(), e.outputs.size(),
                     e.config_digest.c_str());
    }
    s.summary = {{"entries", rows.size()}, {"stages", stages}};
  } else {
    s.summary = {{"pairs", rows.size()}};
    s.text = line("duplicate pairs: %zu\n", rows.size());
  }
  return s;
}

}  // namespace

ArtifactSchema detect_schema(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw Error(ErrorCode::IoError, "not a file: " + path.string());
  const std::string content = read_file(path);
  const json whole = json::parse(content, nullptr, false);
  if (!whole.is_discarded()) {
    if (auto s = classify_object(whole)) return *s;
    throw Error(ErrorCode::UnknownSchema, path.string() + ": unrecognised JSON object");
  }
  std::size_t start = 0;
  while (start < content.size()) {
    const auto nl = content.find('\n', start);
    const auto ln = content.substr(start, nl == std::string::npos ? std::string::npos : nl - start);
    start = nl == std::string::npos ? content.size() : nl + 1;
    if (ln.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json row = json::parse(ln, nullptr, false);
    if (!row.is_discarded()) {
      if (auto s = classify_row(row)) return *s;
    }
    break;
  }
  throw Error(ErrorCode::UnknownSchema, path.string() + ": not a recognised artifact");
}

ArtifactStats artifact_stats(const fs::path& path, std::size_t top_terms, const fs::path& stopwords_file) {
  const ArtifactSchema schema = detect_schema(path);
  switch (schema) {
    case ArtifactSchema::documents: return documents_stats(path);
    case ArtifactSchema::instructions: return instruction_stats(path, top_terms, stopwords_file);
    case ArtifactSchema::mcq: return mcq_stats(path, top_terms, stopwords_file);
    case ArtifactSchema::training_items: return training_stats(path);
    case ArtifactSchema::dup_pairs:
    case ArtifactSchema::manifest: return rows_stats(schema, path);
    case ArtifactSchema::eval_report: return eval_stats(json::parse(read_file(path)));
    default: break;
  }
  ArtifactStats s;
  s.schema = schema;
  s.summary = json::parse(read_file(path));
  s.text = std::string(to_string(schema)) + ":\n" + dump_pretty(s.summary) + "\n";
  return s;
}

}  // namespace domainkit
