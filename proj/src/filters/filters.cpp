#include "domainkit/filters/filters.hpp"

#include <fstream>

#include "domainkit/common/error.hpp"
#include "domainkit/common/text.hpp"

namespace domainkit {

FilterConfig FilterConfig::from_json(const json& j, const std::filesystem::path& base_dir) {
  FilterConfig cfg;
  if (j.is_null()) return cfg;
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "filter config must be an object");
  try {
    if (j.contains("sensitive_word_list") && !j["sensitive_word_list"].is_null()) {
      std::filesystem::path p = j["sensitive_word_list"].get<std::string>();
      cfg.sensitive_word_list = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    }
    if (j.contains("min_effective_chars")) {
      const auto v = j["min_effective_chars"].get<long long>();
      if (v < 0) throw Error(ErrorCode::ConfigError, "min_effective_chars must be >= 0");
      cfg.min_effective_chars = static_cast<std::size_t>(v);
    }
    if (j.contains("target_language")) {
      const auto lang = j["target_language"].get<std::string>();
      if (lang == "zh") cfg.target_language = Language::zh;
      else if (lang == "en") cfg.target_language = Language::en;
      else throw Error(ErrorCode::ConfigError, "target_language must be zh or en");
    }
    if (j.contains("min_language_ratio")) {
      cfg.min_language_ratio = j["min_language_ratio"].get<double>();
      if (!(cfg.min_language_ratio >= 0.0 && cfg.min_language_ratio <= 1.0)) {
        throw Error(ErrorCode::ConfigError, "min_language_ratio must lie in [0, 1]");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("filter config: ") + e.what());
  }
  return cfg;
}

json FilterConfig::to_json() const {
  return json{{"sensitive_word_list",
               sensitive_word_list ? json(sensitive_word_list->string()) : json(nullptr)},
              {"min_effective_chars", min_effective_chars},
              {"target_language", target_language == Language::zh ? "zh" : "en"},
              {"min_language_ratio", min_language_ratio}};
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::LexiconMissing, "cannot read lexicon " + path.string());
  Lexicon lex;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto b = line.find_first_not_of(" \t");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t");
    lex.insert(line.substr(b, e - b + 1));
  }
  return lex;
}

Verdict filter_sensitive(const Document& doc, const Lexicon& lexicon) {
  Verdict v;
  for (const auto& word : lexicon) {
    if (!word.empty() && doc.text.find(word) != std::string::npos) v.matched.push_back(word);
  }
  v.pass = v.matched.empty();
  return v;
}

double language_ratio(std::string_view s, Language lang) {
  const auto cps = text::decode_utf8(s);
  if (!cps) return 0.0;
  std::size_t counted = 0;
  std::size_t target = 0;
  for (char32_t cp : *cps) {
    if (text::is_space(cp) || text::is_punct(cp)) continue;
    ++counted;
    if (lang == Language::zh ? text::is_cjk(cp) : text::is_ascii_alpha(cp)) ++target;
  }
  return counted == 0 ? 0.0 : static_cast<double>(target) / static_cast<double>(counted);
}

Verdict filter_language(const Document& doc, const FilterConfig& cfg) {
  Verdict v;
  v.ratio = language_ratio(doc.text, cfg.target_language);
  v.pass = v.ratio >= cfg.min_language_ratio;
  return v;
}

Verdict filter_length(const Document& doc, const FilterConfig& cfg) {
  Verdict v;
  v.pass = doc.char_count >= cfg.min_effective_chars;
  return v;
}

json FilterReport::to_json() const {
  return json{{"input", input},
              {"retained", retained},
              {"dropped",
               {{"sensitive", dropped_sensitive},
                {"language", dropped_language},
                {"length", dropped_length}}}};
}

FilterResult run_filters(std::span<const Document> docs, const FilterConfig& cfg,
                         const Lexicon& lexicon) {
  FilterResult result;
  result.report.input = docs.size();
  for (const auto& doc : docs) {
    const char* reason = nullptr;
    if (!filter_sensitive(doc, lexicon)) {
      reason = "sensitive";
      ++result.report.dropped_sensitive;
    } else if (!filter_language(doc, cfg)) {
      reason = "language";
      ++result.report.dropped_language;
    } else if (!filter_length(doc, cfg)) {
      reason = "length";
      ++result.report.dropped_length;
    }
    if (reason) {
      Document dropped = doc;
      dropped.status = DocStatus::filtered(reason);
      result.dropped.push_back(std::move(dropped));
    } else {
      result.retained.push_back(doc);
    }
  }
  result.report.retained = result.retained.size();
  return result;
}

FilterResult run_filters(std::span<const Document> docs, const FilterConfig& cfg) {
  const Lexicon lexicon = cfg.sensitive_word_list ? load_lexicon(*cfg.sensitive_word_list) : Lexicon{};
  return run_filters(docs, cfg, lexicon);
}

}  // namespace domainkit
