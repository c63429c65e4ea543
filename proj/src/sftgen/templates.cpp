#include "domainkit/sftgen/templates.hpp"

#include <cstdlib>
#include <fstream>

#include "domainkit/common/error.hpp"
#include "domainkit/common/jsonl.hpp"

namespace domainkit {
namespace {

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

}  // namespace

std::string_view to_string(GenKind kind) {
  switch (kind) {
    case GenKind::one_turn: return "one_turn";
    case GenKind::multi_turn: return "multi_turn";
    case GenKind::mcq: return "mcq";
  }
  return "one_turn";
}

GenKind parse_gen_kind(std::string_view s) {
  if (s == "one_turn" || s == "one-turn") return GenKind::one_turn;
  if (s == "multi_turn" || s == "multi-turn") return GenKind::multi_turn;
  if (s == "mcq") return GenKind::mcq;
  throw Error(ErrorCode::ConfigError, "unknown generation kind '" + std::string(s) + "'");
}

std::vector<std::string> PromptTemplate::validate() const {
  const auto slots = count_occurrences(body, kKnowledgeSlot);
  if (slots != 1) {
    throw Error(ErrorCode::ConfigError, std::string(to_string(kind)) + " template must contain exactly one " +
                                            std::string(kKnowledgeSlot) + " slot, found " +
                                            std::to_string(slots));
  }
  std::vector<std::string> warnings;
  if (kind == GenKind::one_turn) {
    if (category_list.empty()) throw Error(ErrorCode::ConfigError, "one_turn template needs a category list");
    if (category_list.size() != kExpectedCategoryCount) {
      warnings.push_back("category list has " + std::to_string(category_list.size()) + " entries, expected " +
                         std::to_string(kExpectedCategoryCount));
    }
  }
  return warnings;
}

std::string PromptTemplate::render(std::string_view knowledge) const {
  std::string out = body;
  if (kind == GenKind::one_turn) {
    std::string joined;
    for (std::size_t i = 0; i < category_list.size(); ++i) {
      if (i > 0) joined += "、";
      joined += category_list[i];
    }
    replace_all(out, kCategorySlot, joined);
  }
  const auto pos = out.find(kKnowledgeSlot);
  if (pos != std::string::npos) out.replace(pos, kKnowledgeSlot.size(), knowledge);
  return out;
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("DOMAINKIT_DATA_DIR"); env && *env) return env;
  return DOMAINKIT_DATA_DIR;
}

std::vector<std::string> load_categories(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read category list " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto b = line.find_first_not_of(" \t");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t");
    out.push_back(line.substr(b, e - b + 1));
  }
  return out;
}

PromptTemplate load_template(GenKind kind, const std::filesystem::path& prompts_dir,
                             const std::filesystem::path& categories_file) {
  PromptTemplate t;
  t.kind = kind;
  t.body = read_file(prompts_dir / (std::string(to_string(kind)) + ".txt"));
  while (!t.body.empty() && (t.body.back() == '\n' || t.body.back() == '\r')) t.body.pop_back();
  if (kind == GenKind::one_turn) t.category_list = load_categories(categories_file);
  t.validate();
  return t;
}

PromptTemplate load_default_template(GenKind kind) {
  const auto dir = default_data_dir();
  return load_template(kind, dir / "prompts", dir / "categories.txt");
}

}  // namespace domainkit
