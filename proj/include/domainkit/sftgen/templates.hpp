#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace domainkit {

enum class GenKind { one_turn, multi_turn, mcq };

std::string_view to_string(GenKind kind);
// Accepts "one_turn" / "one-turn", "multi_turn" / "multi-turn", "mcq".
GenKind parse_gen_kind(std::string_view s);

inline constexpr std::string_view kKnowledgeSlot = "(相关知识)";
inline constexpr std::string_view kCategorySlot = "(类别列表)";
inline constexpr std::size_t kExpectedCategoryCount = 40;

struct PromptTemplate {
  GenKind kind = GenKind::one_turn;
  std::string body;
  std::vector<std::string> category_list;  // one_turn only

  // Throws ConfigError unless the body holds exactly one knowledge slot (and,
  // for one_turn, a non-empty category list). Returns warnings, e.g. a
  // category list that does not have 40 entries.
  std::vector<std::string> validate() const;
  std::string render(std::string_view knowledge) const;
};

// DOMAINKIT_DATA_DIR from the environment, else the source tree's data/.
std::filesystem::path default_data_dir();

// Blank lines and '#' comments skipped.
std::vector<std::string> load_categories(const std::filesystem::path& path);
// Reads <prompts_dir>/<kind>.txt; one_turn also loads `categories_file`.
PromptTemplate load_template(GenKind kind, const std::filesystem::path& prompts_dir,
                             const std::filesystem::path& categories_file);
PromptTemplate load_default_template(GenKind kind);

}  // namespace domainkit
