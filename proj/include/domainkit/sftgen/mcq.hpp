#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "domainkit/common/jsonl.hpp"

namespace domainkit {

enum class QuestionType { single_choice, judgment };
enum class Difficulty { fundamentals, expertise, innovative_design };

std::string_view to_string(QuestionType t);
std::string_view to_string(Difficulty d);
std::optional<Difficulty> parse_difficulty(std::string_view s);

struct MCQItem {
  std::string id;
  std::string question;
  QuestionType question_type = QuestionType::single_choice;
  std::map<std::string, std::string> options;  // letter -> text
  std::string correct_option;
  std::string reason;
  std::string category;
  std::string subclass;
  Difficulty difficulty = Difficulty::fundamentals;
  std::optional<std::string> split;  // "dev" / "test"
  std::string knowledge_id;

  friend bool operator==(const MCQItem&, const MCQItem&) = default;
};

// single_choice: options exactly A-D; judgment: exactly A, B (ArityError).
// correct_option must be an option key (OptionMismatch). Question must be
// non-empty (MalformedResponse).
void validate(const MCQItem& item);

json to_json(const MCQItem& item);
// Missing or ill-typed fields raise SchemaError; invariant violations raise
// the codes listed for validate().
MCQItem mcq_from_json(const json& j);

std::vector<MCQItem> read_mcq_items(const std::filesystem::path& path);
void write_mcq_items(const std::filesystem::path& path, const std::vector<MCQItem>& items);

}  // namespace domainkit
