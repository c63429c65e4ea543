#include "domainkit/sftgen/mcq.hpp"

#include "domainkit/common/error.hpp"

namespace domainkit {

std::string_view to_string(QuestionType t) {
  return t == QuestionType::single_choice ? "single_choice" : "judgment";
}

std::string_view to_string(Difficulty d) {
  switch (d) {
    case Difficulty::fundamentals: return "fundamentals";
    case Difficulty::expertise: return "expertise";
    case Difficulty::innovative_design: return "innovative_design";
  }
  return "fundamentals";
}

std::optional<Difficulty> parse_difficulty(std::string_view s) {
  for (auto d : {Difficulty::fundamentals, Difficulty::expertise, Difficulty::innovative_design}) {
    if (to_string(d) == s) return d;
  }
  return std::nullopt;
}

void validate(const MCQItem& item) {
  if (item.question.empty()) throw Error(ErrorCode::MalformedResponse, "question is empty");
  const std::vector<std::string> expected =
      item.question_type == QuestionType::single_choice ? std::vector<std::string>{"A", "B", "C", "D"}
                                                        : std::vector<std::string>{"A", "B"};
  std::vector<std::string> keys;
  for (const auto& [k, _] : item.options) keys.push_back(k);
  if (keys != expected) {
    std::string got;
    for (const auto& k : keys) got += k;
    throw Error(ErrorCode::ArityError, std::string(to_string(item.question_type)) + " needs options " +
                                           (expected.size() == 4 ? "A-D" : "A,B") + ", got [" + got + "]");
  }
  if (!item.options.contains(item.correct_option)) {
    throw Error(ErrorCode::OptionMismatch, "correct option '" + item.correct_option + "' is not an option");
  }
}

json to_json(const MCQItem& item) {
  json options = json::object();
  for (const auto& [k, v] : item.options) options[k] = v;
  json j{{"id", item.id},
         {"question", item.question},
         {"question_type", to_string(item.question_type)},
         {"options", options},
         {"correct_option", item.correct_option},
         {"reason", item.reason},
         {"category", item.category},
         {"subclass", item.subclass},
         {"difficulty", to_string(item.difficulty)}};
  if (item.split) j["split"] = *item.split;
  if (!item.knowledge_id.empty()) j["knowledge_id"] = item.knowledge_id;
  return j;
}

MCQItem mcq_from_json(const json& j) {
  MCQItem item;
  try {
    if (!j.is_object()) throw Error(ErrorCode::SchemaError, "MCQ item must be an object");
    for (const char* key : {"question", "question_type", "options", "correct_option"}) {
      if (!j.contains(key) || j[key].is_null()) {
        throw Error(ErrorCode::SchemaError, std::string("MCQ item is missing '") + key + "'");
      }
    }
    item.id = j.value("id", "");
    item.question = j["question"].get<std::string>();
    const auto type = j["question_type"].get<std::string>();
    if (type == "single_choice") item.question_type = QuestionType::single_choice;
    else if (type == "judgment") item.question_type = QuestionType::judgment;
    else throw Error(ErrorCode::SchemaError, "unknown question_type '" + type + "'");
    if (!j["options"].is_object()) throw Error(ErrorCode::SchemaError, "options must be an object");
    for (const auto& [k, v] : j["options"].items()) item.options[k] = v.get<std::string>();
    item.correct_option = j["correct_option"].get<std::string>();
    item.reason = j.value("reason", "");
    item.category = j.value("category", "");
    item.subclass = j.value("subclass", "");
    const auto diff = j.value("difficulty", "fundamentals");
    const auto d = parse_difficulty(diff);
    if (!d) throw Error(ErrorCode::SchemaError, "unknown difficulty '" + diff + "'");
    item.difficulty = *d;
    if (j.contains("split") && j["split"].is_string()) item.split = j["split"].get<std::string>();
    item.knowledge_id = j.value("knowledge_id", "");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("MCQ item: ") + e.what());
  }
  validate(item);
  return item;
}

std::vector<MCQItem> read_mcq_items(const std::filesystem::path& path) {
  std::vector<MCQItem> items;
  for_each_jsonl(path, [&](const json& j, std::size_t line) {
    try {
      items.push_back(mcq_from_json(j));
    } catch (const Error& e) {
      throw Error(ErrorCode::SchemaError, path.string() + ":" + std::to_string(line) + ": " +
                                              std::string(error_code_name(e.code())) + ": " + e.detail());
    }
  });
  return items;
}

void write_mcq_items(const std::filesystem::path& path, const std::vector<MCQItem>& items) {
  std::vector<json> rows;
  rows.reserve(items.size());
  for (const auto& item : items) rows.push_back(to_json(item));
  write_jsonl(path, rows);
}

}  // namespace domainkit
