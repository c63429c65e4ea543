#include <algorithm>
#include <array>
#include <set>

#include "domainkit/common/text.hpp"
#include "domainkit/sftgen/json_extract.hpp"
#include "domainkit/sftgen/responses.hpp"

namespace domainkit {
namespace {

std::string trim(std::string_view s) {
  const auto cps = text::decode_utf8(s);
  if (!cps) return std::string(s);
  std::size_t b = 0;
  std::size_t e = cps->size();
  while (b < e && text::is_space((*cps)[b])) ++b;
  while (e > b && text::is_space((*cps)[e - 1])) --e;
  return text::encode_utf8(std::u32string_view(*cps).substr(b, e - b));
}

std::string string_field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw Error(ErrorCode::MalformedResponse, std::string("missing field '") + key + "'");
  }
  const auto& v = obj[key];
  std::string s;
  if (v.is_string()) s = v.get<std::string>();
  else if (v.is_number() || v.is_boolean()) s = v.dump();
  else throw Error(ErrorCode::MalformedResponse, std::string("field '") + key + "' is not a string");
  s = trim(s);
  if (s.empty()) throw Error(ErrorCode::MalformedResponse, std::string("field '") + key + "' is empty");
  return s;
}

// "A", "A.", "A、", "(A)", "选项A", "a" -> "A"; empty when no option letter.
std::string normalize_option_key(std::string_view raw) {
  const std::string s = trim(raw);
  const auto cps = text::decode_utf8(s);
  if (!cps) return {};
  std::string letters;
  for (char32_t cp : *cps) {
    if (text::is_ascii_alpha(cp)) {
      letters.push_back(static_cast<char>(cp >= U'a' ? cp - U'a' + U'A' : cp));
    } else if (cp >= 0xFF21 && cp <= 0xFF3A) {  // fullwidth A-Z
      letters.push_back(static_cast<char>('A' + (cp - 0xFF21)));
    }
  }
  if (letters.size() == 1) return letters;
  return s;
}

QuestionType parse_question_type(const std::string& raw) {
  const auto lower = text::to_lower_ascii(raw);
  if (lower.find("judg") != std::string::npos || lower.find("true") != std::string::npos ||
      raw.find("判断") != std::string::npos) {
    return QuestionType::judgment;
  }
  if (lower.find("single") != std::string::npos || lower.find("choice") != std::string::npos ||
      raw.find("单选") != std::string::npos || raw.find("选择") != std::string::npos) {
    return QuestionType::single_choice;
  }
  throw Error(ErrorCode::MalformedResponse, "unknown question_type '" + raw + "'");
}

std::map<std::string, std::string> parse_options(const json& v) {
  std::map<std::string, std::string> options;
  auto add = [&](const std::string& key_raw, const std::string& value) {
    const auto key = normalize_option_key(key_raw);
    if (key.empty() || options.contains(key)) {
      throw Error(ErrorCode::MalformedResponse, "bad or duplicate option key '" + key_raw + "'");
    }
    options[key] = trim(value);
  };
  if (v.is_object()) {
    for (const auto& [k, val] : v.items()) {
      if (!val.is_string()) throw Error(ErrorCode::MalformedResponse, "option text must be a string");
      add(k, val.get<std::string>());
    }
  } else if (v.is_string()) {
    const auto inner = extract_first_json(v.get<std::string>());
    if (!inner || !inner->is_object()) {
      throw Error(ErrorCode::MalformedResponse, "candidate_options is not a JSON object");
    }
    return parse_options(*inner);
  } else if (v.is_array()) {
    // ["A. 水泥", "B. 石膏", ...]
    for (const auto& entry : v) {
      if (!entry.is_string()) throw Error(ErrorCode::MalformedResponse, "option entry must be a string");
      const auto s = trim(entry.get<std::string>());
      if (s.empty() || !text::is_ascii_alpha(static_cast<unsigned char>(s[0]))) {
        throw Error(ErrorCode::MalformedResponse, "option entry '" + s + "' has no letter");
      }
      std::size_t cut = 1;
      while (cut < s.size() && (s[cut] == '.' || s[cut] == ':' || s[cut] == ')' || s[cut] == ' ')) ++cut;
      if (s.compare(cut, 3, "、") == 0 || s.compare(cut, 3, "：") == 0) cut += 3;
      add(s.substr(0, 1), s.substr(cut));
    }
  } else {
    throw Error(ErrorCode::MalformedResponse, "candidate_options has unsupported type");
  }
  return options;
}

struct RoleLabel {
  std::string_view label;
  Role role;
};

constexpr std::array<RoleLabel, 16> kRoleLabels{{
    {"user", Role::user},        {"用户", Role::user},          {"客户", Role::user},
    {"业主", Role::user},        {"顾客", Role::user},          {"Q", Role::user},
    {"问", Role::user},          {"assistant", Role::assistant}, {"助手", Role::assistant},
    {"AI", Role::assistant},     {"你", Role::assistant},       {"设计师", Role::assistant},
    {"我", Role::assistant},     {"A", Role::assistant},        {"答", Role::assistant},
    {"系统", Role::assistant},
}};

// Matches "<label>:" / "<label>：" at the start of a line (optionally wrapped
// in markdown bold); returns the role and the remaining content.
std::optional<std::pair<Role, std::string>> match_label(std::string_view line) {
  std::string s = trim(line);
  auto strip_prefix = [&](std::string_view p) {
    if (std::string_view(s).substr(0, p.size()) == p) s = trim(std::string_view(s).substr(p.size()));
  };
  strip_prefix("**");
  strip_prefix("-");
  for (const auto& [label, role] : kRoleLabels) {
    if (s.size() < label.size()) continue;
    const auto head = std::string_view(s).substr(0, label.size());
    const bool same = label.size() > 2 && label[0] < 0x80 ? text::to_lower_ascii(head) == text::to_lower_ascii(label)
                                                          : head == label;
    if (!same) continue;
    std::string_view rest = std::string_view(s).substr(label.size());
    if (rest.substr(0, 2) == "**") rest.remove_prefix(2);
    if (!rest.empty() && rest[0] == ':') {
      rest.remove_prefix(1);
    } else if (rest.substr(0, 3) == "：") {
      rest.remove_prefix(3);
    } else {
      continue;
    }
    if (rest.substr(0, 2) == "**") rest.remove_prefix(2);
    return std::make_pair(role, trim(rest));
  }
  return std::nullopt;
}

std::vector<Turn> turns_from_json(const json& arr) {
  std::vector<Turn> turns;
  for (const auto& entry : arr) {
    if (!entry.is_object()) throw Error(ErrorCode::MalformedResponse, "dialogue entry must be an object");
    const auto role_name = text::to_lower_ascii(string_field(entry, "role"));
    const auto role = parse_role(role_name);
    if (!role) throw Error(ErrorCode::MalformedResponse, "unknown role '" + role_name + "'");
    turns.push_back({*role, string_field(entry, "content")});
  }
  return turns;
}

}  // namespace

OneTurnParse parse_one_turn_response(std::string_view raw, const std::vector<std::string>& categories,
                                     bool lenient) {
  auto parsed = extract_first_json(raw);
  if (!parsed) throw Error(ErrorCode::MalformedResponse, "no JSON value in response");
  json arr = *parsed;
  if (arr.is_object()) {
    const json* only_array = nullptr;
    std::size_t arrays = 0;
    for (const auto& [_, v] : arr.items()) {
      if (v.is_array()) {
        ++arrays;
        only_array = &v;
      }
    }
    if (arrays == 1) arr = *only_array;
  }
  if (!arr.is_array()) throw Error(ErrorCode::MalformedResponse, "expected a JSON array of questions");

  const std::set<std::string> allowed(categories.begin(), categories.end());
  OneTurnParse out;
  for (const auto& entry : arr) {
    QAPair qa;
    try {
      qa = {string_field(entry, "question"), string_field(entry, "answer"), string_field(entry, "category")};
    } catch (const Error& e) {
      if (!lenient) throw;
      out.salvaged.emplace_back(e.code(), e.detail());
      continue;
    }
    if (!allowed.contains(qa.category)) {
      if (!lenient) throw Error(ErrorCode::CategoryOutOfSet, "category '" + qa.category + "' is not in the list");
      out.salvaged.emplace_back(ErrorCode::CategoryOutOfSet, qa.category);
      continue;
    }
    out.items.push_back(std::move(qa));
  }
  const std::size_t n = lenient ? out.items.size() : arr.size();
  if (n < kMinQuestionsPerDoc || n > kMaxQuestionsPerDoc) {
    const std::string msg = std::to_string(n) + " questions, expected " + std::to_string(kMinQuestionsPerDoc) +
                            "-" + std::to_string(kMaxQuestionsPerDoc);
    if (!lenient) throw Error(ErrorCode::CountOutOfRange, msg);
    out.salvaged.emplace_back(ErrorCode::CountOutOfRange, msg);
    if (out.items.size() > kMaxQuestionsPerDoc) out.items.resize(kMaxQuestionsPerDoc);
  }
  if (out.items.empty()) throw Error(ErrorCode::MalformedResponse, "no usable questions in response");
  return out;
}

std::vector<Turn> parse_dialogue_response(std::string_view raw) {
  std::vector<Turn> turns;
  const auto parsed = extract_first_json(raw);
  if (parsed && parsed->is_array() && !parsed->empty() && (*parsed)[0].is_object()) {
    turns = turns_from_json(*parsed);
  } else {
    bool open = false;
    std::size_t start = 0;
    for (;;) {
      const auto nl = raw.find('\n', start);
      const auto line = raw.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
      if (auto hit = match_label(line)) {
        turns.push_back({hit->first, std::move(hit->second)});
        open = true;
      } else if (open) {
        auto& content = turns.back().content;
        if (!content.empty()) content.push_back('\n');
        content += line;
      }
      if (nl == std::string_view::npos) break;
      start = nl + 1;
    }
    for (auto& t : turns) t.content = text::normalize_whitespace(t.content);
  }
  if (turns.empty()) throw Error(ErrorCode::MalformedResponse, "no dialogue turns found");
  validate_role_order(turns);
  for (const auto& t : turns) {
    if (t.content.empty()) throw Error(ErrorCode::MalformedResponse, "empty dialogue turn");
  }
  const auto users = std::count_if(turns.begin(), turns.end(), [](const Turn& t) { return t.role == Role::user; });
  if (turns.size() < 4 || users < 2) {
    throw Error(ErrorCode::MalformedResponse,
                "dialogue needs at least 4 turns and 2 user turns, got " + std::to_string(turns.size()));
  }
  return turns;
}

MCQItem parse_mcq_response(std::string_view raw) {
  const auto parsed = extract_first_json(raw);
  if (!parsed || !parsed->is_object()) throw Error(ErrorCode::MalformedResponse, "no JSON object in response");
  const json& obj = *parsed;
  MCQItem item;
  item.question = string_field(obj, "question");
  item.question_type = parse_question_type(string_field(obj, "question_type"));
  if (!obj.contains("candidate_options")) throw Error(ErrorCode::MalformedResponse, "missing candidate_options");
  item.options = parse_options(obj["candidate_options"]);
  if (!obj.contains("answer") || !obj["answer"].is_object()) {
    throw Error(ErrorCode::MalformedResponse, "missing answer object");
  }
  item.correct_option = normalize_option_key(string_field(obj["answer"], "correct_option"));
  item.reason = obj["answer"].contains("reason") ? string_field(obj["answer"], "reason") : std::string{};
  validate(item);
  return item;
}

}  // namespace domainkit
