#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "domainkit/common/error.hpp"
#include "domainkit/sftgen/instruction.hpp"
#include "domainkit/sftgen/mcq.hpp"

namespace domainkit {

inline constexpr std::size_t kMinQuestionsPerDoc = 5;
inline constexpr std::size_t kMaxQuestionsPerDoc = 20;

struct QAPair {
  std::string question;
  std::string answer;
  std::string category;
};

struct OneTurnParse {
  std::vector<QAPair> items;
  // Problems tolerated in lenient mode (error class, message).
  std::vector<std::pair<ErrorCode, std::string>> salvaged;
};

// Step-1 one-turn response: a JSON array of {question, answer, category}.
// Strict mode throws MalformedResponse, CountOutOfRange (< 5 or > 20 items) or
// CategoryOutOfSet. Lenient mode drops out-of-set items, keeps at most 20 and
// records what it tolerated; it still throws MalformedResponse when nothing
// usable remains.
OneTurnParse parse_one_turn_response(std::string_view raw, const std::vector<std::string>& categories,
                                     bool lenient = false);

// Multi-turn response: either a JSON array of {role, content} or labelled
// lines ("用户：", "user:", "助手：", "assistant:", ...); text before the first
// label is ignored. Throws MalformedResponse or RoleOrderViolation.
std::vector<Turn> parse_dialogue_response(std::string_view raw);

// MCQ response object {question, question_type, candidate_options,
// answer: {correct_option, reason}}. Throws MalformedResponse, ArityError or
// OptionMismatch. Metadata fields (id, category, ...) are left empty.
MCQItem parse_mcq_response(std::string_view raw);

}  // namespace domainkit
