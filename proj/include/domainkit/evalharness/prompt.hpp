#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "domainkit/sftgen/endpoint.hpp"
#include "domainkit/sftgen/mcq.hpp"

namespace domainkit {

inline constexpr std::string_view kPromptHeader = "以下是单项选择题，请直接给出正确答案的选项。";
inline constexpr std::string_view kAnswerCue = "答案：";

// Question line followed by one "X. text" line per option.
std::string question_block(const MCQItem& item);

// Header, then k exemplar blocks ending in "答案：<gold>", then the target
// block ending in "答案：". Blocks are separated by blank lines. Throws
// ExemplarShortfall (fewer than k exemplars) or ExemplarLeakage (the item,
// matched by id or question text, is among the first k exemplars).
std::vector<ChatMessage> build_prompt(const MCQItem& item, const std::vector<MCQItem>& exemplars, std::size_t k);

// Shuffles the pool with `seed` once; for each item the first k pool entries
// that are not the item itself are used.
class ExemplarPicker {
 public:
  ExemplarPicker(std::vector<MCQItem> pool, std::uint64_t seed);
  std::vector<MCQItem> pick(const MCQItem& item, std::size_t k) const;
  std::size_t size() const { return pool_.size(); }

 private:
  std::vector<MCQItem> pool_;
};

bool same_item(const MCQItem& a, const MCQItem& b);

enum class Extraction { letter_regex, option_logprob };
std::string_view to_string(Extraction e);
Extraction parse_extraction(std::string_view s);

// letter_regex: first uppercase option letter not adjacent to an ASCII letter
// or digit. option_logprob: option with the highest score among the
// first-token alternatives (LogprobUnsupported without scores). nullopt means
// abstain.
std::optional<std::string> extract_answer(std::string_view raw, const std::map<std::string, std::string>& options,
                                          Extraction mode = Extraction::letter_regex,
                                          const std::map<std::string, double>& scores = {});

}  // namespace domainkit
