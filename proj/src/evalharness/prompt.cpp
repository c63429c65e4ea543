#include "domainkit/evalharness/prompt.hpp"

#include <random>

#include "domainkit/common/error.hpp"
#include "domainkit/common/text.hpp"
#include "domainkit/mixer/mixer.hpp"

namespace domainkit {

std::string question_block(const MCQItem& item) {
  std::string out = item.question;
  for (const auto& [key, text] : item.options) out += "\n" + key + ". " + text;
  return out;
}

bool same_item(const MCQItem& a, const MCQItem& b) {
  return (!a.id.empty() && a.id == b.id) || a.question == b.question;
}

std::vector<ChatMessage> build_prompt(const MCQItem& item, const std::vector<MCQItem>& exemplars, std::size_t k) {
  if (exemplars.size() < k) {
    throw Error(ErrorCode::ExemplarShortfall,
                "need " + std::to_string(k) + " exemplars, have " + std::to_string(exemplars.size()));
  }
  std::string prompt(kPromptHeader);
  for (std::size_t i = 0; i < k; ++i) {
    const MCQItem& ex = exemplars[i];
    if (same_item(ex, item)) throw Error(ErrorCode::ExemplarLeakage, "item '" + item.id + "' is among its exemplars");
    prompt += "\n\n" + question_block(ex) + "\n" + std::string(kAnswerCue) + ex.correct_option;
  }
  prompt += "\n\n" + question_block(item) + "\n" + std::string(kAnswerCue);
  return {{"user", prompt}};
}

ExemplarPicker::ExemplarPicker(std::vector<MCQItem> pool, std::uint64_t seed) : pool_(std::move(pool)) {
  std::sort(pool_.begin(), pool_.end(), [](const MCQItem& a, const MCQItem& b) { return a.id < b.id; });
  std::mt19937_64 rng(seed);
  seeded_shuffle(pool_, rng);
}

std::vector<MCQItem> ExemplarPicker::pick(const MCQItem& item, std::size_t k) const {
  std::vector<MCQItem> out;
  for (const auto& ex : pool_) {
    if (out.size() == k) break;
    if (!same_item(ex, item)) out.push_back(ex);
  }
  if (out.size() < k) {
    throw Error(ErrorCode::ExemplarShortfall, "exemplar pool has " + std::to_string(out.size()) +
                                                  " usable items for '" + item.id + "', need " + std::to_string(k));
  }
  return out;
}

std::string_view to_string(Extraction e) {
  return e == Extraction::letter_regex ? "letter_regex" : "option_logprob";
}

Extraction parse_extraction(std::string_view s) {
  if (s == "letter_regex") return Extraction::letter_regex;
  if (s == "option_logprob") return Extraction::option_logprob;
  throw Error(ErrorCode::ConfigError, "unknown extraction mode '" + std::string(s) + "'");
}

std::optional<std::string> extract_answer(std::string_view raw, const std::map<std::string, std::string>& options,
                                          Extraction mode, const std::map<std::string, double>& scores) {
  if (mode == Extraction::option_logprob) {
    if (scores.empty()) throw Error(ErrorCode::LogprobUnsupported, "endpoint returned no option scores");
    std::optional<std::string> best;
    double best_score = 0;
    for (const auto& [token, lp] : scores) {
      const std::string key = text::collapse_whitespace(token);
      if (!options.contains(key)) continue;
      if (!best || lp > best_score || (lp == best_score && key < *best)) {
        best = key;
        best_score = lp;
      }
    }
    return best;
  }
  auto alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const char c = raw[i];
    if (c < 'A' || c > 'Z') continue;
    if (i > 0 && alnum(raw[i - 1])) continue;
    if (i + 1 < raw.size() && alnum(raw[i + 1])) continue;
    const std::string key(1, c);
    if (options.contains(key)) return key;
  }
  return std::nullopt;
}

}  // namespace domainkit
