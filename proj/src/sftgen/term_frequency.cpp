#include "domainkit/sftgen/term_frequency.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "domainkit/common/error.hpp"
#include "domainkit/common/jsonl.hpp"
#include "domainkit/common/text.hpp"

namespace domainkit {

std::vector<std::string> split_terms(std::string_view input) {
  std::vector<std::string> terms;
  const auto cps = text::decode_utf8(input);
  if (!cps) return terms;
  const std::u32string& s = *cps;
  std::size_t i = 0;
  while (i < s.size()) {
    if (text::is_cjk(s[i])) {
      std::size_t j = i;
      while (j < s.size() && text::is_cjk(s[j])) ++j;
      if (j - i <= 2) {
        terms.push_back(text::encode_utf8(s.substr(i, j - i)));
      } else {
        for (std::size_t p = i; p + 1 < j; ++p) terms.push_back(text::encode_utf8(s.substr(p, 2)));
      }
      i = j;
    } else if (s[i] < 0x80 && text::is_ascii_alnum(s[i])) {
      std::size_t j = i;
      while (j < s.size() && s[j] < 0x80 && text::is_ascii_alnum(s[j])) ++j;
      terms.push_back(text::to_lower_ascii(text::encode_utf8(s.substr(i, j - i))));
      i = j;
    } else {
      ++i;
    }
  }
  return terms;
}

std::vector<TermCount> term_frequency(const std::vector<std::string>& texts, const std::set<std::string>& stopwords,
                                      std::size_t k) {
  std::map<std::string, std::size_t> counts;
  for (const auto& t : texts) {
    for (auto& term : split_terms(t)) {
      if (!stopwords.contains(term)) ++counts[std::move(term)];
    }
  }
  std::vector<TermCount> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const TermCount& a, const TermCount& b) { return a.second > b.second; });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

std::vector<TermCount> term_frequency(const std::vector<InstructionSample>& samples,
                                      const std::set<std::string>& stopwords, std::size_t k) {
  std::vector<std::string> texts;
  for (const auto& s : samples) {
    for (const auto& t : s.turns) texts.push_back(t.content);
  }
  return term_frequency(texts, stopwords, k);
}

std::vector<TermCount> term_frequency(const std::vector<MCQItem>& items, const std::set<std::string>& stopwords,
                                      std::size_t k) {
  std::vector<std::string> texts;
  for (const auto& item : items) {
    texts.push_back(item.question);
    for (const auto& [_, opt] : item.options) texts.push_back(opt);
    texts.push_back(item.reason);
  }
  return term_frequency(texts, stopwords, k);
}

std::set<std::string> load_stopwords(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::IoError, "stop-word list not found: " + path.string());
  std::set<std::string> words;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    line = text::collapse_whitespace(line);
    if (line.empty() || line[0] == '#') continue;
    words.insert(line);
  }
  return words;
}

}  // namespace domainkit
