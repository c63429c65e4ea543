#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "domainkit/sftgen/instruction.hpp"
#include "domainkit/sftgen/mcq.hpp"

namespace domainkit {

using TermCount = std::pair<std::string, std::size_t>;

// Terms: ASCII letter/digit runs (lowercased) and CJK runs; a CJK run of one
// or two characters is a term, longer runs contribute overlapping bigrams.
std::vector<std::string> split_terms(std::string_view text);

// Top `k` terms by count (ties by term), stop words removed.
std::vector<TermCount> term_frequency(const std::vector<std::string>& texts, const std::set<std::string>& stopwords,
                                      std::size_t k);
std::vector<TermCount> term_frequency(const std::vector<InstructionSample>& samples,
                                      const std::set<std::string>& stopwords, std::size_t k);
std::vector<TermCount> term_frequency(const std::vector<MCQItem>& items, const std::set<std::string>& stopwords,
                                      std::size_t k);

// One word per line; '#' comments and blank lines skipped.
std::set<std::string> load_stopwords(const std::filesystem::path& path);

}  // namespace domainkit
