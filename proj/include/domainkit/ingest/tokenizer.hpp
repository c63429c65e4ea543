#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace domainkit {

inline constexpr std::string_view kDefaultTokenizer = "approx-cjk-v1";

struct TokenizerSpec {
  std::string name{kDefaultTokenizer};
};

// Every registered tokenizer is a pure function of the text.
//   approx-cjk-v1  each CJK code point is one token; each maximal run of
//                  non-whitespace, non-CJK code points is one token.
//   whitespace-v1  whitespace-separated runs.
std::size_t count_tokens(std::string_view text, const TokenizerSpec& tokenizer = {});
bool is_registered_tokenizer(std::string_view name);
std::vector<std::string> registered_tokenizers();

}  // namespace domainkit
