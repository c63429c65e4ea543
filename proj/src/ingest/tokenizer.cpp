#include "domainkit/ingest/tokenizer.hpp"

#include "domainkit/common/error.hpp"
#include "domainkit/common/text.hpp"

namespace domainkit {
namespace {

std::size_t count_approx_cjk(std::string_view s) {
  const auto cps = text::decode_utf8(s);
  if (!cps) throw Error(ErrorCode::DecodeError, "tokenizer input is not valid UTF-8");
  std::size_t n = 0;
  bool in_word = false;
  for (char32_t cp : *cps) {
    if (text::is_space(cp)) {
      in_word = false;
    } else if (text::is_cjk(cp)) {
      ++n;
      in_word = false;
    } else if (!in_word) {
      ++n;
      in_word = true;
    }
  }
  return n;
}

std::size_t count_whitespace(std::string_view s) {
  const auto cps = text::decode_utf8(s);
  if (!cps) throw Error(ErrorCode::DecodeError, "tokenizer input is not valid UTF-8");
  std::size_t n = 0;
  bool in_word = false;
  for (char32_t cp : *cps) {
    const bool sp = text::is_space(cp);
    if (!sp && !in_word) ++n;
    in_word = !sp;
  }
  return n;
}

}  // namespace

std::size_t count_tokens(std::string_view text, const TokenizerSpec& tokenizer) {
  if (tokenizer.name == kDefaultTokenizer) return count_approx_cjk(text);
  if (tokenizer.name == "whitespace-v1") return count_whitespace(text);
  throw Error(ErrorCode::UnknownTokenizer, "tokenizer '" + tokenizer.name + "' is not registered");
}

bool is_registered_tokenizer(std::string_view name) {
  return name == kDefaultTokenizer || name == "whitespace-v1";
}

std::vector<std::string> registered_tokenizers() {
  return {std::string(kDefaultTokenizer), "whitespace-v1"};
}

}  // namespace domainkit
