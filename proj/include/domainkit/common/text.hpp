#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace domainkit::text {

// Strict decoder: rejects overlong forms, surrogates and code points above
// U+10FFFF.
std::optional<std::u32string> decode_utf8(std::string_view bytes);
bool is_valid_utf8(std::string_view bytes);

void append_utf8(std::string& out, char32_t cp);
std::string encode_utf8(std::u32string_view cps);

// Han ideographs (all CJK Unified/Compatibility blocks), kana and Hangul
// syllables.
bool is_cjk(char32_t cp);
bool is_space(char32_t cp);
bool is_punct(char32_t cp);
inline bool is_ascii_alpha(char32_t cp) {
  return (cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z');
}
inline bool is_ascii_alnum(char32_t cp) {
  return is_ascii_alpha(cp) || (cp >= U'0' && cp <= U'9');
}

// Every run of whitespace becomes one ASCII space; leading and trailing
// whitespace is dropped. Input must be valid UTF-8.
std::string collapse_whitespace(std::string_view s);

// Paragraph-preserving normalization: horizontal whitespace runs become one
// space, each line is trimmed, runs of blank lines collapse to a single blank
// line, and leading/trailing blank lines are removed.
std::string normalize_whitespace(std::string_view s);

// Code points that are not whitespace.
std::size_t count_effective_chars(std::string_view s);

std::string to_lower_ascii(std::string_view s);

}  // namespace domainkit::text
