#include "domainkit/sftgen/json_extract.hpp"

#include <vector>

namespace domainkit {
namespace {

// End (exclusive) of the bracketed value starting at `start`, honouring both
// quote styles; npos when unbalanced.
std::size_t balanced_end(std::string_view s, std::size_t start) {
  std::vector<char> stack;
  char quote = 0;
  for (std::size_t i = start; i < s.size(); ++i) {
    const char c = s[i];
    if (quote) {
      if (c == '\\') {
        ++i;
      } else if (c == quote) {
        quote = 0;
      }
      continue;
    }
    switch (c) {
      case '"':
      case '\'':
        quote = c;
        break;
      case '{':
        stack.push_back('}');
        break;
      case '[':
        stack.push_back(']');
        break;
      case '}':
      case ']':
        if (stack.empty() || stack.back() != c) return std::string_view::npos;
        stack.pop_back();
        if (stack.empty()) return i + 1;
        break;
      default:
        break;
    }
  }
  return std::string_view::npos;
}

bool is_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

std::optional<json> try_parse(std::string_view candidate) {
  auto parsed = json::parse(candidate, nullptr, /*allow_exceptions=*/false);
  if (!parsed.is_discarded()) return parsed;
  parsed = json::parse(relax_json(candidate), nullptr, false);
  if (!parsed.is_discarded()) return parsed;
  return std::nullopt;
}

}  // namespace

std::string relax_json(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 16);
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (c == '"') {
      const std::size_t begin = i++;
      while (i < s.size() && s[i] != '"') i += s[i] == '\\' ? 2 : 1;
      i = std::min(i + 1, s.size());
      out.append(s.substr(begin, i - begin));
    } else if (c == '\'') {
      out.push_back('"');
      ++i;
      while (i < s.size() && s[i] != '\'') {
        if (s[i] == '\\' && i + 1 < s.size()) {
          if (s[i + 1] == '\'') {
            out.push_back('\'');
          } else {
            out.push_back('\\');
            out.push_back(s[i + 1]);
          }
          i += 2;
          continue;
        }
        if (s[i] == '"') out += "\\\"";
        else out.push_back(s[i]);
        ++i;
      }
      out.push_back('"');
      ++i;
    } else if (is_word_char(c) && (i == 0 || !is_word_char(s[i - 1]))) {
      std::size_t end = i;
      while (end < s.size() && is_word_char(s[end])) ++end;
      const auto word = s.substr(i, end - i);
      if (word == "True") out += "true";
      else if (word == "False") out += "false";
      else if (word == "None") out += "null";
      else out.append(word);
      i = end;
    } else {
      out.push_back(c);
      ++i;
    }
  }
  return out;
}

std::optional<json> extract_first_json(std::string_view text) {
  for (std::size_t pos = text.find_first_of("{["); pos != std::string_view::npos;
       pos = text.find_first_of("{[", pos + 1)) {
    const auto end = balanced_end(text, pos);
    if (end == std::string_view::npos) continue;
    if (auto value = try_parse(text.substr(pos, end - pos))) return value;
  }
  return std::nullopt;
}

}  // namespace domainkit
