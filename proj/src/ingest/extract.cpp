#include <array>
#include <cctype>
#include <optional>
#include <cstdint>
#include <string>
#include <string_view>

#include "domainkit/common/error.hpp"
#include "domainkit/common/text.hpp"
#include "domainkit/ingest/ingest.hpp"

namespace domainkit {
namespace {

bool iequals_prefix(std::string_view s, std::size_t pos, std::string_view prefix) {
  if (pos + prefix.size() > s.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    char c = s[pos + i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c != prefix[i]) return false;
  }
  return true;
}

bool is_ascii_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

struct NamedEntity {
  std::string_view name;
  char32_t cp;
};
constexpr std::array<NamedEntity, 12> kEntities{{{"amp", U'&'},
                                                 {"lt", U'<'},
                                                 {"gt", U'>'},
                                                 {"quot", U'"'},
                                                 {"apos", U'\''},
                                                 {"nbsp", U' '},
                                                 {"ensp", U' '},
                                                 {"emsp", U' '},
                                                 {"middot", 0xB7},
                                                 {"mdash", 0x2014},
                                                 {"ndash", 0x2013},
                                                 {"hellip", 0x2026}}};

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out.push_back(s[i++]);
      continue;
    }
    const auto semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 10) {
      out.push_back(s[i++]);
      continue;
    }
    const std::string_view body = s.substr(i + 1, semi - i - 1);
    std::optional<char32_t> cp;
    if (body.size() >= 2 && body[0] == '#') {
      std::uint32_t v = 0;
      bool ok = true;
      const bool hex = body[1] == 'x' || body[1] == 'X';
      const std::string_view digits = body.substr(hex ? 2 : 1);
      if (digits.empty()) ok = false;
      for (char c : digits) {
        int d = -1;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
        if (d < 0 || v > 0x10FFFF) { ok = false; break; }
        v = v * (hex ? 16 : 10) + static_cast<std::uint32_t>(d);
      }
      if (ok && v > 0 && v <= 0x10FFFF && !(v >= 0xD800 && v <= 0xDFFF)) cp = v;
    } else {
      for (const auto& e : kEntities) {
        if (e.name == body) cp = e.cp;
      }
    }
    if (!cp) {
      out.push_back(s[i++]);
      continue;
    }
    text::append_utf8(out, *cp);
    i = semi + 1;
  }
  return out;
}

// Tag name at s[pos] == '<' (lowercased, without '/'); empty if not a tag.
std::string tag_name_at(std::string_view s, std::size_t pos, bool* closing) {
  std::size_t i = pos + 1;
  *closing = false;
  if (i < s.size() && s[i] == '/') {
    *closing = true;
    ++i;
  }
  std::string name;
  while (i < s.size() && (is_ascii_alnum(s[i]) || s[i] == '-')) {
    char c = s[i++];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    name.push_back(c);
  }
  if (name.empty() || !std::isalpha(static_cast<unsigned char>(name[0]))) return {};
  if (i < s.size() && !(s[i] == '>' || s[i] == '/' || s[i] == ' ' || s[i] == '\t' ||
                        s[i] == '\n' || s[i] == '\r')) {
    return {};
  }
  return name;
}

constexpr std::array<std::string_view, 13> kDroppedRegions{
    "table", "script", "style", "svg", "picture", "figure", "video",
    "audio", "object", "iframe", "noscript", "canvas", "map"};

bool is_dropped_region(std::string_view name) {
  for (auto r : kDroppedRegions) {
    if (r == name) return true;
  }
  return false;
}

constexpr std::array<std::string_view, 27> kBlockTags{
    "p",  "div", "br",  "li",   "ul",      "ol",         "h1",      "h2",      "h3",
    "h4", "h5",  "h6",  "tr",   "section", "article",    "header",  "footer",  "blockquote",
    "pre", "hr", "dd",  "dt",   "dl",      "main",       "aside",   "nav",     "caption"};

bool is_block_tag(std::string_view name) {
  for (auto b : kBlockTags) {
    if (b == name) return true;
  }
  return false;
}

// Removes <!-- --> comments and whole dropped regions (nesting-aware), then
// strips every remaining tag.
std::string strip_markup(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '<') {
      out.push_back(s[i++]);
      continue;
    }
    if (s.compare(i, 4, "<!--") == 0) {
      const auto end = s.find("-->", i + 4);
      i = end == std::string_view::npos ? s.size() : end + 3;
      continue;
    }
    const auto close = s.find('>', i + 1);
    if (close == std::string_view::npos) {
      out.push_back(s[i++]);
      continue;
    }
    if (s[i + 1] == '!' || s[i + 1] == '?') {  // doctype, processing instruction
      i = close + 1;
      continue;
    }
    bool closing = false;
    const std::string name = tag_name_at(s, i, &closing);
    if (name.empty()) {
      out.push_back(s[i++]);
      continue;
    }
    const bool self_closing = close > i && s[close - 1] == '/';
    if (!closing && !self_closing && is_dropped_region(name)) {
      // Skip to the matching close tag, honouring nesting of the same name.
      int depth = 1;
      std::size_t j = close + 1;
      while (depth > 0 && j < s.size()) {
        const auto lt = s.find('<', j);
        if (lt == std::string_view::npos) {
          j = s.size();
          break;
        }
        const auto gt = s.find('>', lt + 1);
        if (gt == std::string_view::npos) {
          j = s.size();
          break;
        }
        bool inner_closing = false;
        const std::string inner = tag_name_at(s, lt, &inner_closing);
        if (inner == name) {
          const bool inner_self = s[gt - 1] == '/';
          if (inner_closing) --depth;
          else if (!inner_self) ++depth;
        }
        j = gt + 1;
      }
      out.push_back('\n');
      i = j;
      continue;
    }
    if (is_block_tag(name) || is_dropped_region(name)) out.push_back('\n');
    i = close + 1;
  }
  return out;
}

bool is_cell_separator(char32_t cp) {
  return cp == U'|' || cp == U'\t' || cp == 0xFF5C || (cp >= 0x2500 && cp <= 0x257F);
}

std::string drop_table_lines(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t start = 0;
  while (start <= s.size()) {
    auto nl = s.find('\n', start);
    const bool last = nl == std::string_view::npos;
    if (last) nl = s.size();
    const std::string_view line = s.substr(start, nl - start);
    bool drop = false;
    if (const auto cps = text::decode_utf8(line)) {
      // Density over visible characters; tabs count as separators.
      std::size_t seps = 0;
      std::size_t visible = 0;
      for (char32_t cp : *cps) {
        const bool sep = is_cell_separator(cp);
        seps += sep ? 1 : 0;
        visible += sep || !text::is_space(cp) ? 1 : 0;
      }
      drop = visible > 0 && static_cast<double>(seps) / static_cast<double>(visible) > 0.30;
    }
    if (!drop) {
      out.append(line);
      if (!last) out.push_back('\n');
    }
    if (last) break;
    start = nl + 1;
  }
  return out;
}

bool is_url_char(char c) {
  if (is_ascii_alnum(c)) return true;
  switch (c) {
    case '-': case '.': case '_': case '~': case ':': case '/': case '?': case '#':
    case '[': case ']': case '@': case '!': case '$': case '&': case '\'': case '(':
    case ')': case '*': case '+': case ',': case ';': case '=': case '%':
      return true;
    default:
      return false;
  }
}

bool is_trailing_punct(char c) {
  switch (c) {
    case '.': case ',': case ';': case ':': case '!': case '?': case ')': case ']': case '\'':
      return true;
    default:
      return false;
  }
}

std::string remove_urls(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const bool boundary = i == 0 || !(is_ascii_alnum(s[i - 1]) || s[i - 1] == '.' ||
                                      s[i - 1] == '/' || s[i - 1] == '@');
    std::size_t prefix = 0;
    if (boundary) {
      if (iequals_prefix(s, i, "http://")) prefix = 7;
      else if (iequals_prefix(s, i, "https://")) prefix = 8;
      else if (iequals_prefix(s, i, "ftp://")) prefix = 6;
      else if (iequals_prefix(s, i, "www.")) prefix = 4;
    }
    if (prefix == 0) {
      out.push_back(s[i++]);
      continue;
    }
    std::size_t end = i + prefix;
    while (end < s.size() && is_url_char(s[end])) ++end;
    while (end > i + prefix && is_trailing_punct(s[end - 1])) --end;
    i = end;
  }
  return out;
}

std::string clean_once(std::string_view s) {
  std::string t = decode_entities(s);
  t = strip_markup(t);
  t = drop_table_lines(t);
  t = remove_urls(t);
  return text::normalize_whitespace(t);
}

}  // namespace

std::string clean_text(std::string_view payload) {
  // Every pass either shortens the text or leaves it unchanged.
  std::string current = clean_once(payload);
  for (;;) {
    std::string next = clean_once(current);
    if (next == current) return current;
    current = std::move(next);
  }
}

Document extract_text(const RawRecord& record, const TokenizerSpec& tokenizer) {
  if (!text::is_valid_utf8(record.payload)) {
    throw Error(ErrorCode::DecodeError, "record '" + record.source_id + "' is not valid UTF-8");
  }
  Document doc;
  doc.text = clean_text(record.payload);
  if (doc.text.empty()) {
    throw Error(ErrorCode::EmptyAfterExtraction,
                "record '" + record.source_id + "' has no text after cleaning");
  }
  doc.source_kind = record.source_kind;
  doc.doc_id = make_doc_id(doc.text, doc.source_kind);
  doc.token_count = count_tokens(doc.text, tokenizer);
  doc.char_count = text::count_effective_chars(doc.text);
  doc.status = {};
  return doc;
}

}  // namespace domainkit
