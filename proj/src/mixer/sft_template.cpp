#include "domainkit/mixer/sft_template.hpp"

#include "domainkit/common/error.hpp"

namespace domainkit {
namespace {

constexpr std::string_view kUserMarker = "<user>";
constexpr std::string_view kAssistantMarker = "<assistant>";

// True for "<user>", "\<user>", "\\<assistant>", ...
bool looks_like_marker(std::string_view line) {
  const auto first = line.find_first_not_of('\\');
  if (first == std::string_view::npos) return false;
  const auto rest = line.substr(first);
  return rest == kUserMarker || rest == kAssistantMarker;
}

template <typename Fn>
void for_each_line(std::string_view s, Fn&& fn) {
  std::size_t start = 0;
  for (;;) {
    const auto nl = s.find('\n', start);
    if (nl == std::string_view::npos) {
      fn(s.substr(start));
      return;
    }
    fn(s.substr(start, nl - start));
    start = nl + 1;
  }
}

}  // namespace

std::string render_sft(const std::vector<Turn>& turns) {
  std::string out;
  for (std::size_t i = 0; i < turns.size(); ++i) {
    if (i > 0) out.push_back('\n');
    out += turns[i].role == Role::user ? kUserMarker : kAssistantMarker;
    out.push_back('\n');
    bool first = true;
    for_each_line(turns[i].content, [&](std::string_view line) {
      if (!first) out.push_back('\n');
      first = false;
      if (looks_like_marker(line)) out.push_back('\\');
      out += line;
    });
  }
  return out;
}

std::vector<Turn> parse_sft(std::string_view rendered) {
  std::vector<Turn> turns;
  bool fresh = false;  // current turn has no content line yet
  for_each_line(rendered, [&](std::string_view line) {
    if (line == kUserMarker || line == kAssistantMarker) {
      turns.push_back({line == kUserMarker ? Role::user : Role::assistant, {}});
      fresh = true;
      return;
    }
    if (turns.empty()) {
      throw Error(ErrorCode::MalformedResponse, "rendered dialogue must start with a role marker");
    }
    auto& content = turns.back().content;
    if (!fresh) content.push_back('\n');
    fresh = false;
    content += looks_like_marker(line) ? line.substr(1) : line;
  });
  return turns;
}

}  // namespace domainkit
