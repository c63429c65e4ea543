#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "domainkit/sftgen/instruction.hpp"

namespace domainkit {

// Plain-text training rendering of a dialogue. Each turn is a role marker line
// ("<user>" or "<assistant>") followed by its content; turns are joined with a
// newline:
//
//   <user>
//   地砖怎么选？
//   <assistant>
//   先看吸水率……
//
// A content line that would read as a marker (optionally preceded by
// backslashes) gets one extra leading backslash, so parsing always recovers
// the original turns.
std::string render_sft(const std::vector<Turn>& turns);
// Throws MalformedResponse when the text does not start with a marker line.
std::vector<Turn> parse_sft(std::string_view rendered);

}  // namespace domainkit
