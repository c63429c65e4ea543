#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "domainkit/common/jsonl.hpp"

namespace domainkit {

// Finds the first balanced JSON value ('{' or '[' opened) embedded in free
// text and parses it. Candidates that do not parse strictly are retried with
// single-quoted strings and Python literals (True/False/None) rewritten; if a
// candidate still fails, scanning resumes at the next opening bracket.
std::optional<json> extract_first_json(std::string_view text);

// Rewrites 'single quoted' strings to JSON strings and True/False/None to
// true/false/null outside of strings.
std::string relax_json(std::string_view s);

}  // namespace domainkit
