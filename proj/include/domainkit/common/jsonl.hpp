#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace domainkit {

using json = nlohmann::json;

std::string read_file(const std::filesystem::path& path);
// Writes through a sibling temp file and renames it into place.
void write_file(const std::filesystem::path& path, const std::string& content);

// Calls `fn(value, line_number)` for every non-blank line (line numbers are
// 1-based). A line that is not valid JSON raises SchemaError naming the line.
void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const json&, std::size_t)>& fn);
std::vector<json> read_jsonl(const std::filesystem::path& path);

// Compact, UTF-8 (non-ASCII left unescaped) single-line serialization.
std::string dump_line(const json& value);
std::string dump_pretty(const json& value);
void write_jsonl(const std::filesystem::path& path, const std::vector<json>& rows);
void write_json(const std::filesystem::path& path, const json& value);

}  // namespace domainkit
