#include "domainkit/common/jsonl.hpp"

#include <fstream>
#include <sstream>

#include "domainkit/common/error.hpp"

namespace domainkit {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out << content;
    if (!out) throw Error(ErrorCode::IoError, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const json&, std::size_t)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json value;
    try {
      value = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::SchemaError,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    fn(value, line_no);
  }
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::vector<json> rows;
  for_each_jsonl(path, [&](const json& v, std::size_t) { rows.push_back(v); });
  return rows;
}

std::string dump_line(const json& value) {
  return value.dump(-1, ' ', false, json::error_handler_t::strict);
}

std::string dump_pretty(const json& value) {
  return value.dump(2, ' ', false, json::error_handler_t::strict);
}

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& rows) {
  std::string out;
  for (const auto& row : rows) {
    out += dump_line(row);
    out += '\n';
  }
  write_file(path, out);
}

void write_json(const std::filesystem::path& path, const json& value) {
  write_file(path, dump_pretty(value) + "\n");
}

}  // namespace domainkit
