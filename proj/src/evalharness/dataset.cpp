#include "domainkit/evalharness/dataset.hpp"

#include <cstdio>
#include <set>

#include "domainkit/common/error.hpp"
#include "domainkit/common/hash.hpp"
#include "domainkit/common/jsonl.hpp"

namespace domainkit {

DatasetStats compute_stats(const std::vector<MCQItem>& items) {
  DatasetStats s;
  std::map<Difficulty, std::set<std::string>> subclasses;
  for (auto d : {Difficulty::fundamentals, Difficulty::expertise, Difficulty::innovative_design}) {
    s.per_difficulty[d] = {};
    subclasses[d] = {};
  }
  for (const auto& item : items) {
    ++s.total;
    ++s.per_difficulty[item.difficulty].questions;
    subclasses[item.difficulty].insert(item.subclass);
    ++s.per_category[item.category];
    ++s.per_split[item.split.value_or("")];
  }
  for (auto& [d, lvl] : s.per_difficulty) {
    lvl.subclasses = subclasses[d].size();
    s.subclasses += lvl.subclasses;
  }
  return s;
}

json DatasetStats::to_json() const {
  json levels = json::object();
  for (const auto& [d, lvl] : per_difficulty) {
    levels[std::string(to_string(d))] = {{"questions", lvl.questions}, {"subclasses", lvl.subclasses}};
  }
  json splits = json::object();
  for (const auto& [k, v] : per_split) splits[k.empty() ? "(none)" : k] = v;
  return {{"total", total}, {"subclasses", subclasses}, {"per_difficulty", levels},
          {"per_category", per_category}, {"per_split", splits}};
}

std::string DatasetStats::table() const {
  std::string out;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-20s %10s %11s\n", "difficulty", "questions", "subclasses");
  out += buf;
  for (const auto& [d, lvl] : per_difficulty) {
    std::snprintf(buf, sizeof buf, "%-20s %10zu %11zu\n", std::string(to_string(d)).c_str(), lvl.questions,
                  lvl.subclasses);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "%-20s %10zu %11zu\n", "total", total, subclasses);
  out += buf;
  return out;
}

DatasetStats MCQDataset::stats() const { return compute_stats(items); }

std::string MCQDataset::digest() const {
  std::string blob;
  for (const auto& item : items) blob += dump_line(to_json(item)) + "\n";
  return sha256_hex(blob);
}

MCQDataset load_dataset(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::IoError, "dataset not found: " + path.string());
  MCQDataset ds;
  ds.name = path.stem().string();
  std::set<std::string> seen;
  for_each_jsonl(path, [&](const json& j, std::size_t line) {
    MCQItem item;
    try {
      item = mcq_from_json(j);
    } catch (const Error& e) {
      throw Error(ErrorCode::SchemaError, path.string() + ":" + std::to_string(line) + ": " +
                                              std::string(error_code_name(e.code())) + ": " + e.detail());
    }
    if (item.id.empty()) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "line-%04zu", line);
      item.id = buf;
    }
    if (!seen.insert(item.id).second) {
      throw Error(ErrorCode::SchemaError,
                  path.string() + ":" + std::to_string(line) + ": duplicate item id '" + item.id + "'");
    }
    ds.items.push_back(std::move(item));
  });
  if (ds.items.empty()) throw Error(ErrorCode::SchemaError, path.string() + ": dataset has no items");
  return ds;
}

std::pair<std::vector<MCQItem>, std::vector<MCQItem>> partition_split(const std::vector<MCQItem>& items,
                                                                      const std::string& tag) {
  std::pair<std::vector<MCQItem>, std::vector<MCQItem>> out;
  for (const auto& item : items) {
    (item.split && *item.split == tag ? out.first : out.second).push_back(item);
  }
  return out;
}

}  // namespace domainkit
