#include "domainkit/pipeline/manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include "domainkit/common/error.hpp"
#include "domainkit/common/hash.hpp"

namespace domainkit {

std::string toolkit_version() { return DOMAINKIT_VERSION; }

std::string now_utc() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

json digests_json(const std::vector<FileDigest>& files) {
  json arr = json::array();
  for (const auto& f : files) arr.push_back({{"path", f.path}, {"sha256", f.sha256}});
  return arr;
}

std::vector<FileDigest> digests_from_json(const json& arr) {
  std::vector<FileDigest> out;
  for (const auto& f : arr) out.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>()});
  return out;
}

}  // namespace

json ManifestEntry::to_json() const {
  return {{"stage", stage},
          {"inputs", digests_json(inputs)},
          {"outputs", digests_json(outputs)},
          {"config_digest", config_digest},
          {"seed", seed},
          {"toolkit_version", toolkit_version},
          {"started_at", started_at},
          {"finished_at", finished_at}};
}

ManifestEntry ManifestEntry::from_json(const json& j) {
  ManifestEntry e;
  try {
    e.stage = j.at("stage").get<std::string>();
    e.inputs = digests_from_json(j.at("inputs"));
    e.outputs = digests_from_json(j.at("outputs"));
    e.config_digest = j.at("config_digest").get<std::string>();
    e.seed = j.value("seed", std::uint64_t{0});
    e.toolkit_version = j.value("toolkit_version", "");
    e.started_at = j.value("started_at", "");
    e.finished_at = j.value("finished_at", "");
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::SchemaError, std::string("manifest entry: ") + ex.what());
  }
  return e;
}

Manifest::Manifest(std::filesystem::path path) : path_(std::move(path)) {
  if (std::filesystem::exists(path_)) {
    for_each_jsonl(path_, [&](const json& j, std::size_t) { entries_.push_back(ManifestEntry::from_json(j)); });
  }
}

const ManifestEntry* Manifest::find(const std::string& stage) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->stage == stage) return &*it;
  }
  return nullptr;
}

void Manifest::append(const ManifestEntry& entry) {
  if (!path_.parent_path().empty()) std::filesystem::create_directories(path_.parent_path());
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  out << dump_line(entry.to_json()) << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "cannot append to " + path_.string());
  entries_.push_back(entry);
}

std::string Manifest::display_path(const std::filesystem::path& file) const {
  const auto base = std::filesystem::weakly_canonical(path_.parent_path().empty() ? "." : path_.parent_path());
  const auto abs = std::filesystem::weakly_canonical(file);
  const auto rel = abs.lexically_relative(base);
  if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
  return abs.generic_string();
}

std::filesystem::path Manifest::resolve(const std::string& recorded) const {
  const std::filesystem::path p(recorded);
  return p.is_absolute() ? p : path_.parent_path() / p;
}

FileDigest Manifest::digest(const std::filesystem::path& file) const {
  return {display_path(file), sha256_file(file)};
}

json manifest_digests(const Manifest& m) {
  json arr = json::array();
  for (const auto& e : m.entries()) {
    arr.push_back({{"stage", e.stage},
                   {"inputs", digests_json(e.inputs)},
                   {"outputs", digests_json(e.outputs)},
                   {"config_digest", e.config_digest},
                   {"seed", e.seed}});
  }
  return arr;
}

}  // namespace domainkit
