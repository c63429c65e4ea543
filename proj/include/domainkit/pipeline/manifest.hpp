#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "domainkit/common/jsonl.hpp"

namespace domainkit {

std::string toolkit_version();
std::string now_utc();

struct FileDigest {
  std::string path;  // relative to the manifest's directory when inside it
  std::string sha256;
  friend bool operator==(const FileDigest&, const FileDigest&) = default;
};

struct ManifestEntry {
  std::string stage;
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;
  std::string config_digest;
  std::uint64_t seed = 0;
  std::string toolkit_version;
  std::string started_at;
  std::string finished_at;

  json to_json() const;
  static ManifestEntry from_json(const json& j);
};

// JSONL manifest, one entry per completed stage. Entries are only ever
// appended.
class Manifest {
 public:
  explicit Manifest(std::filesystem::path path);

  const std::filesystem::path& path() const { return path_; }
  const std::vector<ManifestEntry>& entries() const { return entries_; }
  // Latest entry for a stage.
  const ManifestEntry* find(const std::string& stage) const;
  void append(const ManifestEntry& entry);

  std::string display_path(const std::filesystem::path& file) const;
  std::filesystem::path resolve(const std::string& recorded) const;
  FileDigest digest(const std::filesystem::path& file) const;

 private:
  std::filesystem::path path_;
  std::vector<ManifestEntry> entries_;
};

// Stage/digest projection of a manifest (timestamps dropped), used to compare
// runs.
json manifest_digests(const Manifest& m);

}  // namespace domainkit
