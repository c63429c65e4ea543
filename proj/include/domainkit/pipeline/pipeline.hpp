#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "domainkit/common/jsonl.hpp"
#include "domainkit/pipeline/manifest.hpp"

namespace domainkit {

struct PipelineConfig {
  std::filesystem::path base_dir;  // relative paths in the config resolve here
  std::filesystem::path out_dir;
  std::uint64_t seed = 42;
  json raw;  // full parsed config

  // Throws ConfigError.
  static PipelineConfig load(const std::filesystem::path& path);
  static PipelineConfig from_json(const json& j, const std::filesystem::path& base_dir);
  std::filesystem::path resolve(const std::string& p) const;
  bool has_stage(const std::string& stage) const;
};

struct PipelineOptions {
  std::optional<std::filesystem::path> out_dir;  // overrides the config
  std::optional<std::uint64_t> seed;             // overrides the config
  bool resume = false;
  bool lenient = false;
  bool offline = false;
};

struct StageOutcome {
  std::string stage;
  bool skipped = false;  // verified against the manifest and not re-run
};

struct PipelineResult {
  std::filesystem::path out_dir;
  std::filesystem::path manifest_path;
  std::vector<StageOutcome> stages;
};

// ingest -> filter -> dedup -> mix, then gen / eval when configured. Without
// resume the manifest is started afresh; with resume each stage whose inputs,
// config digest and outputs all match its manifest entry is skipped, and an
// output whose digest no longer matches raises DigestMismatch. Stage errors
// are reported as StageFailure (BudgetExhausted is passed through).
PipelineResult run_pipeline(const PipelineConfig& cfg, const PipelineOptions& opts = {});

}  // namespace domainkit
