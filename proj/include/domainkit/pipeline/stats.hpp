#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "domainkit/common/jsonl.hpp"

namespace domainkit {

enum class ArtifactSchema {
  documents,
  instructions,
  mcq,
  training_items,
  dup_pairs,
  manifest,
  eval_report,
  filter_report,
  dedup_report,
  mix_report,
  trainer_config,
};

std::string_view to_string(ArtifactSchema s);

// Inspects the file (a JSON object or JSONL rows) and names its schema;
// UnknownSchema otherwise.
ArtifactSchema detect_schema(const std::filesystem::path& path);

struct ArtifactStats {
  ArtifactSchema schema = ArtifactSchema::documents;
  json summary;
  std::string text;  // human-readable
};

// Counts, token totals and, for MCQ files, the difficulty/subclass table.
// Instruction and MCQ summaries include the top `top_terms` terms after
// removing `stopwords_file` entries (default list when empty).
ArtifactStats artifact_stats(const std::filesystem::path& path, std::size_t top_terms = 20,
                             const std::filesystem::path& stopwords_file = {});

}  // namespace domainkit
