#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "domainkit/sftgen/mcq.hpp"

namespace domainkit {

struct LevelStats {
  std::size_t questions = 0;
  std::size_t subclasses = 0;
};

struct DatasetStats {
  std::size_t total = 0;
  std::size_t subclasses = 0;  // distinct (difficulty, subclass) pairs
  std::map<Difficulty, LevelStats> per_difficulty;
  std::map<std::string, std::size_t> per_category;
  std::map<std::string, std::size_t> per_split;

  json to_json() const;
  // Difficulty / questions / subclasses table with a total row.
  std::string table() const;
};

struct MCQDataset {
  std::string name;
  std::vector<MCQItem> items;

  DatasetStats stats() const;
  // sha256 over the serialized items; identifies the dataset in reports.
  std::string digest() const;
};

DatasetStats compute_stats(const std::vector<MCQItem>& items);

// Every line must be a valid MCQ item; failures raise SchemaError naming the
// line. Items without an id get "line-NNNN"; duplicate ids are rejected.
MCQDataset load_dataset(const std::filesystem::path& path);

// Items whose split equals `tag` (first) and the rest (second).
std::pair<std::vector<MCQItem>, std::vector<MCQItem>> partition_split(const std::vector<MCQItem>& items,
                                                                      const std::string& tag);

}  // namespace domainkit
