#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "domainkit/evalharness/dataset.hpp"
#include "domainkit/evalharness/prompt.hpp"
#include "domainkit/sftgen/endpoint.hpp"

namespace domainkit {

// Percentage with two decimals, rounded half up: round(10000 * c / t) / 100.
// Computed in integers; returns hundredths of a percent.
std::int64_t percent_hundredths(std::size_t correct, std::size_t total);
double percent(std::size_t correct, std::size_t total);
std::string format_percent(std::int64_t hundredths);

struct EvalRunConfig {
  std::size_t shots = 5;
  std::string exemplar_source = "dev";
  Extraction extraction = Extraction::letter_regex;
  std::uint64_t seed = 42;
  std::string model_label;
  std::string ratio_label;

  json to_json() const;
};

struct ItemResult {
  std::string item_id;
  std::string category;
  Difficulty difficulty = Difficulty::fundamentals;
  std::string gold;
  std::string raw_response;
  std::optional<std::string> extracted;  // nullopt = abstain
  bool correct = false;
  std::string error;  // endpoint failure, if any
};

struct Score {
  std::size_t correct = 0;
  std::size_t total = 0;
  std::int64_t hundredths() const { return percent_hundredths(correct, total); }
  double value() const { return percent(correct, total); }
};

struct EvalReport {
  std::string dataset;
  std::string dataset_digest;
  std::string model;
  EvalRunConfig config;
  std::vector<ItemResult> items;  // sorted by item id
  Score overall;
  double overall_micro = 0;  // percent, 2 decimals
  double overall_macro = 0;  // unweighted mean over categories, percent
  std::map<std::string, Score> per_category;
  std::map<std::string, Score> per_difficulty;
  std::size_t abstained = 0;
  std::size_t failed = 0;
  bool degraded = false;

  json to_json() const;
  static EvalReport from_json(const json& j);
};

// Recomputes overall/per-category/per-difficulty scores from `items`.
void score_report(EvalReport& report);

// Prompts every scored item exactly once (request id "eval-k<shots>-<item id>").
// Exemplars come from `exemplar_pool`; dataset items tagged with the exemplar
// split are moved to the pool and not scored. Endpoint failures count as
// abstentions and mark the report degraded.
EvalReport run_eval(const MCQDataset& dataset, std::vector<MCQItem> exemplar_pool, const EvalRunConfig& cfg,
                    RequestRunner& runner, std::size_t concurrency = 1);

// Highest overall_micro; ties go to the smaller shot count. Throws
// DatasetMismatch when the reports were computed on different datasets.
const EvalReport& best_of_settings(const std::vector<EvalReport>& reports);

}  // namespace domainkit
