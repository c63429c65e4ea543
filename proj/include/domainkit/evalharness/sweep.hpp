#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "domainkit/evalharness/eval.hpp"

namespace domainkit {

struct SweepRow {
  std::string model_label;
  std::string ratio_label;
  std::map<std::string, double> scores;  // dataset -> percent
};

struct SweepTable {
  std::vector<std::string> datasets;  // column order
  std::vector<SweepRow> rows;         // grouped by model_label, input order within a group
  // flags[i][dataset]: row i holds the maximum of its model group for that dataset.
  std::vector<std::map<std::string, bool>> flags;
};

// Groups rows by model label (first appearance order) and flags every row
// tied for the per-group maximum of each dataset column.
SweepTable build_sweep(const std::vector<SweepRow>& rows);

// One row per (model_label, ratio_label); the score per dataset is the best
// report (best_of_settings) among those sharing the dataset.
std::vector<SweepRow> rows_from_reports(const std::vector<EvalReport>& reports);

std::string sweep_csv(const SweepTable& table);
// Aligned columns; maxima marked with '*'.
std::string sweep_text(const SweepTable& table);

}  // namespace domainkit
