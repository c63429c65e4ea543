#include "domainkit/evalharness/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "domainkit/common/error.hpp"

namespace domainkit {
namespace {

std::int64_t hundredths(double v) { return std::llround(v * 100.0); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Display width: CJK and other wide characters count as two columns.
std::size_t display_width(const std::string& s) {
  std::size_t w = 0;
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    const std::size_t len = c < 0x80 ? 1 : c < 0xE0 ? 2 : c < 0xF0 ? 3 : 4;
    w += len >= 3 ? 2 : 1;
    i += len;
  }
  return w;
}

std::string pad(const std::string& s, std::size_t width, bool right) {
  const std::size_t w = display_width(s);
  const std::string fill(width > w ? width - w : 0, ' ');
  return right ? fill + s : s + fill;
}

}  // namespace

SweepTable build_sweep(const std::vector<SweepRow>& rows) {
  SweepTable t;
  std::set<std::string> seen_ds;
  std::vector<std::string> groups;
  for (const auto& r : rows) {
    if (std::find(groups.begin(), groups.end(), r.model_label) == groups.end()) groups.push_back(r.model_label);
    for (const auto& [ds, _] : r.scores) {
      if (seen_ds.insert(ds).second) t.datasets.push_back(ds);
    }
  }
  for (const auto& g : groups) {
    const std::size_t start = t.rows.size();
    for (const auto& r : rows) {
      if (r.model_label == g) t.rows.push_back(r);
    }
    t.flags.resize(t.rows.size());
    for (const auto& ds : t.datasets) {
      std::optional<std::int64_t> best;
      for (std::size_t i = start; i < t.rows.size(); ++i) {
        if (const auto it = t.rows[i].scores.find(ds); it != t.rows[i].scores.end()) {
          best = std::max(best.value_or(hundredths(it->second)), hundredths(it->second));
        }
      }
      for (std::size_t i = start; i < t.rows.size(); ++i) {
        const auto it = t.rows[i].scores.find(ds);
        t.flags[i][ds] = best && it != t.rows[i].scores.end() && hundredths(it->second) == *best;
      }
    }
  }
  return t;
}

std::vector<SweepRow> rows_from_reports(const std::vector<EvalReport>& reports) {
  std::vector<std::pair<std::string, std::string>> keys;
  std::map<std::pair<std::string, std::string>, std::map<std::string, std::vector<EvalReport>>> grouped;
  for (const auto& r : reports) {
    const auto key = std::make_pair(r.config.model_label.empty() ? r.model : r.config.model_label,
                                    r.config.ratio_label);
    if (!grouped.contains(key)) keys.push_back(key);
    grouped[key][r.dataset].push_back(r);
  }
  std::vector<SweepRow> rows;
  for (const auto& key : keys) {
    SweepRow row{key.first, key.second, {}};
    for (const auto& [ds, rs] : grouped[key]) row.scores[ds] = best_of_settings(rs).overall_micro;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string sweep_csv(const SweepTable& t) {
  std::string out = "model,ratio";
  for (const auto& ds : t.datasets) out += "," + csv_field(ds);
  for (const auto& ds : t.datasets) out += "," + csv_field(ds + "_is_max");
  out += "\n";
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    out += csv_field(r.model_label) + "," + csv_field(r.ratio_label);
    for (const auto& ds : t.datasets) {
      const auto it = r.scores.find(ds);
      out += ",";
      if (it != r.scores.end()) out += format_percent(hundredths(it->second));
    }
    for (const auto& ds : t.datasets) out += t.flags[i].at(ds) ? ",1" : ",0";
    out += "\n";
  }
  return out;
}

std::string sweep_text(const SweepTable& t) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header{"model", "ratio"};
  header.insert(header.end(), t.datasets.begin(), t.datasets.end());
  cells.push_back(header);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    std::vector<std::string> line{(i > 0 && t.rows[i - 1].model_label == r.model_label) ? "" : r.model_label,
                                  r.ratio_label};
    for (const auto& ds : t.datasets) {
      const auto it = r.scores.find(ds);
      line.push_back(it == r.scores.end() ? "-"
                                          : format_percent(hundredths(it->second)) + (t.flags[i].at(ds) ? "*" : " "));
    }
    cells.push_back(std::move(line));
  }
  std::vector<std::size_t> widths(header.size(), 0);
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) widths[c] = std::max(widths[c], display_width(line[c]));
  }
  std::string out;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    std::string line;
    for (std::size_t c = 0; c < cells[r].size(); ++c) {
      if (c) line += "  ";
      line += pad(cells[r][c], widths[c], c >= 2);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
    if (r == 0) {
      std::size_t total = 0;
      for (auto w : widths) total += w + 2;
      out += std::string(total - 2, '-') + "\n";
    }
  }
  return out;
}

}  // namespace domainkit
