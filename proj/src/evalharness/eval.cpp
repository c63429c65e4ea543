#include "domainkit/evalharness/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "domainkit/common/error.hpp"
#include "domainkit/common/parallel.hpp"

namespace domainkit {

std::int64_t percent_hundredths(std::size_t correct, std::size_t total) {
  if (total == 0) return 0;
  const auto c = static_cast<std::int64_t>(correct);
  const auto t = static_cast<std::int64_t>(total);
  return (20000 * c + t) / (2 * t);
}

double percent(std::size_t correct, std::size_t total) {
  return static_cast<double>(percent_hundredths(correct, total)) / 100.0;
}

std::string format_percent(std::int64_t hundredths) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld.%02lld", static_cast<long long>(hundredths / 100),
                static_cast<long long>(hundredths % 100));
  return buf;
}

json EvalRunConfig::to_json() const {
  return {{"shots", shots},           {"exemplar_source", exemplar_source},
          {"extraction", to_string(extraction)}, {"seed", seed},
          {"model_label", model_label}, {"ratio_label", ratio_label}};
}

namespace {

json score_json(const Score& s) {
  return {{"correct", s.correct}, {"total", s.total}, {"accuracy", s.value()}};
}

Score score_from_json(const json& j) { return {j.at("correct").get<std::size_t>(), j.at("total").get<std::size_t>()}; }

}  // namespace

json EvalReport::to_json() const {
  json items_json = json::array();
  for (const auto& r : items) {
    items_json.push_back({{"item_id", r.item_id},
                          {"category", r.category},
                          {"difficulty", domainkit::to_string(r.difficulty)},
                          {"gold", r.gold},
                          {"raw_response", r.raw_response},
                          {"extracted", r.extracted ? json(*r.extracted) : json("abstain")},
                          {"correct", r.correct},
                          {"error", r.error}});
  }
  json cats = json::object();
  for (const auto& [k, s] : per_category) cats[k] = score_json(s);
  json diffs = json::object();
  for (const auto& [k, s] : per_difficulty) diffs[k] = score_json(s);
  return {{"dataset", dataset},
          {"dataset_digest", dataset_digest},
          {"model", model},
          {"config", config.to_json()},
          {"conventions",
           {{"rounding", "round(10000 * correct / total) / 100, half up"},
            {"abstain", "scored incorrect"},
            {"extraction", domainkit::to_string(config.extraction)},
            {"shots", config.shots}}},
          {"overall_micro", overall_micro},
          {"overall_macro", overall_macro},
          {"correct", overall.correct},
          {"total", overall.total},
          {"abstained", abstained},
          {"failed", failed},
          {"degraded", degraded},
          {"per_category", cats},
          {"per_difficulty", diffs},
          {"per_item", items_json}};
}

EvalReport EvalReport::from_json(const json& j) {
  EvalReport r;
  try {
    r.dataset = j.at("dataset").get<std::string>();
    r.dataset_digest = j.value("dataset_digest", "");
    r.model = j.value("model", "");
    const auto& c = j.at("config");
    r.config.shots = c.at("shots").get<std::size_t>();
    r.config.exemplar_source = c.value("exemplar_source", "dev");
    r.config.extraction = parse_extraction(c.value("extraction", "letter_regex"));
    r.config.seed = c.value("seed", std::uint64_t{42});
    r.config.model_label = c.value("model_label", "");
    r.config.ratio_label = c.value("ratio_label", "");
    for (const auto& it : j.value("per_item", json::array())) {
      ItemResult ir;
      ir.item_id = it.at("item_id").get<std::string>();
      ir.category = it.value("category", "");
      ir.difficulty = parse_difficulty(it.value("difficulty", "fundamentals")).value_or(Difficulty::fundamentals);
      ir.gold = it.value("gold", "");
      ir.raw_response = it.value("raw_response", "");
      const auto ex = it.value("extracted", "abstain");
      if (ex != "abstain") ir.extracted = ex;
      ir.correct = it.value("correct", false);
      ir.error = it.value("error", "");
      r.items.push_back(std::move(ir));
    }
    if (!r.items.empty()) {
      score_report(r);
    } else {
      r.overall = {j.at("correct").get<std::size_t>(), j.at("total").get<std::size_t>()};
      r.overall_micro = j.at("overall_micro").get<double>();
      r.overall_macro = j.value("overall_macro", 0.0);
      for (const auto& [k, v] : j.value("per_category", json::object()).items()) r.per_category[k] = score_from_json(v);
      for (const auto& [k, v] : j.value("per_difficulty", json::object()).items()) {
        r.per_difficulty[k] = score_from_json(v);
      }
      r.degraded = j.value("degraded", false);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("eval report: ") + e.what());
  }
  return r;
}

void score_report(EvalReport& r) {
  r.overall = {};
  r.per_category.clear();
  r.per_difficulty.clear();
  r.abstained = 0;
  r.failed = 0;
  for (const auto& it : r.items) {
    const std::size_t hit = it.correct ? 1 : 0;
    r.overall.correct += hit;
    ++r.overall.total;
    auto& cat = r.per_category[it.category];
    cat.correct += hit;
    ++cat.total;
    auto& diff = r.per_difficulty[std::string(to_string(it.difficulty))];
    diff.correct += hit;
    ++diff.total;
    if (!it.extracted) ++r.abstained;
    if (!it.error.empty()) ++r.failed;
  }
  r.degraded = r.failed > 0;
  r.overall_micro = r.overall.value();
  double sum = 0;
  for (const auto& [_, s] : r.per_category) sum += static_cast<double>(s.correct) / static_cast<double>(s.total);
  const double mean = r.per_category.empty() ? 0.0 : sum / static_cast<double>(r.per_category.size());
  r.overall_macro = std::floor(mean * 10000.0 + 0.5) / 100.0;
}

EvalReport run_eval(const MCQDataset& dataset, std::vector<MCQItem> exemplar_pool, const EvalRunConfig& cfg,
                    RequestRunner& runner, std::size_t concurrency) {
  auto [tagged, scored] = partition_split(dataset.items, cfg.exemplar_source);
  for (auto& t : tagged) exemplar_pool.push_back(std::move(t));
  std::sort(scored.begin(), scored.end(), [](const MCQItem& a, const MCQItem& b) { return a.id < b.id; });
  if (scored.empty()) throw Error(ErrorCode::SchemaError, "dataset '" + dataset.name + "' has no items to score");
  const ExemplarPicker picker(std::move(exemplar_pool), cfg.seed);

  EvalReport report;
  report.dataset = dataset.name;
  report.dataset_digest = dataset.digest();
  report.config = cfg;
  report.items.resize(scored.size());

  // Build every prompt before sending anything so exemplar problems fail fast.
  std::vector<ChatRequest> requests(scored.size());
  for (std::size_t i = 0; i < scored.size(); ++i) {
    requests[i].messages = build_prompt(scored[i], picker.pick(scored[i], cfg.shots), cfg.shots);
    requests[i].want_logprobs = cfg.extraction == Extraction::option_logprob;
  }

  std::vector<std::string> models(scored.size());
  parallel_for(scored.size(), std::max<std::size_t>(1, concurrency), [&](std::size_t i) {
    const MCQItem& item = scored[i];
    ItemResult& res = report.items[i];
    res.item_id = item.id;
    res.category = item.category;
    res.difficulty = item.difficulty;
    res.gold = item.correct_option;
    const std::string id = "eval-k" + std::to_string(cfg.shots) + "-" + item.id;
    try {
      const ChatResponse resp = runner.run(id, requests[i]);
      models[i] = resp.model;
      res.raw_response = resp.content;
      res.extracted = extract_answer(resp.content, item.options, cfg.extraction, resp.top_logprobs);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::BudgetExhausted || e.code() == ErrorCode::LogprobUnsupported) throw;
      res.error = e.what();
    }
    res.correct = res.extracted && *res.extracted == res.gold;
  });
  for (const auto& m : models) {
    if (!m.empty()) {
      report.model = m;
      break;
    }
  }
  if (report.model.empty()) report.model = runner.model_name();
  score_report(report);
  return report;
}

const EvalReport& best_of_settings(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw Error(ErrorCode::DatasetMismatch, "no reports to compare");
  const EvalReport* best = &reports.front();
  for (const auto& r : reports) {
    if (r.dataset != best->dataset || r.dataset_digest != best->dataset_digest) {
      throw Error(ErrorCode::DatasetMismatch,
                  "reports cover different datasets ('" + best->dataset + "' vs '" + r.dataset + "')");
    }
    const auto a = r.overall.hundredths();
    const auto b = best->overall.hundredths();
    if (a > b || (a == b && r.config.shots < best->config.shots)) best = &r;
  }
  return *best;
}

}  // namespace domainkit
