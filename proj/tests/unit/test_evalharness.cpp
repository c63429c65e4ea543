#include <doctest.h>

#include "domainkit/evalharness/eval.hpp"
#include "domainkit/evalharness/sweep.hpp"
#include "eval_mock.hpp"
#include "support.hpp"

using namespace domainkit;

namespace {

MCQDataset evalhome() { return load_dataset(testing::fixtures() / "evalhome.jsonl"); }
std::vector<MCQItem> dev_pool() { return load_dataset(testing::fixtures() / "evalhome_dev.jsonl").items; }

std::vector<std::string> blocks(const std::string& prompt) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (;;) {
    const auto next = prompt.find("\n\n", pos);
    out.push_back(prompt.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
    if (next == std::string::npos) break;
    pos = next + 2;
  }
  return out;
}

EvalReport run_scripted(std::size_t n_correct, std::size_t shots = 5) {
  const auto ds = evalhome();
  auto ep = testing::scripted_eval(ds.items, testing::first_ids(ds.items, n_correct));
  RequestRunner runner(&ep, std::nullopt, 100000);
  EvalRunConfig cfg;
  cfg.shots = shots;
  return run_eval(ds, dev_pool(), cfg, runner);
}

}  // namespace

TEST_CASE("EvalHome statistics") {
  const auto st = evalhome().stats();
  CHECK(st.total == 113);
  CHECK(st.subclasses == 25);
  CHECK(st.per_difficulty.at(Difficulty::fundamentals).questions == 22);
  CHECK(st.per_difficulty.at(Difficulty::fundamentals).subclasses == 6);
  CHECK(st.per_difficulty.at(Difficulty::expertise).questions == 87);
  CHECK(st.per_difficulty.at(Difficulty::expertise).subclasses == 17);
  CHECK(st.per_difficulty.at(Difficulty::innovative_design).questions == 4);
  CHECK(st.per_difficulty.at(Difficulty::innovative_design).subclasses == 2);
  CHECK(st.table().find("total") != std::string::npos);
}

TEST_CASE("dataset loading errors") {
  testing::TempDir tmp;
  const auto first = read_file(testing::fixtures() / "evalhome.jsonl");
  const std::string line = first.substr(0, first.find('\n') + 1);
  write_file(tmp / "one.jsonl", line);
  CHECK(load_dataset(tmp / "one.jsonl").stats().total == 1);

  json j = json::parse(line);
  j.erase("correct_option");
  write_file(tmp / "nogold.jsonl", line + j.dump() + "\n");
  try {
    load_dataset(tmp / "nogold.jsonl");
    FAIL("expected SchemaError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchemaError);
    CHECK(e.detail().find(":2:") != std::string::npos);
  }
  write_file(tmp / "dup.jsonl", line + line);
  CHECK(testing::error_of([&] { load_dataset(tmp / "dup.jsonl"); }) == ErrorCode::SchemaError);
}

TEST_CASE("prompt construction") {
  const auto ds = evalhome();
  const auto pool = dev_pool();
  const auto& item = ds.items[10];

  const auto zero = blocks(build_prompt(item, {}, 0)[0].content);
  REQUIRE(zero.size() == 2);
  CHECK(zero[0] == kPromptHeader);
  CHECK(zero[1] == question_block(item) + "\n答案：");

  const auto five = blocks(build_prompt(item, pool, 5)[0].content);
  REQUIRE(five.size() == 7);
  for (std::size_t i = 1; i <= 5; ++i) {
    CHECK(five[i] == question_block(pool[i - 1]) + "\n答案：" + pool[i - 1].correct_option);
  }

  auto leaky = pool;
  leaky.insert(leaky.begin() + 2, item);
  CHECK(testing::error_of([&] { build_prompt(item, leaky, 5); }) == ErrorCode::ExemplarLeakage);
  CHECK(testing::error_of([&] { build_prompt(item, pool, 9); }) == ErrorCode::ExemplarShortfall);

  ExemplarPicker picker(ds.items, 7);
  const auto picked = picker.pick(ds.items[0], 5);
  CHECK(picked.size() == 5);
  for (const auto& p : picked) CHECK_FALSE(same_item(p, ds.items[0]));
  CHECK(ExemplarPicker(ds.items, 7).pick(ds.items[0], 5) == picked);
}

TEST_CASE("answer extraction") {
  const std::map<std::string, std::string> opts{{"A", "a"}, {"B", "b"}, {"C", "c"}, {"D", "d"}};
  CHECK(extract_answer("答案是B。", opts) == "B");
  CHECK(extract_answer("A和B都有道理", opts) == "A");
  CHECK_FALSE(extract_answer("无法判断", opts));
  CHECK(extract_answer("According to BAD code, C", opts) == "C");
  CHECK_FALSE(extract_answer("E", opts));
  CHECK(extract_answer("", opts, Extraction::option_logprob, {{"A", -2.0}, {"C", -0.1}, {"x", 0.0}}) == "C");
  CHECK(testing::error_of([&] { extract_answer("A", opts, Extraction::option_logprob); }) ==
        ErrorCode::LogprobUnsupported);
}

TEST_CASE("percent rounding") {
  CHECK(percent_hundredths(78, 113) == 6903);
  CHECK(percent_hundredths(61, 113) == 5398);
  CHECK(percent_hundredths(68, 113) == 6018);
  CHECK(percent_hundredths(1, 8) == 1250);
  CHECK(percent_hundredths(1, 3) == 3333);
  CHECK(percent_hundredths(2, 3) == 6667);
  CHECK(percent_hundredths(0, 0) == 0);
  CHECK(format_percent(6903) == "69.03");
  CHECK(format_percent(10000) == "100.00");
  CHECK(format_percent(5) == "0.05");
}

TEST_CASE("scripted runs") {
  const auto all = run_scripted(113);
  CHECK(format_percent(all.overall.hundredths()) == "100.00");
  CHECK(all.items.size() == 113);

  const auto ds = evalhome();
  FunctionEndpoint wrong("e", [](const ChatRequest&) { return make_chat_response("E"); });
  RequestRunner r(&wrong, std::nullopt, 1000);
  const auto none = run_eval(ds, dev_pool(), {}, r);
  CHECK(none.overall_micro == 0.0);
  CHECK(none.abstained == 113);

  const auto rep = run_scripted(78);
  CHECK(rep.overall.correct == 78);
  CHECK(rep.overall_micro == 69.03);
  std::size_t sum = 0, weighted = 0;
  for (const auto& [cat, s] : rep.per_category) {
    sum += s.correct;
    weighted += s.total;
  }
  CHECK(sum == 78);
  CHECK(weighted == 113);
  CHECK(run_scripted(78).to_json().dump() == rep.to_json().dump());
  CHECK(EvalReport::from_json(rep.to_json()).to_json() == rep.to_json());
}

TEST_CASE("endpoint failures degrade the report") {
  const auto ds = evalhome();
  FunctionEndpoint down("d", [](const ChatRequest&) {
    ChatResponse r;
    r.status = 500;
    return r;
  });
  RequestRunner r(&down, std::nullopt, 100000, 0);
  const auto rep = run_eval(ds, dev_pool(), {}, r);
  CHECK(rep.degraded);
  CHECK(rep.failed == 113);
  CHECK(rep.overall.correct == 0);
}

TEST_CASE("best of settings") {
  EvalReport k0, k5;
  k0.dataset_digest = k5.dataset_digest = "d";
  k0.config.shots = 0;
  k5.config.shots = 5;
  k0.overall = {40, 100};
  k5.overall = {46, 100};
  CHECK(best_of_settings({k0, k5}).config.shots == 5);
  CHECK(best_of_settings({k0}).config.shots == 0);
  k5.overall = {40, 100};
  CHECK(best_of_settings({k5, k0}).config.shots == 0);
  k5.dataset_digest = "other";
  CHECK(testing::error_of([&] { best_of_settings({k0, k5}); }) == ErrorCode::DatasetMismatch);
}

TEST_CASE("sweep flags the per-group maximum") {
  const std::vector<std::pair<std::string, double>> baichuan{
      {"1:0", 47.79}, {"1:1", 50.44}, {"1:2", 44.24}, {"1:5", 36.28}, {"1:10", 53.98}};
  std::vector<SweepRow> rows;
  for (const auto& [ratio, score] : baichuan) rows.push_back({"Baichuan-13B-Base", ratio, {{"EvalHome", score}}});
  rows.push_back({"Other", "1:0", {{"EvalHome", 10.0}}});
  rows.push_back({"Other", "1:1", {{"EvalHome", 10.0}}});
  const auto t = build_sweep(rows);
  REQUIRE(t.rows.size() == 7);
  for (std::size_t i = 0; i < 5; ++i) CHECK(t.flags[i].at("EvalHome") == (t.rows[i].ratio_label == "1:10"));
  CHECK(t.flags[5].at("EvalHome"));
  CHECK(t.flags[6].at("EvalHome"));
  CHECK(sweep_csv(t).find("Baichuan-13B-Base,1:10,53.98,1") != std::string::npos);
  CHECK(sweep_text(t).find("53.98*") != std::string::npos);

  const auto single = build_sweep({rows[0]});
  CHECK(single.flags[0].at("EvalHome"));
}
