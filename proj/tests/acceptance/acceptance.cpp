// Acceptance checks. `acceptance` runs all of them; `acceptance --criterion N`
// runs one. Each prints a single PASS/FAIL line.
#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <regex>
#include <set>

#include "domainkit/common/text.hpp"
#include "domainkit/dedup/dedup.hpp"
#include "domainkit/evalharness/eval.hpp"
#include "domainkit/filters/filters.hpp"
#include "domainkit/ingest/ingest.hpp"
#include "domainkit/mixer/mixer.hpp"
#include "domainkit/pipeline/manifest.hpp"
#include "domainkit/sftgen/generate.hpp"
#include "eval_mock.hpp"
#include "support.hpp"

using namespace domainkit;
namespace fs = std::filesystem;

namespace {

// Tolerances and limits.
constexpr double kStatsSeconds = 1.0;
constexpr double kDedupSeconds = 30.0;
constexpr double kDedupMinRecall = 0.95;
constexpr double kPlantedMinJaccard = 0.85;
constexpr double kRunSeconds = 10.0;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::pair<int, std::string> run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + DOMAINKIT_CLI + "\" " + args + " 2>&1";
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return {-1, ""};
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  const int status = ::pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string random_cjk(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<char32_t> d(0x4E00, 0x4E00 + 2999);
  std::u32string s;
  for (std::size_t i = 0; i < n; ++i) s.push_back(d(rng));
  return text::encode_utf8(s);
}

Document make_doc(const std::string& id, const std::string& body) {
  Document d = extract_text({id, SourceKind::domain_book, body, std::nullopt});
  d.doc_id = id;
  return d;
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto st = load_dataset(testing::fixtures() / "evalhome.jsonl").stats();
  auto level = [&](Difficulty d) { return st.per_difficulty.count(d) ? st.per_difficulty.at(d) : LevelStats{}; };
  o.require(level(Difficulty::fundamentals).questions == 22 && level(Difficulty::fundamentals).subclasses == 6,
            "fundamentals != 22/6");
  o.require(level(Difficulty::expertise).questions == 87 && level(Difficulty::expertise).subclasses == 17,
            "expertise != 87/17");
  o.require(level(Difficulty::innovative_design).questions == 4 && level(Difficulty::innovative_design).subclasses == 2,
            "innovative_design != 4/2");
  o.require(st.total == 113 && st.subclasses == 25, "total != 113/25");

  const auto [code, out] = run_cli("stats \"" + (testing::fixtures() / "evalhome.jsonl").string() + "\"");
  o.require(code == 0, "stats exit " + std::to_string(code));
  o.require(out.find("questions: 113") != std::string::npos, "stats output lacks 'questions: 113'");
  o.require(std::regex_search(out, std::regex("total +113 +25")), "stats output lacks total row");
  const double secs = seconds_since(t0);
  o.require(secs < kStatsSeconds, "took " + fmt("%.3fs", secs));
  if (o.pass) o.detail = "22/87/4 over 6/17/2 subclasses, total 113, " + fmt("%.3fs", secs);
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto ds = load_dataset(testing::fixtures() / "evalhome.jsonl");
  const auto pool = load_dataset(testing::fixtures() / "evalhome_dev.jsonl").items;
  const std::vector<std::pair<std::size_t, std::string>> cases{{78, "69.03"}, {61, "53.98"}, {68, "60.17"}};
  std::string got;
  for (const auto& [n, expected] : cases) {
    auto ep = testing::scripted_eval(ds.items, testing::first_ids(ds.items, n));
    RequestRunner runner(&ep, std::nullopt, 1000);
    const auto rep = run_eval(ds, pool, {}, runner);
    const std::string shown = fmt("%.2f", rep.overall_micro);
    got += (got.empty() ? "" : ", ") + std::to_string(n) + "/113=" + shown;
    o.require(rep.overall.correct == n, std::to_string(n) + " scripted correct, scored " +
                                            std::to_string(rep.overall.correct));
    o.require(shown == expected, std::to_string(n) + "/113 reported " + shown + ", table shows " + expected);
  }
  o.detail = got + (o.pass ? "" : " | " + o.detail);
  return o;
}

Outcome criterion3() {
  Outcome o;
  std::vector<TrainingItem> domain, general;
  for (int i = 0; i < 100; ++i) domain.push_back({"d" + std::to_string(i), "domain", "x", 100, {}});
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> len(20, 180);
  for (int i = 0; i < 1500; ++i) general.push_back({"g" + std::to_string(i), "general", "y", len(rng), {}});
  std::string seen;
  testing::TempDir tmp;
  for (std::size_t k : {0, 1, 2, 5, 10}) {
    MixPlan plan;
    plan.ratio_general = k;
    plan.seed = 1234;
    const auto res = mix(domain, general, plan);
    const auto& r = res.report;
    std::size_t max_item = 0;
    for (const auto& it : res.items) {
      if (it.origin == "general") max_item = std::max(max_item, it.tokens);
    }
    const double dev = std::abs(r.achieved_ratio - static_cast<double>(k));
    const double allowed = static_cast<double>(max_item) / static_cast<double>(r.domain_tokens);
    o.require(r.domain_tokens == 10000, "domain tokens " + std::to_string(r.domain_tokens));
    o.require(dev <= allowed, "k=" + std::to_string(k) + " achieved " + fmt("%.4f", r.achieved_ratio));
    if (k == 0) o.require(r.general_items == 0, "k=0 drew general items");
    write_training_items(tmp / "a.jsonl", res.items);
    write_training_items(tmp / "b.jsonl", mix(domain, general, plan).items);
    o.require(read_file(tmp / "a.jsonl") == read_file(tmp / "b.jsonl"), "k=" + std::to_string(k) + " not reproducible");
    seen += (seen.empty() ? "" : " ") + std::to_string(k) + ":" + fmt("%.4f", r.achieved_ratio);
  }
  if (o.pass) o.detail = "achieved " + seen + ", reruns byte-identical";
  return o;
}

Outcome criterion4() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::vector<Document> docs;
  std::set<std::pair<std::string, std::string>> planted;
  for (int i = 0; i < 450; ++i) docs.push_back(make_doc("r" + std::to_string(i), random_cjk(rng, 400)));
  std::uniform_int_distribution<std::size_t> pos(0, 399);
  for (int i = 0; i < 50; ++i) {
    const Document& src = docs[static_cast<std::size_t>(i) * 9];
    auto cps = *text::decode_utf8(src.text);
    for (int e = 0; e < 3; ++e) cps[pos(rng)] = U'家';
    docs.push_back(make_doc("p" + std::to_string(i), text::encode_utf8(cps)));
  }

  DedupConfig cfg;
  cfg.workers = 1;
  std::vector<ShingleSet> sets;
  for (const auto& d : docs) sets.push_back(make_shingles(d, cfg.ngram));
  std::set<std::pair<std::string, std::string>> truth;
  double min_planted = 1.0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = i + 1; j < sets.size(); ++j) {
      const double jac = jaccard(sets[i], sets[j]);
      if (jac >= cfg.jaccard_threshold) truth.insert(std::minmax(sets[i].doc_id, sets[j].doc_id));
      if (sets[j].doc_id[0] == 'p' && sets[i].doc_id[0] == 'r' &&
          sets[i].doc_id == "r" + std::to_string(std::stoi(sets[j].doc_id.substr(1)) * 9)) {
        min_planted = std::min(min_planted, jac);
      }
    }
  }
  o.require(min_planted >= kPlantedMinJaccard, "planted pair below 0.85: " + fmt("%.3f", min_planted));

  const auto t0 = Clock::now();
  const auto res = near_dedup(docs, cfg);
  const double secs = seconds_since(t0);
  std::size_t tp = 0;
  for (const auto& p : res.pairs) tp += truth.count({p.a, p.b});
  const double precision = res.pairs.empty() ? 1.0 : static_cast<double>(tp) / res.pairs.size();
  const double recall = truth.empty() ? 1.0 : static_cast<double>(tp) / truth.size();
  o.require(truth.size() >= 50, "oracle found " + std::to_string(truth.size()) + " pairs");
  o.require(precision == 1.0, "precision " + fmt("%.4f", precision));
  o.require(recall >= kDedupMinRecall, "recall " + fmt("%.4f", recall));
  o.require(secs < kDedupSeconds, "took " + fmt("%.2fs", secs));
  const std::string summary = "oracle pairs " + std::to_string(truth.size()) + ", precision " + fmt("%.3f", precision) +
                              ", recall " + fmt("%.3f", recall) + ", " + fmt("%.3fs", secs);
  o.detail = o.pass ? summary : summary + " | " + o.detail;
  return o;
}

std::vector<Document> filter_fixture() {
  std::mt19937_64 rng(5);
  const std::size_t lengths[] = {20, 60, 150, 250};
  const double ratios[] = {0.3, 0.6, 0.8, 0.95};
  const char* words[] = {"", "", "枪支", "毒品", "赌博"};
  std::vector<Document> docs;
  for (std::size_t i = 0; i < 1000; ++i) {
    const std::size_t n = lengths[i % 4];
    const double r = ratios[(i / 4) % 4];
    const auto zh = static_cast<std::size_t>(std::lround(n * r));
    std::string body = random_cjk(rng, zh) + std::string(words[(i / 16) % 5]);
    for (std::size_t e = zh; e < n; e += 5) body += " " + std::string(std::min<std::size_t>(5, n - e), 'a' + (e % 26));
    docs.push_back(make_doc("f" + std::to_string(i), body));
  }
  return docs;
}

Outcome criterion5() {
  Outcome o;
  const auto docs = filter_fixture();
  const std::vector<Lexicon> lexicons{{"枪支", "毒品", "赌博"}, {"毒品", "赌博"}, {"赌博"}};
  FilterConfig base;
  base.min_effective_chars = 50;
  base.min_language_ratio = 0.5;

  auto run = [&](const FilterConfig& cfg, const Lexicon& lex) {
    const auto res = run_filters(docs, cfg, lex);
    const auto& r = res.report;
    o.require(r.input == 1000 && r.retained + r.dropped_sensitive + r.dropped_language + r.dropped_length == 1000 &&
                  res.retained.size() + res.dropped.size() == 1000,
              "partition does not sum to 1000");
    std::set<std::string> kept;
    for (const auto& d : res.retained) kept.insert(d.doc_id);
    return kept;
  };
  auto monotone = [&](const std::string& name, const std::vector<std::set<std::string>>& sets) {
    std::string sizes;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      sizes += (i ? "<" : "") + std::to_string(sets[i].size());
      if (i == 0) continue;
      const bool subset = std::includes(sets[i].begin(), sets[i].end(), sets[i - 1].begin(), sets[i - 1].end());
      o.require(subset && sets[i].size() > sets[i - 1].size(), name + " not monotone");
    }
    return name + " " + sizes;
  };

  std::vector<std::set<std::string>> s, l, n;
  for (const auto& lex : lexicons) s.push_back(run(base, lex));
  for (double r : {0.9, 0.7, 0.5}) {
    FilterConfig c = base;
    c.min_language_ratio = r;
    l.push_back(run(c, lexicons[1]));
  }
  for (std::size_t m : {200, 100, 30}) {
    FilterConfig c = base;
    c.min_effective_chars = m;
    n.push_back(run(c, lexicons[1]));
  }
  const std::string summary = monotone("sensitive", s) + ", " + monotone("language", l) + ", " + monotone("length", n);
  o.detail = o.pass ? "partitions sum to 1000; " + summary : summary + " | " + o.detail;
  return o;
}

Outcome criterion6() {
  Outcome o;
  const json dapt_expected = {{"precision", "fp16"},    {"epochs", 4},          {"batch_size", 64},
                              {"learning_rate", 1e-4}, {"warmup_ratio", 0.1}, {"lr_scheduler", "cosine"},
                              {"max_length", 1024}};
  json sft_expected = dapt_expected;
  sft_expected["max_length"] = 1536;
  const auto dapt = emit_trainer_config(MixMode::DAPT);
  const auto sft = emit_trainer_config(MixMode::SFT);
  o.require(dapt.to_json() == dapt_expected, "DAPT config " + dapt.to_json().dump());
  o.require(sft.to_json() == sft_expected, "SFT config " + sft.to_json().dump());
  for (const auto& c : {dapt, sft}) {
    o.require(TrainerConfig::from_json(json::parse(c.to_json().dump())) == c, "round trip differs");
  }
  if (o.pass) o.detail = "DAPT " + dapt.to_json().dump() + ", SFT max_length 1536, round trip equal";
  return o;
}

// 48 multi-turn, 50 MCQ and 2 one-turn step-1 responses: 90 valid, 10 broken.
struct Archived {
  std::vector<Document> multi, mcq, one;
};

Archived write_mock_archive(const fs::path& dir) {
  ResponseArchive archive(dir);
  auto put = [&](const std::string& id, const std::string& content) {
    archive.store({id, "mock-gen", json{{"id", id}}, 200, make_chat_body(content, 1700000000), ""});
  };
  auto doc = [](const std::string& id) {
    Document d = make_doc(id, "地面找平后再铺设地板，" + id);
    d.status.state = DocState::retained;
    return d;
  };
  const std::string dialogue = "用户：卫生间怎么做防水？\n助手：先处理基层，再刷两遍涂料。\n用户：墙面刷多高？\n助手：淋浴区至少1.8米。";
  const std::string mcq =
      R"({"question":"防水涂料至少刷几遍？","question_type":"single_choice",)"
      R"("candidate_options":{"A":"一遍","B":"两遍","C":"五遍","D":"不用刷"},"answer":{"correct_option":"B","reason":"规范要求"}})";
  const std::string judgment =
      R"({"question":"闭水试验需48小时。","question_type":"judgment","candidate_options":{"A":"对","B":"错"},)"
      R"("answer":{"correct_option":"A","reason":"常规做法"}})";

  Archived a;
  const std::vector<std::string> broken_dialogues{
      "抱歉，我无法生成对话。",                                                    // MalformedResponse
      "助手：您好。\n用户：防水怎么做？\n助手：先处理基层。\n用户：好的。",        // RoleOrderViolation
      "用户：你好\n用户：在吗？\n助手：在的。\n用户：地板怎么选？\n助手：看材质。"};  // RoleOrderViolation
  for (int i = 0; i < 48; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "mt%03d", i);
    a.multi.push_back(doc(id));
    put(request_id(GenKind::multi_turn, id), i < 45 ? dialogue + "\n用户：谢谢。\n助手：不客气，第" + std::to_string(i) + "问。"
                                                    : broken_dialogues[i - 45]);
  }
  json arity = json::parse(judgment);
  arity["candidate_options"] = {{"A", "对"}, {"B", "错"}, {"C", "不确定"}, {"D", "都不是"}};
  json arity2 = json::parse(mcq);
  arity2["candidate_options"].erase("D");
  json mismatch = json::parse(mcq);
  mismatch["answer"]["correct_option"] = "E";
  json mismatch2 = json::parse(judgment);
  mismatch2["answer"]["correct_option"] = "C";
  const std::vector<std::string> broken_mcq{"{\"question\": \"未闭合", arity.dump(), arity2.dump(), mismatch.dump(),
                                            mismatch2.dump()};
  for (int i = 0; i < 50; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "mc%03d", i);
    a.mcq.push_back(doc(id));
    put(request_id(GenKind::mcq, id), i < 45 ? (i % 3 ? mcq : judgment) : broken_mcq[i - 45]);
  }
  const auto cats = load_default_template(GenKind::one_turn).category_list;
  json out_of_set = json::array();
  for (int i = 0; i < 6; ++i) out_of_set.push_back({{"question", "问" + std::to_string(i)}, {"answer", "答"}, {"category", "烹饪"}});
  json too_few = json::array();
  for (int i = 0; i < 3; ++i) too_few.push_back({{"question", "问" + std::to_string(i)}, {"answer", "答"}, {"category", cats[0]}});
  a.one = {doc("ot000"), doc("ot001")};
  put(request_id(GenKind::one_turn, "ot000"), out_of_set.dump());
  put(request_id(GenKind::one_turn, "ot001"), too_few.dump());
  return a;
}

struct GenRun {
  std::size_t accepted_samples = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t requests = 0;
  std::size_t network = 0;
  std::map<std::string, std::size_t> by_class;
  std::string sft_bytes, mcq_bytes;
};

GenRun replay(const fs::path& archive_dir, const Archived& a, const fs::path& out) {
  RequestRunner runner(nullptr, ResponseArchive(archive_dir), 0);
  std::map<GenKind, PromptTemplate> templates;
  for (GenKind k : {GenKind::one_turn, GenKind::multi_turn, GenKind::mcq}) templates[k] = load_default_template(k);
  GenRun g;
  std::vector<InstructionSample> samples;
  std::vector<MCQItem> items;
  const std::vector<std::pair<const std::vector<Document>*, GenKind>> groups{
      {&a.multi, GenKind::multi_turn}, {&a.mcq, GenKind::mcq}, {&a.one, GenKind::one_turn}};
  for (const auto& [docs, kind] : groups) {
    const auto res = batch_generate(*docs, {kind}, runner, templates, {}, 4);
    g.accepted += res.report.accepted;
    g.rejected += res.report.rejected;
    for (const auto& [k, v] : res.report.rejected_by_class) g.by_class[k] += v;
    samples.insert(samples.end(), res.samples.begin(), res.samples.end());
    items.insert(items.end(), res.mcq.begin(), res.mcq.end());
  }
  g.requests = runner.counts().requests;
  g.network = runner.counts().network;
  g.accepted_samples = samples.size() + items.size();
  write_instructions(out / "sft.jsonl", samples);
  write_mcq_items(out / "mcq.jsonl", items);
  g.sft_bytes = read_file(out / "sft.jsonl");
  g.mcq_bytes = read_file(out / "mcq.jsonl");
  return g;
}

Outcome criterion7() {
  Outcome o;
  testing::TempDir tmp;
  const auto archived = write_mock_archive(tmp / "archive");
  o.require(ResponseArchive(tmp / "archive").request_ids().size() == 100, "archive does not hold 100 responses");
  fs::create_directories(tmp / "first");
  fs::create_directories(tmp / "second");
  const auto first = replay(tmp / "archive", archived, tmp / "first");
  const auto second = replay(tmp / "archive", archived, tmp / "second");
  o.require(first.requests == 100, std::to_string(first.requests) + " requests");
  o.require(first.network == 0 && second.network == 0, "network used");
  o.require(first.accepted_samples == 90, std::to_string(first.accepted_samples) + " accepted samples");
  o.require(first.accepted == 90 && first.rejected == 10,
            std::to_string(first.accepted) + " accepted / " + std::to_string(first.rejected) + " rejected");
  for (const char* cls : {"MalformedResponse", "RoleOrderViolation", "OptionMismatch", "ArityError", "CategoryOutOfSet",
                          "CountOutOfRange"}) {
    o.require(first.by_class.count(cls) && first.by_class.at(cls) > 0, std::string("no ") + cls + " rejection");
  }
  o.require(first.sft_bytes == second.sft_bytes && first.mcq_bytes == second.mcq_bytes, "re-run differs");
  std::string classes;
  for (const auto& [k, v] : first.by_class) classes += (classes.empty() ? "" : " ") + k + "=" + std::to_string(v);
  const std::string summary = "accepted " + std::to_string(first.accepted_samples) + ", rejected " +
                              std::to_string(first.rejected) + " (" + classes + "), offline re-run byte-identical";
  o.detail = o.pass ? summary : summary + " | " + o.detail;
  return o;
}

Outcome criterion8() {
  Outcome o;
  const auto ds = load_dataset(testing::fixtures() / "evalhome.jsonl");
  const auto dev = load_dataset(testing::fixtures() / "evalhome_dev.jsonl").items;
  auto blocks = [](const std::string& p) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    for (;;) {
      const auto next = p.find("\n\n", pos);
      out.push_back(p.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
      if (next == std::string::npos) return out;
      pos = next + 2;
    }
  };
  const std::regex exemplar_end("\n答案：[A-D]$");
  std::size_t checked = 0;
  // Dev-split exemplars and leave-one-out exemplars drawn from the scored set.
  for (const auto* pool : {&dev, &ds.items}) {
    const ExemplarPicker picker(*pool, 42);
    for (const auto& item : ds.items) {
      const auto five = blocks(build_prompt(item, picker.pick(item, 5), 5).back().content);
      const auto zero = blocks(build_prompt(item, {}, 0).back().content);
      const std::string target = question_block(item) + "\n" + std::string(kAnswerCue);
      o.require(five.size() == 7 && five.front() == kPromptHeader && five.back() == target,
                item.id + ": 5-shot prompt shape");
      for (std::size_t i = 1; i + 1 < five.size(); ++i) {
        o.require(std::regex_search(five[i], exemplar_end), item.id + ": exemplar without gold letter");
        o.require(five[i].rfind(item.question + "\n", 0) != 0, item.id + ": item appears among its exemplars");
      }
      o.require(zero.size() == 2 && zero.back() == target, item.id + ": 0-shot prompt has exemplar blocks");
      ++checked;
    }
  }
  if (o.pass) o.detail = std::to_string(checked) + " prompt pairs parsed: 5 exemplar blocks / none, no leakage";
  return o;
}

Outcome criterion9() {
  Outcome o;
  testing::TempDir tmp;
  const auto t0 = Clock::now();
  json digests[2];
  for (int i = 0; i < 2; ++i) {
    const fs::path out = tmp / ("run" + std::to_string(i));
    const auto [code, text] =
        run_cli("run --config \"" + (testing::fixtures() / "pipeline.json").string() + "\" --out-dir \"" + out.string() + "\"");
    o.require(code == 0, "run exit " + std::to_string(code) + ": " + text);
    if (code == 0) digests[i] = manifest_digests(Manifest(out / "manifest.jsonl"));
  }
  const double secs = seconds_since(t0);
  o.require(!digests[0].empty() && digests[0] == digests[1], "manifest digests differ");
  o.require(secs < kRunSeconds, "took " + fmt("%.2fs", secs));
  if (o.pass) o.detail = std::to_string(digests[0].size()) + " stages, identical digests, " + fmt("%.2fs", secs);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-9)")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                       criterion6, criterion7, criterion8, criterion9};
  bool all = true;
  for (int i = 1; i <= 9; ++i) {
    if (only && i != only) continue;
    Outcome o;
    try {
      o = criteria[static_cast<std::size_t>(i - 1)]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "Criterion " << i << ": " << (o.pass ? "PASS" : "FAIL") << " (" << o.detail << ")\n";
    all &= o.pass;
  }
  return all ? 0 : 1;
}
