#include <doctest.h>

#include <thread>

#include <httplib.h>

#include "domainkit/pipeline/pipeline.hpp"
#include "domainkit/pipeline/stats.hpp"
#include "domainkit/sftgen/endpoint.hpp"
#include "support.hpp"

using namespace domainkit;
namespace fs = std::filesystem;

namespace {

PipelineResult run_fixture(const fs::path& out, bool resume = false) {
  PipelineOptions opts;
  opts.out_dir = out;
  opts.resume = resume;
  return run_pipeline(PipelineConfig::load(testing::fixtures() / "pipeline.json"), opts);
}

const FileDigest& find_file(const std::vector<FileDigest>& v, const std::string& suffix) {
  for (const auto& f : v) {
    if (f.path.size() >= suffix.size() && f.path.compare(f.path.size() - suffix.size(), suffix.size(), suffix) == 0)
      return f;
  }
  throw std::runtime_error("no file ending in " + suffix);
}

}  // namespace

TEST_CASE("four chained stages") {
  testing::TempDir tmp;
  const auto res = run_fixture(tmp.path());
  Manifest m(res.manifest_path);
  REQUIRE(m.entries().size() == 4);
  CHECK(m.entries()[0].stage == "ingest");
  CHECK(m.entries()[1].stage == "filter");
  CHECK(m.entries()[2].stage == "dedup");
  CHECK(m.entries()[3].stage == "mix");
  for (std::size_t i = 1; i < 4; ++i) {
    const auto& prev = m.entries()[i - 1];
    const auto& cur = m.entries()[i];
    const std::string link = i == 1 ? "docs.jsonl" : i == 2 ? "kept.jsonl" : "unique.jsonl";
    CHECK(find_file(cur.inputs, link) == find_file(prev.outputs, link));
  }
  for (const auto& e : m.entries()) {
    CHECK(e.seed == 42);
    CHECK(e.toolkit_version == toolkit_version());
    CHECK(e.config_digest.size() == 64);
  }
  CHECK(fs::exists(tmp / "trainer.json"));
}

TEST_CASE("reruns are deterministic and resume skips verified stages") {
  testing::TempDir a, b;
  run_fixture(a.path());
  run_fixture(b.path());
  CHECK(manifest_digests(Manifest(a / "manifest.jsonl")) == manifest_digests(Manifest(b / "manifest.jsonl")));
  CHECK(read_file(a / "train.jsonl") == read_file(b / "train.jsonl"));

  const auto resumed = run_fixture(a.path(), true);
  for (const auto& s : resumed.stages) CHECK(s.skipped);
  CHECK(Manifest(a / "manifest.jsonl").entries().size() == 4);

  const auto again = run_fixture(a.path());
  for (const auto& s : again.stages) CHECK_FALSE(s.skipped);
  CHECK(Manifest(a / "manifest.jsonl").entries().size() == 4);
}

TEST_CASE("tampered outputs are detected on resume") {
  testing::TempDir tmp;
  run_fixture(tmp.path());
  write_file(tmp / "unique.jsonl", read_file(tmp / "unique.jsonl") + "\n");
  CHECK(testing::error_of([&] { run_fixture(tmp.path(), true); }) == ErrorCode::DigestMismatch);
}

TEST_CASE("seed override changes the mix but not upstream digests") {
  testing::TempDir a, b;
  run_fixture(a.path());
  PipelineOptions opts;
  opts.out_dir = b.path();
  opts.seed = 7;
  run_pipeline(PipelineConfig::load(testing::fixtures() / "pipeline.json"), opts);
  CHECK(read_file(a / "docs.jsonl") == read_file(b / "docs.jsonl"));
  CHECK(Manifest(b / "manifest.jsonl").entries()[3].seed == 7);
}

TEST_CASE("config validation") {
  const fs::path base = testing::fixtures();
  CHECK(testing::error_of([&] { PipelineConfig::from_json(json::array(), base); }) == ErrorCode::ConfigError);
  CHECK(testing::error_of([&] { PipelineConfig::from_json({{"ingest", {{"inputs", json::array()}}}}, base); }) ==
        ErrorCode::ConfigError);
  CHECK(testing::error_of([&] { PipelineConfig::from_json({{"bogus", json::object()}}, base); }) ==
        ErrorCode::ConfigError);
  CHECK(testing::error_of([&] { PipelineConfig::load(base / "missing.json"); }) == ErrorCode::ConfigError);

  testing::TempDir tmp;
  json j = json::parse(read_file(base / "pipeline.json"));
  j["mix"]["ratio"] = "2:1";
  CHECK(testing::error_of([&] { PipelineConfig::from_json(j, base); }) == ErrorCode::ConfigError);
  PipelineOptions opts;
  opts.out_dir = tmp.path();

  j = json::parse(read_file(base / "pipeline.json"));
  j["ingest"]["inputs"][0]["path"] = "corpus/nope.jsonl";
  const auto missing = PipelineConfig::from_json(j, base);
  CHECK(testing::error_of([&] { run_pipeline(missing, opts); }) == ErrorCode::StageFailure);
}

TEST_CASE("artifact stats") {
  testing::TempDir tmp;
  run_fixture(tmp.path());
  CHECK(detect_schema(tmp / "docs.jsonl") == ArtifactSchema::documents);
  CHECK(detect_schema(tmp / "train.jsonl") == ArtifactSchema::training_items);
  CHECK(detect_schema(tmp / "dup_pairs.jsonl") == ArtifactSchema::dup_pairs);
  CHECK(detect_schema(tmp / "manifest.jsonl") == ArtifactSchema::manifest);
  CHECK(detect_schema(tmp / "filter_report.json") == ArtifactSchema::filter_report);
  CHECK(detect_schema(tmp / "dedup_report.json") == ArtifactSchema::dedup_report);
  CHECK(detect_schema(tmp / "mix_report.json") == ArtifactSchema::mix_report);
  CHECK(detect_schema(tmp / "trainer.json") == ArtifactSchema::trainer_config);
  CHECK(detect_schema(testing::fixtures() / "evalhome.jsonl") == ArtifactSchema::mcq);
  CHECK(testing::error_of([] { detect_schema(testing::fixtures() / "sensitive_words.txt"); }) ==
        ErrorCode::UnknownSchema);

  const auto st = artifact_stats(testing::fixtures() / "evalhome.jsonl");
  CHECK(st.summary["total"] == 113);
  CHECK(st.text.find("questions: 113") != std::string::npos);
}

TEST_CASE("generation stage replays offline") {
  httplib::Server server;
  std::atomic<int> hits{0};
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    ++hits;
    const std::string prompt = json::parse(req.body)["messages"].back()["content"];
    std::string content;
    if (prompt.find("判断题") != std::string::npos) {
      content = R"({"question":"地漏应安装在哪里？","question_type":"judgment",)"
                R"("candidate_options":{"A":"正确","B":"错误"},"answer":{"correct_option":"A","reason":"常识"}})";
    } else {
      content = "用户：这段内容讲了什么？\n助手：讲的是施工要点。\n用户：能再具体点吗？\n助手：包括基层处理和验收。";
    }
    res.set_content(make_chat_body(content, 1700000000), "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  testing::TempDir tmp;
  EndpointConfig ep;
  ep.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
  ep.model_name = "loopback";
  ep.backoff_ms = {0};
  write_file(tmp / "endpoint.json", ep.to_json().dump());
  json j = json::parse(read_file(testing::fixtures() / "pipeline.json"));
  j["gen"] = {{"endpoint", (tmp / "endpoint.json").string()},
              {"kinds", {"multi_turn", "mcq"}},
              {"archive", (tmp / "archive").string()}};
  const auto cfg = PipelineConfig::from_json(j, testing::fixtures());

  PipelineOptions opts;
  opts.out_dir = tmp / "a";
  run_pipeline(cfg, opts);
  const int online_hits = hits;
  CHECK(online_hits > 0);
  const auto report = json::parse(read_file(tmp / "a" / "gen_report.json"));
  CHECK(report["accepted"] == online_hits);
  CHECK(Manifest(tmp / "a" / "manifest.jsonl").entries().size() == 5);

  server.stop();
  th.join();

  opts.out_dir = tmp / "b";
  opts.offline = true;
  run_pipeline(cfg, opts);
  CHECK(hits == online_hits);
  CHECK(read_file(tmp / "a" / "sft.jsonl") == read_file(tmp / "b" / "sft.jsonl"));
  CHECK(read_file(tmp / "a" / "mcq.jsonl") == read_file(tmp / "b" / "mcq.jsonl"));
  CHECK(detect_schema(tmp / "b" / "sft.jsonl") == ArtifactSchema::instructions);
}
