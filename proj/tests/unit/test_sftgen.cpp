#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>

#include "domainkit/sftgen/generate.hpp"
#include "domainkit/sftgen/json_extract.hpp"
#include "domainkit/sftgen/responses.hpp"
#include "domainkit/sftgen/term_frequency.hpp"
#include "support.hpp"

using namespace domainkit;

namespace {

const std::vector<std::string>& categories() {
  static const auto cats = load_default_template(GenKind::one_turn).category_list;
  return cats;
}

std::string qa_array(std::size_t n, const std::string& category, const std::string& answer = "简答") {
  json arr = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    arr.push_back({{"question", "问题" + std::to_string(i) + "？"}, {"answer", answer}, {"category", category}});
  }
  return arr.dump();
}

Document knowledge(const std::string& id, const std::string& text) {
  Document d;
  d.doc_id = id;
  d.text = text;
  d.source_kind = SourceKind::domain_book;
  d.status.state = DocState::retained;
  return d;
}

const std::string kDialogue =
    "[{\"role\":\"user\",\"content\":\"客厅想做吊顶\"},{\"role\":\"assistant\",\"content\":\"层高多少？\"},"
    "{\"role\":\"user\",\"content\":\"2.8米\"},{\"role\":\"assistant\",\"content\":\"可以做局部吊顶。\"}]";

const std::string kMcq =
    R"({"question":"瓷砖铺贴前应如何处理？","question_type":"single_choice",)"
    R"("candidate_options":{"A":"直接铺","B":"晒干","C":"浸水","D":"涂油"},)"
    R"("answer":{"correct_option":"C","reason":"浸水防止空鼓"}})";

// Answers by what the prompt asks for; step-2 replies echo the question.
ChatResponse scripted(const ChatRequest& req) {
  const std::string& p = req.messages.back().content;
  if (p.find("判断题") != std::string::npos) return make_chat_response("好的：\n" + kMcq, 1700000000);
  if (p.find("对话") != std::string::npos) return make_chat_response(kDialogue, 1700000000);
  if (p.find("类别") != std::string::npos) return make_chat_response(qa_array(6, categories()[0]), 1700000000);
  return make_chat_response("详细解答：" + p, 1700000000);
}

}  // namespace

TEST_CASE("default templates") {
  const auto one = load_default_template(GenKind::one_turn);
  CHECK(one.category_list.size() == kExpectedCategoryCount);
  CHECK(one.validate().empty());
  const auto rendered = one.render("水泥砂浆配比");
  CHECK(rendered.find("水泥砂浆配比") != std::string::npos);
  CHECK(rendered.find(kKnowledgeSlot) == std::string::npos);
  for (GenKind k : {GenKind::multi_turn, GenKind::mcq}) {
    const auto t = load_default_template(k);
    CHECK(t.validate().empty());
  }
  PromptTemplate bad{GenKind::multi_turn, "no slot here", {}};
  CHECK(testing::error_of([&] { bad.validate(); }) == ErrorCode::ConfigError);
  PromptTemplate short_list{GenKind::one_turn, std::string(kKnowledgeSlot), {"行业标准"}};
  CHECK(short_list.validate().size() == 1);
  CHECK(parse_gen_kind("multi-turn") == GenKind::multi_turn);
}

TEST_CASE("JSON extraction tolerates prose") {
  auto j = extract_first_json("这是结果：\n```json\n[{\"a\": 1}]\n```\n谢谢");
  REQUIRE(j);
  CHECK((*j)[0]["a"] == 1);
  j = extract_first_json("{'a': True, 'b': None}");
  REQUIRE(j);
  CHECK((*j)["a"] == true);
  CHECK((*j)["b"].is_null());
  j = extract_first_json("见 {无效} 然后 {\"ok\": 2}");
  REQUIRE(j);
  CHECK((*j)["ok"] == 2);
  CHECK_FALSE(extract_first_json("没有任何结构"));
}

TEST_CASE("one-turn response parsing") {
  const auto ok = parse_one_turn_response(qa_array(6, categories()[1]), categories());
  CHECK(ok.items.size() == 6);
  CHECK(testing::error_of([] { parse_one_turn_response(qa_array(6, "烹饪"), categories()); }) ==
        ErrorCode::CategoryOutOfSet);
  CHECK(testing::error_of([] { parse_one_turn_response(qa_array(4, categories()[0]), categories()); }) ==
        ErrorCode::CountOutOfRange);
  CHECK(testing::error_of([] { parse_one_turn_response(qa_array(21, categories()[0]), categories()); }) ==
        ErrorCode::CountOutOfRange);
  CHECK(testing::error_of([] { parse_one_turn_response("不是 JSON", categories()); }) ==
        ErrorCode::MalformedResponse);

  const auto lenient = parse_one_turn_response(qa_array(25, categories()[0]), categories(), true);
  CHECK(lenient.items.size() == kMaxQuestionsPerDoc);
  CHECK_FALSE(lenient.salvaged.empty());
  json mixed = json::parse(qa_array(6, categories()[0]));
  mixed[2]["category"] = "烹饪";
  const auto dropped = parse_one_turn_response(mixed.dump(), categories(), true);
  CHECK(dropped.items.size() == 5);
}

TEST_CASE("one-turn generation is two-step") {
  const auto tmpl = load_default_template(GenKind::one_turn);
  const auto doc = knowledge("doc1", "防水层施工完成后应做闭水试验。");

  FunctionEndpoint varying("mock", scripted);
  RequestRunner r1(&varying, std::nullopt, 100);
  const auto samples = gen_one_turn(doc, r1, tmpl);
  REQUIRE(samples.size() == 6);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CHECK(samples[i].turns.size() == 2);
    CHECK(samples[i].turns[1].content == "详细解答：" + samples[i].turns[0].content);
    CHECK(samples[i].turns[1].content != "简答");
    CHECK(samples[i].knowledge_id == "doc1");
    CHECK(samples[i].gen_meta.model_name == "mock");
  }
  CHECK(samples[0].id == "doc1-one_turn-00");
  CHECK(r1.counts().requests == 7);

  // A mock that ignores the prompt repeats the step-1 answer verbatim.
  FunctionEndpoint fixed("mock", [](const ChatRequest& req) {
    if (req.messages.back().content.find("类别") != std::string::npos)
      return make_chat_response(qa_array(6, categories()[0]));
    return make_chat_response("简答");
  });
  RequestRunner r2(&fixed, std::nullopt, 100);
  for (const auto& s : gen_one_turn(doc, r2, tmpl)) CHECK(s.turns[1].content == "简答");

  // A failing step-2 request drops only its own sample.
  FunctionEndpoint flaky("mock", [](const ChatRequest& req) {
    const auto& p = req.messages.back().content;
    if (p.find("类别") != std::string::npos) return make_chat_response(qa_array(6, categories()[0]));
    if (p == "问题3？") return make_chat_response("   ");
    return make_chat_response("详细");
  });
  RequestRunner r3(&flaky, std::nullopt, 100);
  GenLog log;
  CHECK(gen_one_turn(doc, r3, tmpl, {}, &log).size() == 5);
  const auto outcomes = log.outcomes();
  CHECK(std::count_if(outcomes.begin(), outcomes.end(), [](const auto& o) { return !o.accepted; }) == 1);
}

TEST_CASE("dialogue parsing and role order") {
  CHECK(parse_dialogue_response(kDialogue).size() == 4);
  const auto labelled = parse_dialogue_response(
      "以下是对话：\n用户：卫生间漏水怎么办？\n助手：先做闭水试验。\n用户：要多久？\n助手：48小时。\n"
      "用户：然后呢？\n助手：再找漏点。");
  CHECK(labelled.size() == 6);
  CHECK(labelled[0].role == Role::user);
  CHECK(labelled[1].content == "先做闭水试验。");
  CHECK(testing::error_of([] { parse_dialogue_response("助手：你好\n用户：你好\n助手：嗯\n用户：好"); }) ==
        ErrorCode::RoleOrderViolation);
  CHECK(testing::error_of([] { parse_dialogue_response("用户：一\n用户：二\n助手：三\n用户：四\n助手：五"); }) ==
        ErrorCode::RoleOrderViolation);
  CHECK(testing::error_of([] { parse_dialogue_response("用户：一\n助手：二"); }) == ErrorCode::MalformedResponse);

  InstructionSample s;
  s.id = "x";
  s.kind = SampleKind::one_turn;
  s.turns = {{Role::assistant, "a"}, {Role::user, "b"}};
  CHECK(testing::error_of([&] { validate(s); }) == ErrorCode::RoleOrderViolation);
}

TEST_CASE("MCQ response parsing") {
  const auto item = parse_mcq_response(kMcq);
  CHECK(item.correct_option == "C");
  CHECK(item.options.size() == 4);
  json judgment = json::parse(kMcq);
  judgment["question_type"] = "judgment";
  CHECK(testing::error_of([&] { parse_mcq_response(judgment.dump()); }) == ErrorCode::ArityError);
  json wrong = json::parse(kMcq);
  wrong["answer"]["correct_option"] = "E";
  CHECK(testing::error_of([&] { parse_mcq_response(wrong.dump()); }) == ErrorCode::OptionMismatch);
  CHECK(testing::error_of([] { parse_mcq_response("{\"question\":\"缺字段\"}"); }) ==
        ErrorCode::MalformedResponse);
}

TEST_CASE("term frequency") {
  InstructionSample s;
  s.turns = {{Role::user, "地板 地板 水电"}};
  const auto tf = term_frequency(std::vector<InstructionSample>{s}, {}, 10);
  REQUIRE(tf.size() == 2);
  CHECK(tf[0] == TermCount{"地板", 2});
  CHECK(tf[1] == TermCount{"水电", 1});
  CHECK(term_frequency(std::vector<std::string>{"地板 地板 水电"}, {"地板"}, 10) ==
        std::vector<TermCount>{{"水电", 1}});
  CHECK(term_frequency(std::vector<std::string>{"地板 地板 水电"}, {}, 1).size() == 1);
  CHECK(split_terms("防水涂料 PVC") == std::vector<std::string>{"防水", "水涂", "涂料", "pvc"});
}

TEST_CASE("retries only transport, 5xx and 429") {
  for (int status : {0, 429, 500, 503}) {
    int calls = 0;
    FunctionEndpoint ep("m", [&](const ChatRequest&) {
      ChatResponse r;
      r.status = ++calls < 3 ? status : 200;
      return r;
    });
    int attempts = 0;
    CHECK(send_with_retry(ep, {}, 3, {0}, &attempts).ok());
    CHECK(attempts == 3);
  }
  for (int status : {400, 401, 404}) {
    FunctionEndpoint ep("m", [&](const ChatRequest&) {
      ChatResponse r;
      r.status = status;
      return r;
    });
    int attempts = 0;
    CHECK(send_with_retry(ep, {}, 3, {0}, &attempts).status == status);
    CHECK(attempts == 1);
  }
  FunctionEndpoint down("m", [](const ChatRequest&) { return ChatResponse{}; });
  int attempts = 0;
  send_with_retry(down, {}, 2, {0}, &attempts);
  CHECK(attempts == 3);
}

TEST_CASE("endpoint config validation") {
  EndpointConfig c;
  c.validate();
  CHECK(EndpointConfig::from_json(c.to_json()).to_json() == c.to_json());
  c.concurrency_limit = 0;
  CHECK(testing::error_of([&] { c.validate(); }) == ErrorCode::ConfigError);
}

TEST_CASE("archive replay, offline determinism and budget") {
  testing::TempDir tmp;
  std::vector<Document> docs{knowledge("d2", "地暖铺设前要做保温层。"), knowledge("d1", "墙面刷漆前先批腻子。")};
  Document dropped = knowledge("d3", "x");
  dropped.status = DocStatus::filtered("length");
  docs.push_back(dropped);
  std::map<GenKind, PromptTemplate> templates;
  for (GenKind k : {GenKind::one_turn, GenKind::multi_turn, GenKind::mcq}) templates[k] = load_default_template(k);
  const std::vector<GenKind> kinds{GenKind::mcq, GenKind::one_turn, GenKind::multi_turn};

  std::atomic<int> sent{0};
  FunctionEndpoint ep("mock", [&](const ChatRequest& req) {
    ++sent;
    return scripted(req);
  });
  RequestRunner live(&ep, ResponseArchive(tmp / "archive"), 1000);
  const auto first = batch_generate(docs, kinds, live, templates, {}, 4);
  CHECK(first.report.skipped_docs == 1);
  CHECK(first.report.jobs == 6);
  CHECK(first.samples.size() == 14);
  CHECK(first.mcq.size() == 2);
  CHECK(first.report.accepted + first.report.rejected == first.report.requests);
  CHECK(sent == 18);
  CHECK(ResponseArchive(tmp / "archive").request_ids().size() == 18);
  CHECK(first.samples.front().knowledge_id == "d1");

  RequestRunner offline(nullptr, ResponseArchive(tmp / "archive"), 0);
  const auto second = batch_generate(docs, kinds, offline, templates, {}, 1);
  CHECK(second.report.network_requests == 0);
  CHECK(second.report.replayed == 18);
  write_instructions(tmp / "a.jsonl", first.samples);
  write_instructions(tmp / "b.jsonl", second.samples);
  CHECK(read_file(tmp / "a.jsonl") == read_file(tmp / "b.jsonl"));
  CHECK(read_instructions(tmp / "a.jsonl") == first.samples);
  CHECK(second.mcq == first.mcq);

  RequestRunner cold(nullptr, ResponseArchive(tmp / "empty"), 0);
  CHECK(testing::error_of([&] { cold.run("x", {}); }) == ErrorCode::TransportError);

  RequestRunner tight(&ep, std::nullopt, 3);
  const auto partial = batch_generate(docs, kinds, tight, templates, {}, 1);
  CHECK(partial.report.budget_exhausted);
  CHECK(partial.report.network_requests == 3);
  CHECK(testing::error_of([&] { tight.run("y", {}); }) == ErrorCode::BudgetExhausted);
}

TEST_CASE("HTTP endpoint speaks the chat-completions protocol") {
  httplib::Server server;
  std::string seen_auth, seen_model;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    seen_auth = req.get_header_value("Authorization");
    seen_model = json::parse(req.body).value("model", "");
    res.set_content(make_chat_body("你好", 1700000000), "application/json");
  });
  server.Post("/v1/fail/chat/completions", [](const httplib::Request&, httplib::Response& res) { res.status = 503; });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  ::setenv("DOMAINKIT_TEST_KEY", "sk-test", 1);
  EndpointConfig cfg;
  cfg.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
  cfg.model_name = "local-model";
  cfg.api_key_env = "DOMAINKIT_TEST_KEY";
  HttpChatEndpoint ep(cfg);
  ChatRequest req;
  req.messages.push_back({"user", "hi"});
  const auto resp = ep.send(req);
  CHECK(resp.ok());
  CHECK(resp.content == "你好");
  CHECK(seen_auth == "Bearer sk-test");
  CHECK(seen_model == "local-model");

  cfg.base_url += "/fail";
  HttpChatEndpoint failing(cfg);
  int attempts = 0;
  CHECK(send_with_retry(failing, req, 2, {0}, &attempts).status == 503);
  CHECK(attempts == 3);

  server.stop();
  th.join();
}
