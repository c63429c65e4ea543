#include "domainkit/sftgen/generate.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <optional>
#include <tuple>

#include "domainkit/common/hash.hpp"
#include "domainkit/common/parallel.hpp"
#include "domainkit/common/text.hpp"
#include "domainkit/sftgen/responses.hpp"

namespace domainkit {

void GenLog::accept(const std::string& request_id) {
  std::lock_guard lock(mu_);
  outcomes_.push_back({request_id, true, {}, {}});
}

void GenLog::reject(const std::string& request_id, const Error& e) {
  std::lock_guard lock(mu_);
  outcomes_.push_back({request_id, false, std::string(error_code_name(e.code())), e.detail()});
}

void GenLog::salvage(const std::string& request_id, ErrorCode code, const std::string& message) {
  std::lock_guard lock(mu_);
  salvaged_.push_back({request_id, true, std::string(error_code_name(code)), message});
}

namespace {
std::vector<RequestOutcome> sorted(std::vector<RequestOutcome> v) {
  std::stable_sort(v.begin(), v.end(),
                   [](const RequestOutcome& a, const RequestOutcome& b) { return a.request_id < b.request_id; });
  return v;
}
}  // namespace

std::vector<RequestOutcome> GenLog::outcomes() const {
  std::lock_guard lock(mu_);
  return sorted(outcomes_);
}

std::vector<RequestOutcome> GenLog::salvaged() const {
  std::lock_guard lock(mu_);
  return sorted(salvaged_);
}

std::string request_id(GenKind kind, const std::string& doc_id, int answer_index) {
  std::string id = std::string(to_string(kind)) + "-" + doc_id;
  if (kind == GenKind::one_turn) {
    if (answer_index < 0) return id + "-q";
    char buf[16];
    std::snprintf(buf, sizeof buf, "-a%02d", answer_index);
    return id + buf;
  }
  return id;
}

std::string iso_utc(std::int64_t unix_seconds) {
  const std::time_t t = static_cast<std::time_t>(unix_seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

ChatRequest user_request(std::string content, const GenOptions& opts) {
  ChatRequest req;
  req.messages.push_back({"user", std::move(content)});
  req.temperature = opts.temperature;
  return req;
}

GenMeta meta_for(const ChatResponse& resp) {
  return {resp.model, iso_utc(resp.created), sha256_hex(resp.body)};
}

// Sends a request and parses the reply; parse or transport failures are
// logged as rejections and rethrown. BudgetExhausted propagates unlogged.
template <typename Parse>
auto run_and_parse(RequestRunner& runner, GenLog* log, const std::string& id, const ChatRequest& req,
                   Parse&& parse) {
  try {
    const ChatResponse resp = runner.run(id, req);
    auto value = parse(resp);
    if (log) log->accept(id);
    return value;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::BudgetExhausted && log) log->reject(id, e);
    throw;
  }
}

const PromptTemplate& template_for(const std::map<GenKind, PromptTemplate>& templates, GenKind kind) {
  const auto it = templates.find(kind);
  if (it == templates.end()) {
    throw Error(ErrorCode::ConfigError, "no prompt template for " + std::string(to_string(kind)));
  }
  return it->second;
}

}  // namespace

std::vector<InstructionSample> gen_one_turn(const Document& knowledge, RequestRunner& runner,
                                            const PromptTemplate& tmpl, const GenOptions& opts, GenLog* log) {
  const std::string step1 = request_id(GenKind::one_turn, knowledge.doc_id);
  const auto parsed = run_and_parse(runner, log, step1, user_request(tmpl.render(knowledge.text), opts),
                                    [&](const ChatResponse& resp) {
                                      return parse_one_turn_response(resp.content, tmpl.category_list, opts.lenient);
                                    });
  if (log) {
    for (const auto& [code, msg] : parsed.salvaged) log->salvage(step1, code, msg);
  }

  std::vector<InstructionSample> samples;
  for (std::size_t i = 0; i < parsed.items.size(); ++i) {
    const auto& qa = parsed.items[i];
    const std::string id = request_id(GenKind::one_turn, knowledge.doc_id, static_cast<int>(i));
    try {
      auto sample = run_and_parse(runner, log, id, user_request(qa.question, opts), [&](const ChatResponse& resp) {
        const std::string answer = text::normalize_whitespace(resp.content);
        if (answer.empty()) throw Error(ErrorCode::MalformedResponse, "empty answer");
        InstructionSample s;
        char buf[16];
        std::snprintf(buf, sizeof buf, "%02zu", i);
        s.id = knowledge.doc_id + "-one_turn-" + buf;
        s.kind = SampleKind::one_turn;
        s.turns = {{Role::user, qa.question}, {Role::assistant, answer}};
        s.category = qa.category;
        s.knowledge_id = knowledge.doc_id;
        s.gen_meta = meta_for(resp);
        validate(s);
        return s;
      });
      samples.push_back(std::move(sample));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::BudgetExhausted) throw;
    }
  }
  return samples;
}

InstructionSample gen_multi_turn(const Document& knowledge, RequestRunner& runner, const PromptTemplate& tmpl,
                                 const GenOptions& opts, GenLog* log) {
  const std::string id = request_id(GenKind::multi_turn, knowledge.doc_id);
  return run_and_parse(runner, log, id, user_request(tmpl.render(knowledge.text), opts),
                       [&](const ChatResponse& resp) {
                         InstructionSample s;
                         s.id = knowledge.doc_id + "-multi_turn";
                         s.kind = SampleKind::multi_turn;
                         s.turns = parse_dialogue_response(resp.content);
                         s.knowledge_id = knowledge.doc_id;
                         s.gen_meta = meta_for(resp);
                         validate(s);
                         return s;
                       });
}

MCQItem gen_mcq(const Document& knowledge, RequestRunner& runner, const PromptTemplate& tmpl,
                const GenOptions& opts, GenLog* log) {
  const std::string id = request_id(GenKind::mcq, knowledge.doc_id);
  return run_and_parse(runner, log, id, user_request(tmpl.render(knowledge.text), opts),
                       [&](const ChatResponse& resp) {
                         MCQItem item = parse_mcq_response(resp.content);
                         item.id = knowledge.doc_id + "-mcq";
                         item.category = opts.mcq_category;
                         item.subclass = std::string(to_string(knowledge.source_kind));
                         item.difficulty = opts.mcq_difficulty;
                         item.knowledge_id = knowledge.doc_id;
                         return item;
                       });
}

json GenReport::to_json() const {
  json rej = json::array();
  for (const auto& r : rejections) {
    rej.push_back({{"request_id", r.request_id}, {"error", r.error_class}, {"message", r.message}});
  }
  return {{"jobs", jobs},
          {"requests", requests},
          {"network_requests", network_requests},
          {"replayed", replayed},
          {"accepted", accepted},
          {"rejected", rejected},
          {"rejected_by_class", rejected_by_class},
          {"salvaged", salvaged},
          {"samples", samples},
          {"mcq_items", mcq_items},
          {"skipped_docs", skipped_docs},
          {"budget_exhausted", budget_exhausted},
          {"rejections", rej},
          {"warnings", warnings}};
}

GenOutput batch_generate(const std::vector<Document>& docs, const std::vector<GenKind>& kinds,
                         RequestRunner& runner, const std::map<GenKind, PromptTemplate>& templates,
                         const GenOptions& opts, std::size_t concurrency) {
  GenOutput out;
  for (GenKind k : kinds) {
    for (auto& w : template_for(templates, k).validate()) out.report.warnings.push_back(std::move(w));
  }

  std::vector<const Document*> eligible;
  for (const auto& d : docs) {
    if (d.status.state == DocState::retained || d.status.state == DocState::ingested) {
      eligible.push_back(&d);
    } else {
      ++out.report.skipped_docs;
    }
  }
  std::sort(eligible.begin(), eligible.end(),
            [](const Document* a, const Document* b) { return a->doc_id < b->doc_id; });

  struct Job {
    const Document* doc;
    GenKind kind;
  };
  std::vector<Job> jobs;
  for (const Document* d : eligible) {
    for (GenKind k : kinds) jobs.push_back({d, k});
  }
  out.report.jobs = jobs.size();

  struct Slot {
    std::vector<InstructionSample> samples;
    std::optional<MCQItem> mcq;
  };
  std::vector<Slot> slots(jobs.size());
  GenLog log;
  parallel_for(jobs.size(), std::max<std::size_t>(1, concurrency), [&](std::size_t i) {
    if (runner.budget_exhausted()) return;
    const Job& job = jobs[i];
    const PromptTemplate& tmpl = template_for(templates, job.kind);
    try {
      switch (job.kind) {
        case GenKind::one_turn:
          slots[i].samples = gen_one_turn(*job.doc, runner, tmpl, opts, &log);
          break;
        case GenKind::multi_turn:
          slots[i].samples.push_back(gen_multi_turn(*job.doc, runner, tmpl, opts, &log));
          break;
        case GenKind::mcq:
          slots[i].mcq = gen_mcq(*job.doc, runner, tmpl, opts, &log);
          break;
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ConfigError) throw;
    }
  });

  // Jobs are ordered by (doc_id, kind list order); sort the flattened output
  // by (knowledge_id, kind, id) so it is independent of the kinds argument.
  for (auto& slot : slots) {
    for (auto& s : slot.samples) out.samples.push_back(std::move(s));
    if (slot.mcq) out.mcq.push_back(std::move(*slot.mcq));
  }
  std::stable_sort(out.samples.begin(), out.samples.end(), [](const auto& a, const auto& b) {
    return std::tie(a.knowledge_id, a.kind, a.id) < std::tie(b.knowledge_id, b.kind, b.id);
  });
  std::stable_sort(out.mcq.begin(), out.mcq.end(),
                   [](const MCQItem& a, const MCQItem& b) { return a.knowledge_id < b.knowledge_id; });

  auto& r = out.report;
  const auto counts = runner.counts();
  r.requests = counts.requests;
  r.network_requests = counts.network;
  r.replayed = counts.replayed;
  for (auto& o : log.outcomes()) {
    if (o.accepted) {
      ++r.accepted;
    } else {
      ++r.rejected;
      ++r.rejected_by_class[o.error_class];
      r.rejections.push_back(std::move(o));
    }
  }
  r.salvaged = log.salvaged().size();
  r.samples = out.samples.size();
  r.mcq_items = out.mcq.size();
  r.budget_exhausted = runner.budget_exhausted();
  return out;
}

}  // namespace domainkit
