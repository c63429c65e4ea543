#pragma once

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "domainkit/common/error.hpp"
#include "domainkit/ingest/document.hpp"
#include "domainkit/sftgen/endpoint.hpp"
#include "domainkit/sftgen/instruction.hpp"
#include "domainkit/sftgen/mcq.hpp"
#include "domainkit/sftgen/templates.hpp"

namespace domainkit {

struct GenOptions {
  bool lenient = false;
  double temperature = 0.0;
  std::string mcq_category = "generated";
  Difficulty mcq_difficulty = Difficulty::fundamentals;
};

struct RequestOutcome {
  std::string request_id;
  bool accepted = false;
  std::string error_class;
  std::string message;
};

// Per-request outcomes, appended from worker threads.
class GenLog {
 public:
  void accept(const std::string& request_id);
  void reject(const std::string& request_id, const Error& e);
  void salvage(const std::string& request_id, ErrorCode code, const std::string& message);
  std::vector<RequestOutcome> outcomes() const;  // sorted by request id
  std::vector<RequestOutcome> salvaged() const;

 private:
  mutable std::mutex mu_;
  std::vector<RequestOutcome> outcomes_;
  std::vector<RequestOutcome> salvaged_;
};

// Request ids: one_turn-<doc>-q, one_turn-<doc>-a<NN>, multi_turn-<doc>, mcq-<doc>.
std::string request_id(GenKind kind, const std::string& doc_id, int answer_index = -1);

// ISO-8601 UTC for a unix timestamp.
std::string iso_utc(std::int64_t unix_seconds);

// Two-step one-turn generation: the template yields {question, answer,
// category} items, then each question is asked on its own and the detailed
// reply becomes the answer. Step-1 failures throw; a failed step-2 request
// drops only that sample.
std::vector<InstructionSample> gen_one_turn(const Document& knowledge, RequestRunner& runner,
                                            const PromptTemplate& tmpl, const GenOptions& opts = {},
                                            GenLog* log = nullptr);
InstructionSample gen_multi_turn(const Document& knowledge, RequestRunner& runner, const PromptTemplate& tmpl,
                                 const GenOptions& opts = {}, GenLog* log = nullptr);
MCQItem gen_mcq(const Document& knowledge, RequestRunner& runner, const PromptTemplate& tmpl,
                const GenOptions& opts = {}, GenLog* log = nullptr);

struct GenReport {
  std::size_t jobs = 0;
  std::size_t requests = 0;
  std::size_t network_requests = 0;
  std::size_t replayed = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::map<std::string, std::size_t> rejected_by_class;
  std::size_t salvaged = 0;
  std::size_t samples = 0;
  std::size_t mcq_items = 0;
  std::size_t skipped_docs = 0;
  bool budget_exhausted = false;
  std::vector<RequestOutcome> rejections;
  std::vector<std::string> warnings;

  json to_json() const;
};

struct GenOutput {
  std::vector<InstructionSample> samples;  // sorted by (knowledge_id, kind, index)
  std::vector<MCQItem> mcq;                // sorted by knowledge_id
  GenReport report;
};

// One job per (document, kind); documents not in a retained/ingested state
// are skipped. Jobs run on up to `concurrency` threads. When the budget runs
// out the remaining jobs are skipped and the partial output is returned with
// report.budget_exhausted set.
GenOutput batch_generate(const std::vector<Document>& docs, const std::vector<GenKind>& kinds,
                         RequestRunner& runner, const std::map<GenKind, PromptTemplate>& templates,
                         const GenOptions& opts, std::size_t concurrency);

}  // namespace domainkit
