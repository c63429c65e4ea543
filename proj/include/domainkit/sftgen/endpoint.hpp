#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "domainkit/common/jsonl.hpp"

namespace domainkit {

struct EndpointConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model_name = "gpt-4";
  std::string api_key_env = "OPENAI_API_KEY";
  double temperature = 0.0;
  int max_retries = 3;
  std::vector<int> backoff_ms{500, 1000, 2000};
  std::size_t concurrency_limit = 4;
  int timeout_s = 120;

  // Throws ConfigError.
  void validate() const;
  static EndpointConfig from_json(const json& j);
  json to_json() const;
};

EndpointConfig load_endpoint_config(const std::filesystem::path& path);

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  bool want_logprobs = false;
};

json request_body(const ChatRequest& req, const std::string& model);

struct ChatResponse {
  int status = 0;      // HTTP status; 0 for transport failures
  std::string body;    // raw response body
  std::string error;   // transport error text
  std::string content; // choices[0].message.content
  std::int64_t created = 0;
  std::string model;   // model that produced the response (set by RequestRunner)
  // First generated token's alternatives (token -> logprob), when requested.
  std::map<std::string, double> top_logprobs;

  bool ok() const { return status == 200; }
  bool retryable() const { return status == 0 || status == 429 || status >= 500; }
};

// Fills content/created/top_logprobs from `body`; leaves them empty when the
// body is not a chat-completion object.
void decode_chat_body(ChatResponse& resp);

// OpenAI-style completion body wrapping `content`.
std::string make_chat_body(const std::string& content, std::int64_t created = 0,
                           const std::map<std::string, double>& top_logprobs = {});
ChatResponse make_chat_response(const std::string& content, std::int64_t created = 0);

class ChatEndpoint {
 public:
  virtual ~ChatEndpoint() = default;
  virtual ChatResponse send(const ChatRequest& req) = 0;
  virtual std::string model_name() const = 0;
};

// POST {base_url}/chat/completions with a bearer token read from the
// environment variable named by api_key_env.
class HttpChatEndpoint : public ChatEndpoint {
 public:
  explicit HttpChatEndpoint(EndpointConfig cfg);
  ChatResponse send(const ChatRequest& req) override;
  std::string model_name() const override { return cfg_.model_name; }

 private:
  EndpointConfig cfg_;
  std::string origin_;
  std::string path_prefix_;
};

// In-process endpoint backed by a callback (tests, scripted mocks).
class FunctionEndpoint : public ChatEndpoint {
 public:
  using Fn = std::function<ChatResponse(const ChatRequest&)>;
  FunctionEndpoint(std::string model, Fn fn) : model_(std::move(model)), fn_(std::move(fn)) {}
  ChatResponse send(const ChatRequest& req) override { return fn_(req); }
  std::string model_name() const override { return model_; }

 private:
  std::string model_;
  Fn fn_;
};

// Retries transport failures, 429 and 5xx up to max_retries times, sleeping
// per the backoff schedule (last entry repeats).
ChatResponse send_with_retry(ChatEndpoint& ep, const ChatRequest& req, int max_retries,
                             const std::vector<int>& backoff_ms, int* attempts = nullptr);

struct ArchiveEntry {
  std::string request_id;
  std::string model;
  json request;
  int status = 0;
  std::string body;
  std::string error;
};

// One JSON file per request id.
class ResponseArchive {
 public:
  explicit ResponseArchive(std::filesystem::path dir);
  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path path_for(const std::string& request_id) const;
  std::optional<ArchiveEntry> load(const std::string& request_id) const;
  void store(const ArchiveEntry& entry) const;
  std::vector<std::string> request_ids() const;

 private:
  std::filesystem::path dir_;
};

struct RunnerCounts {
  std::size_t requests = 0;
  std::size_t network = 0;
  std::size_t replayed = 0;
};

// Sends requests through the archive: a successful archived response for the
// same id is replayed; otherwise the request goes to the endpoint (counted
// against `budget`, BudgetExhausted when spent) and the final response is
// archived. Without an endpoint (offline) an archive miss is a TransportError.
class RequestRunner {
 public:
  RequestRunner(ChatEndpoint* endpoint, std::optional<ResponseArchive> archive, std::size_t budget,
                int max_retries = 3, std::vector<int> backoff_ms = {0});

  ChatResponse run(const std::string& request_id, const ChatRequest& req);
  RunnerCounts counts() const;
  std::string model_name() const;
  bool budget_exhausted() const { return exhausted_.load(); }

 private:
  ChatEndpoint* endpoint_;
  std::optional<ResponseArchive> archive_;
  std::size_t budget_;
  int max_retries_;
  std::vector<int> backoff_ms_;
  mutable std::mutex mu_;
  RunnerCounts counts_;
  std::atomic<bool> exhausted_{false};
  std::string archived_model_;
};

}  // namespace domainkit
