#include "domainkit/sftgen/endpoint.hpp"

#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <thread>

#include "domainkit/common/error.hpp"
#include "domainkit/common/hash.hpp"

namespace domainkit {

void EndpointConfig::validate() const {
  if (base_url.empty()) throw Error(ErrorCode::ConfigError, "endpoint base_url is empty");
  if (model_name.empty()) throw Error(ErrorCode::ConfigError, "endpoint model_name is empty");
  if (concurrency_limit < 1) throw Error(ErrorCode::ConfigError, "concurrency_limit must be >= 1");
  if (max_retries < 0) throw Error(ErrorCode::ConfigError, "max_retries must be >= 0");
  if (temperature < 0) throw Error(ErrorCode::ConfigError, "temperature must be >= 0");
  for (int b : backoff_ms) {
    if (b < 0) throw Error(ErrorCode::ConfigError, "backoff entries must be >= 0");
  }
}

EndpointConfig EndpointConfig::from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "endpoint config must be an object");
  EndpointConfig c;
  try {
    c.base_url = j.value("base_url", c.base_url);
    c.model_name = j.value("model_name", c.model_name);
    c.api_key_env = j.value("api_key_env", c.api_key_env);
    c.temperature = j.value("temperature", c.temperature);
    c.max_retries = j.value("max_retries", c.max_retries);
    if (j.contains("backoff_ms")) c.backoff_ms = j["backoff_ms"].get<std::vector<int>>();
    const auto limit = j.value("concurrency_limit", static_cast<long long>(c.concurrency_limit));
    if (limit < 1) throw Error(ErrorCode::ConfigError, "concurrency_limit must be >= 1");
    c.concurrency_limit = static_cast<std::size_t>(limit);
    c.timeout_s = j.value("timeout_s", c.timeout_s);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("endpoint config: ") + e.what());
  }
  c.validate();
  return c;
}

json EndpointConfig::to_json() const {
  return {{"base_url", base_url},       {"model_name", model_name},   {"api_key_env", api_key_env},
          {"temperature", temperature}, {"max_retries", max_retries}, {"backoff_ms", backoff_ms},
          {"concurrency_limit", concurrency_limit}, {"timeout_s", timeout_s}};
}

EndpointConfig load_endpoint_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
  return EndpointConfig::from_json(j);
}

json request_body(const ChatRequest& req, const std::string& model) {
  json messages = json::array();
  for (const auto& m : req.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  json body = {{"model", model}, {"messages", messages}, {"temperature", req.temperature}};
  if (req.want_logprobs) {
    body["logprobs"] = true;
    body["top_logprobs"] = 10;
  }
  return body;
}

void decode_chat_body(ChatResponse& resp) {
  const auto j = json::parse(resp.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return;
  if (j.contains("created") && j["created"].is_number_integer()) resp.created = j["created"].get<std::int64_t>();
  if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty()) return;
  const auto& choice = j["choices"][0];
  if (choice.contains("message") && choice["message"].is_object()) {
    const auto& content = choice["message"].value("content", json());
    if (content.is_string()) resp.content = content.get<std::string>();
  }
  if (choice.contains("logprobs") && choice["logprobs"].is_object()) {
    const auto& lp = choice["logprobs"];
    if (lp.contains("content") && lp["content"].is_array() && !lp["content"].empty()) {
      const auto& first = lp["content"][0];
      if (first.contains("top_logprobs") && first["top_logprobs"].is_array()) {
        for (const auto& alt : first["top_logprobs"]) {
          if (alt.contains("token") && alt.contains("logprob") && alt["logprob"].is_number()) {
            resp.top_logprobs[alt["token"].get<std::string>()] = alt["logprob"].get<double>();
          }
        }
      }
    }
  }
}

std::string make_chat_body(const std::string& content, std::int64_t created,
                           const std::map<std::string, double>& top_logprobs) {
  json choice = {{"index", 0},
                 {"message", {{"role", "assistant"}, {"content", content}}},
                 {"finish_reason", "stop"}};
  if (!top_logprobs.empty()) {
    json alts = json::array();
    for (const auto& [tok, lp] : top_logprobs) alts.push_back({{"token", tok}, {"logprob", lp}});
    choice["logprobs"] = {{"content", json::array({{{"token", top_logprobs.begin()->first}, {"top_logprobs", alts}}})}};
  }
  return dump_line({{"object", "chat.completion"}, {"created", created}, {"choices", json::array({choice})}});
}

ChatResponse make_chat_response(const std::string& content, std::int64_t created) {
  ChatResponse r;
  r.status = 200;
  r.body = make_chat_body(content, created);
  decode_chat_body(r);
  return r;
}

HttpChatEndpoint::HttpChatEndpoint(EndpointConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  const auto scheme_end = cfg_.base_url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorCode::ConfigError, "base_url needs a scheme: " + cfg_.base_url);
  const auto path_start = cfg_.base_url.find('/', scheme_end + 3);
  origin_ = cfg_.base_url.substr(0, path_start);
  if (path_start != std::string::npos) path_prefix_ = cfg_.base_url.substr(path_start);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

ChatResponse HttpChatEndpoint::send(const ChatRequest& req) {
  httplib::Client client(origin_);
  client.set_connection_timeout(cfg_.timeout_s, 0);
  client.set_read_timeout(cfg_.timeout_s, 0);
  client.set_write_timeout(cfg_.timeout_s, 0);
  httplib::Headers headers;
  if (!cfg_.api_key_env.empty()) {
    if (const char* key = std::getenv(cfg_.api_key_env.c_str()); key && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }
  ChatResponse resp;
  auto res = client.Post(path_prefix_ + "/chat/completions", headers, dump_line(request_body(req, cfg_.model_name)),
                         "application/json");
  if (!res) {
    resp.error = httplib::to_string(res.error());
    return resp;
  }
  resp.status = res->status;
  resp.body = res->body;
  if (resp.ok()) decode_chat_body(resp);
  return resp;
}

ChatResponse send_with_retry(ChatEndpoint& ep, const ChatRequest& req, int max_retries,
                             const std::vector<int>& backoff_ms, int* attempts) {
  ChatResponse resp;
  int n = 0;
  for (;;) {
    ++n;
    try {
      resp = ep.send(req);
    } catch (const std::exception& e) {
      resp = ChatResponse{};
      resp.error = e.what();
    }
    if (resp.ok() || !resp.retryable() || n > max_retries) break;
    if (!backoff_ms.empty()) {
      const int wait = backoff_ms[std::min<std::size_t>(n - 1, backoff_ms.size() - 1)];
      if (wait > 0) std::this_thread::sleep_for(std::chrono::milliseconds(wait));
    }
  }
  if (attempts) *attempts = n;
  return resp;
}

ResponseArchive::ResponseArchive(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path ResponseArchive::path_for(const std::string& request_id) const {
  std::string name;
  bool changed = request_id.empty();
  for (char c : request_id) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    name.push_back(ok ? c : '_');
    changed |= !ok;
  }
  if (changed) name += "-" + to_hex(murmur3_128(request_id)).substr(0, 12);
  return dir_ / (name + ".json");
}

std::optional<ArchiveEntry> ResponseArchive::load(const std::string& request_id) const {
  const auto p = path_for(request_id);
  if (!std::filesystem::exists(p)) return std::nullopt;
  json j;
  try {
    j = json::parse(read_file(p));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, p.string() + ": " + e.what());
  }
  ArchiveEntry e;
  e.request_id = j.value("request_id", std::string{});
  if (e.request_id != request_id) return std::nullopt;
  e.model = j.value("model", std::string{});
  e.request = j.value("request", json());
  e.status = j.value("status", 0);
  e.body = j.value("body", std::string{});
  e.error = j.value("error", std::string{});
  return e;
}

void ResponseArchive::store(const ArchiveEntry& e) const {
  const json j = {{"request_id", e.request_id}, {"model", e.model}, {"request", e.request},
                  {"status", e.status},         {"body", e.body},   {"error", e.error}};
  write_file(path_for(e.request_id), dump_pretty(j) + "\n");
}

std::vector<std::string> ResponseArchive::request_ids() const {
  std::vector<std::string> ids;
  if (!std::filesystem::exists(dir_)) return ids;
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    if (entry.path().extension() != ".json") continue;
    try {
      const auto j = json::parse(read_file(entry.path()));
      if (j.contains("request_id")) ids.push_back(j["request_id"].get<std::string>());
    } catch (const json::exception&) {
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

RequestRunner::RequestRunner(ChatEndpoint* endpoint, std::optional<ResponseArchive> archive, std::size_t budget,
                             int max_retries, std::vector<int> backoff_ms)
    : endpoint_(endpoint),
      archive_(std::move(archive)),
      budget_(budget),
      max_retries_(max_retries),
      backoff_ms_(std::move(backoff_ms)) {}

ChatResponse RequestRunner::run(const std::string& request_id, const ChatRequest& req) {
  if (archive_) {
    if (auto hit = archive_->load(request_id); hit && hit->status == 200) {
      ChatResponse resp;
      resp.status = hit->status;
      resp.body = hit->body;
      decode_chat_body(resp);
      resp.model = hit->model;
      std::lock_guard lock(mu_);
      ++counts_.requests;
      ++counts_.replayed;
      if (archived_model_.empty()) archived_model_ = hit->model;
      return resp;
    }
  }
  if (!endpoint_) {
    std::lock_guard lock(mu_);
    ++counts_.requests;
    throw Error(ErrorCode::TransportError, "offline and no archived response for " + request_id);
  }
  {
    std::lock_guard lock(mu_);
    if (counts_.network >= budget_) {
      exhausted_ = true;
      throw Error(ErrorCode::BudgetExhausted, "request budget of " + std::to_string(budget_) + " spent");
    }
    ++counts_.network;
    ++counts_.requests;
  }
  ChatResponse resp = send_with_retry(*endpoint_, req, max_retries_, backoff_ms_);
  resp.model = endpoint_->model_name();
  if (archive_) {
    archive_->store({request_id, endpoint_->model_name(), request_body(req, endpoint_->model_name()), resp.status,
                     resp.body, resp.error});
  }
  if (!resp.ok()) {
    throw Error(ErrorCode::TransportError,
                request_id + ": " + (resp.status ? "HTTP " + std::to_string(resp.status) : resp.error));
  }
  return resp;
}

RunnerCounts RequestRunner::counts() const {
  std::lock_guard lock(mu_);
  return counts_;
}

std::string RequestRunner::model_name() const {
  if (endpoint_) return endpoint_->model_name();
  std::lock_guard lock(mu_);
  return archived_model_;
}

}  // namespace domainkit
