#include "claimforge/llm.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "claimforge/digest.hpp"
#include "claimforge/errors.hpp"

namespace claimforge {

const char* to_string(LlmJob job) {
  switch (job) {
    case LlmJob::Keywords:
      return "keywords";
    case LlmJob::ClaimExtract:
      return "claim_extract";
    case LlmJob::TopicLabel:
      return "topic_label";
    case LlmJob::RelationGen:
      return "relation_gen";
  }
  return "unknown";
}

LlmResponse complete(const LlmRequest& req, ChatProvider& provider,
                     const RetryPolicy& policy, Clock& clock) {
  if (req.user_text.empty()) {
    throw ValidationError("llm request has empty user text");
  }
  std::string last_error;
  int64_t delay = policy.base_delay_ms;
  for (int attempt = 1; attempt <= policy.max_attempts; ++attempt) {
    int64_t start = clock.now_ms();
    try {
      std::string raw = provider.complete_once(req);
      LlmResponse resp;
      resp.raw_text = std::move(raw);
      resp.attempts = attempt;
      resp.latency_ms = clock.now_ms() - start;
      return resp;
    } catch (const TransportError& e) {
      last_error = e.what();
      if (attempt < policy.max_attempts) {
        clock.sleep_ms(delay);
        delay = static_cast<int64_t>(delay * policy.multiplier);
      }
    }
  }
  throw StageError("llm",
                   "provider failed after " +
                       std::to_string(policy.max_attempts) + " attempts",
                   last_error);
}

std::string mock_fixture_key(LlmJob job, const std::string& user_text) {
  return sha256_hex128(frame_fields({to_string(job), user_text}));
}

MockChatProvider::MockChatProvider(std::filesystem::path fixture_dir,
                                   std::string model)
    : dir_(std::move(fixture_dir)), model_(std::move(model)) {}

std::string MockChatProvider::fingerprint() const {
  // Digest of (filename, content digest) pairs so editing any fixture
  // invalidates dependent stage caches.
  std::map<std::string, std::string> entries;
  if (std::filesystem::is_directory(dir_)) {
    for (const auto& e : std::filesystem::directory_iterator(dir_)) {
      if (e.is_regular_file()) {
        entries[e.path().filename().string()] = file_digest(e.path());
      }
    }
  }
  std::string acc = "mock-llm:" + model_;
  for (const auto& [name, digest] : entries) {
    acc += "\n" + name + " " + digest;
  }
  return sha256_hex128(acc);
}

std::string MockChatProvider::complete_once(const LlmRequest& req) {
  note_call();
  auto path = dir_ / (mock_fixture_key(req.job, req.user_text) + ".txt");
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw TransportError("no fixture for " + std::string(to_string(req.job)) +
                         " request: " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

HttpChatProvider::HttpChatProvider(std::string base_url, std::string path,
                                   std::string model, std::string api_key_env)
    : base_url_(std::move(base_url)),
      path_(std::move(path)),
      model_(std::move(model)) {
  if (const char* key = std::getenv(api_key_env.c_str())) {
    api_key_ = key;
  }
}

std::string HttpChatProvider::fingerprint() const {
  return sha256_hex128("http-llm:" + base_url_ + path_ + ":" + model_);
}

std::string HttpChatProvider::complete_once(const LlmRequest& req) {
  note_call();
  nlohmann::json body{
      {"model", req.model.empty() ? model_ : req.model},
      {"messages",
       nlohmann::json::array(
           {{{"role", "system"}, {"content", req.system_text}},
            {{"role", "user"}, {"content", req.user_text}}})},
      {"temperature", req.temperature},
      {"max_tokens", req.max_output_tokens}};

  httplib::Client cli(base_url_);
  cli.set_connection_timeout(30);
  cli.set_read_timeout(120);
  httplib::Headers headers;
  if (!api_key_.empty()) {
    headers.insert({"Authorization", "Bearer " + api_key_});
  }
  auto res = cli.Post(path_, headers, body.dump(), "application/json");
  if (!res) {
    throw TransportError("llm http request failed: " +
                         httplib::to_string(res.error()));
  }
  if (res->status == 401 || res->status == 403) {
    throw AuthError("llm endpoint rejected credentials (status " +
                    std::to_string(res->status) + ")");
  }
  if (res->status != 200) {
    throw TransportError("llm endpoint returned status " +
                         std::to_string(res->status));
  }
  return extract_completion_text(res->body);
}

std::string extract_completion_text(const std::string& body) {
  nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw TransportError("llm response is not a JSON object");
  }
  if (j.contains("choices") && j["choices"].is_array() &&
      !j["choices"].empty()) {
    const auto& c = j["choices"][0];
    if (c.contains("message") && c["message"].contains("content") &&
        c["message"]["content"].is_string()) {
      return c["message"]["content"].get<std::string>();
    }
    if (c.contains("text") && c["text"].is_string()) {
      return c["text"].get<std::string>();
    }
  }
  if (j.contains("content") && j["content"].is_array() &&
      !j["content"].empty() && j["content"][0].contains("text") &&
      j["content"][0]["text"].is_string()) {
    return j["content"][0]["text"].get<std::string>();
  }
  if (j.contains("output_text") && j["output_text"].is_string()) {
    return j["output_text"].get<std::string>();
  }
  if (j.contains("completion") && j["completion"].is_string()) {
    return j["completion"].get<std::string>();
  }
  throw TransportError("unrecognized llm response envelope");
}

}  // namespace claimforge
