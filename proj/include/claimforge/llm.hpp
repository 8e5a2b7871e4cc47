#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>

#include "claimforge/clock.hpp"

namespace claimforge {

enum class LlmJob { Keywords, ClaimExtract, TopicLabel, RelationGen };

const char* to_string(LlmJob job);

struct LlmRequest {
  LlmJob job = LlmJob::Keywords;
  std::string system_text;
  std::string user_text;
  double temperature = 0.0;  // 0 for reproducibility
  int max_output_tokens = 1024;
  std::string model;
};

struct LlmResponse {
  std::string raw_text;
  int attempts = 0;
  int64_t latency_ms = 0;
};

struct RetryPolicy {
  int max_attempts = 4;
  int64_t base_delay_ms = 200;
  double multiplier = 2.0;
};

// Chat-completion transport. Implementations throw TransportError on a
// failed attempt; complete() below owns retries and backoff.
class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual std::string kind() const = 0;
  virtual std::string model() const = 0;
  // Cache-key material: identifies the provider and everything that could
  // change its outputs (fixture contents for mocks, endpoint+model for HTTP).
  virtual std::string fingerprint() const = 0;
  virtual std::string complete_once(const LlmRequest& req) = 0;

  long call_count() const { return calls_.load(); }

 protected:
  void note_call() { calls_.fetch_add(1); }

 private:
  std::atomic<long> calls_{0};
};

// Runs up to policy.max_attempts transport tries with exponential backoff.
// Throws ValidationError on empty user text, StageError("llm", ...) carrying
// the last transport error once the budget is exhausted.
LlmResponse complete(const LlmRequest& req, ChatProvider& provider,
                     const RetryPolicy& policy, Clock& clock);

// Fixture filename stem for a mock completion: digest of (job, user text).
std::string mock_fixture_key(LlmJob job, const std::string& user_text);

// Serves completions from a directory of fixture files named
// "<mock_fixture_key>.txt". A missing fixture is a transport error.
class MockChatProvider : public ChatProvider {
 public:
  explicit MockChatProvider(std::filesystem::path fixture_dir,
                            std::string model = "mock-llm");
  std::string kind() const override { return "mock"; }
  std::string model() const override { return model_; }
  std::string fingerprint() const override;
  std::string complete_once(const LlmRequest& req) override;

 private:
  std::filesystem::path dir_;
  std::string model_;
};

// JSON-over-HTTP chat endpoint: POST {model, messages, temperature,
// max_tokens}; tolerates the common vendor response envelopes. The API key
// is read from the environment (never from config files).
class HttpChatProvider : public ChatProvider {
 public:
  HttpChatProvider(std::string base_url, std::string path, std::string model,
                   std::string api_key_env = "CLAIMFORGE_LLM_API_KEY");
  std::string kind() const override { return "http"; }
  std::string model() const override { return model_; }
  std::string fingerprint() const override;
  std::string complete_once(const LlmRequest& req) override;

 private:
  std::string base_url_;
  std::string path_;
  std::string model_;
  std::string api_key_;
};

// Extracts the completion text from a chat response body. Understands
// {choices:[{message:{content}}]}, {choices:[{text}]}, {content:[{text}]},
// {output_text} and {completion}. Throws TransportError otherwise.
std::string extract_completion_text(const std::string& body);

}  // namespace claimforge
