#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "claimforge/llm.hpp"
#include "claimforge/records.hpp"
#include "claimforge/source.hpp"
#include "claimforge/split.hpp"
#include "claimforge/types.hpp"

namespace claimforge {

struct LlmSection {
  std::string kind = "mock";  // mock | http
  std::string mock_dir;
  std::string endpoint;       // e.g. "http://host:port"
  std::string path = "/v1/chat/completions";
  std::string model = "mock-llm";
  double temperature = 0.0;
  int max_output_tokens = 1024;
  RetryPolicy retry;
};

struct EmbeddingSection {
  std::string kind = "hash";  // hash | http
  int dim = 64;
  uint64_t seed = 1;
  std::string endpoint;
  std::string path = "/v1/embeddings";
  std::string model;
  RetryPolicy retry;
};

struct SourceSection {
  std::string kind = "local";  // local | http
  std::string corpus_dir;
  std::string endpoint;
  std::string path = "/search";
  SourceConfig cfg;
};

struct RunConfig {
  std::vector<Topic> topics;
  // When set, the selection stages are skipped and annotation runs over
  // this canonical posts.jsonl file instead of fetched posts.
  std::string external_posts;
  uint64_t seed = 0;
  int heavy_n = 10;
  int lesser_n = 20;
  int query_count = 25;
  int keyword_refill_attempts = 3;
  LlmSection llm;
  EmbeddingSection embedding;
  SourceSection source;
  std::vector<std::string> candidate_labels;
  bool allow_freeform = true;
  double abort_failure_rate = 0.5;
  size_t max_claim_chars = 400;
  double tau = 0.95;
  SplitProportions proportions;
  int eval_k = 20;
  std::string out_dir = "out";
  std::string work_dir = "work";
};

struct ConfigLoad {
  RunConfig config;
  std::vector<std::string> violations;  // empty means the config is usable

  bool ok() const { return violations.empty(); }
};

// Applies defaults and reports every violation at once. Unknown keys are
// tolerated; secrets never live in config files (providers read API keys
// from the environment).
ConfigLoad validate_config(const ordered_json& doc);
ConfigLoad load_config_file(const std::filesystem::path& path);

ordered_json to_json(const RunConfig& c);

}  // namespace claimforge
