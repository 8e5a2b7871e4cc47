#pragma once

#include <atomic>
#include <deque>
#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "claimforge/clock.hpp"
#include "claimforge/keywords.hpp"
#include "claimforge/llm.hpp"  // RetryPolicy
#include "claimforge/types.hpp"

namespace claimforge {

struct SourceConfig {
  std::string source_id = "local";
  std::string endpoint;  // http sources only
  int page_size = 25;
  int max_posts_per_query = 100;
  int requests_per_minute = 60;
  RetryPolicy retry{3, 250, 2.0};
  int min_tokens = 3;  // posts shorter than this are dropped at ingestion
};

// Raw item as returned by a source, before normalization.
struct RawPost {
  std::string id;          // may be empty; content hash is used then
  std::string text;
  std::string url;
  std::string created_at;  // ISO timestamp or epoch seconds; may be empty
};

struct SearchPage {
  std::vector<RawPost> items;
  std::string next_token;  // empty when exhausted
};

class SearchSource {
 public:
  virtual ~SearchSource() = default;
  virtual std::string source_id() const = 0;
  virtual std::string fingerprint() const = 0;
  // One page of results. Throws TransportError on a failed attempt,
  // AuthError when credentials are rejected.
  virtual SearchPage search(const Query& query, int page_size,
                            const std::string& page_token) = 0;

  long call_count() const { return calls_.load(); }

 protected:
  void note_call() { calls_.fetch_add(1); }

 private:
  std::atomic<long> calls_{0};
};

// Sliding-window limiter: at most `per_minute` grants in any 60 s window.
// The one shared, synchronized object when queries fetch concurrently.
class RateLimiter {
 public:
  RateLimiter(int per_minute, Clock& clock);
  void acquire();
  // Grant timestamps (ms), for asserting the window property in tests.
  std::vector<int64_t> grant_times() const;

 private:
  int per_minute_;
  Clock& clock_;
  mutable std::mutex mu_;
  std::deque<int64_t> window_;
  std::vector<int64_t> grants_;
};

struct FetchFailure {
  std::string query;
  std::string error;
};

struct FetchReport {
  long requests = 0;
  long raw_items = 0;
  long dropped_short = 0;
  long deduplicated = 0;
  std::vector<FetchFailure> failures;
};

// Fetches up to cfg.max_posts_per_query posts for every query in the plan,
// normalizing, filtering short posts, and deduplicating across queries by
// content hash (first query wins). Transport failures beyond the retry
// budget become per-query entries in the report; AuthError aborts the stage.
std::vector<Post> fetch_posts(const std::vector<QueryPlan>& plans,
                              const SourceConfig& cfg, SearchSource& source,
                              RateLimiter& limiter, Clock& clock,
                              FetchReport& report);

// Offline source over a directory of *.jsonl files with records
// {id?, text, url?, created_at?}. A post matches a query when its text
// contains all three terms, case-insensitively.
class LocalCorpusSource : public SearchSource {
 public:
  LocalCorpusSource(std::filesystem::path corpus_dir, std::string source_id);
  std::string source_id() const override { return source_id_; }
  std::string fingerprint() const override;
  SearchPage search(const Query& query, int page_size,
                    const std::string& page_token) override;

 private:
  void ensure_loaded();
  std::filesystem::path dir_;
  std::string source_id_;
  bool loaded_ = false;
  std::vector<RawPost> corpus_;          // file order, stable
  std::vector<std::string> folded_text_;  // casefolded, aligned with corpus_
};

// GET <endpoint>?q=<query>&page_size=N[&page_token=T] returning
// {"items": [{id?, text, url?, created_at?}...], "next_page_token": "..."}.
class HttpSearchSource : public SearchSource {
 public:
  HttpSearchSource(std::string base_url, std::string path,
                   std::string source_id,
                   std::string api_key_env = "CLAIMFORGE_SOURCE_API_KEY");
  std::string source_id() const override { return source_id_; }
  std::string fingerprint() const override;
  SearchPage search(const Query& query, int page_size,
                    const std::string& page_token) override;

 private:
  std::string base_url_;
  std::string path_;
  std::string source_id_;
  std::string api_key_;
};

}  // namespace claimforge
