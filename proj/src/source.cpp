#include "claimforge/source.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <fstream>
#include <map>
#include <unordered_set>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "claimforge/digest.hpp"
#include "claimforge/errors.hpp"
#include "claimforge/text.hpp"

namespace claimforge {

RateLimiter::RateLimiter(int per_minute, Clock& clock)
    : per_minute_(per_minute), clock_(clock) {}

void RateLimiter::acquire() {
  std::lock_guard<std::mutex> lock(mu_);
  for (;;) {
    int64_t now = clock_.now_ms();
    while (!window_.empty() && window_.front() <= now - 60'000) {
      window_.pop_front();
    }
    if (static_cast<int>(window_.size()) < per_minute_) {
      window_.push_back(now);
      grants_.push_back(now);
      return;
    }
    clock_.sleep_ms(window_.front() + 60'000 - now);
  }
}

std::vector<int64_t> RateLimiter::grant_times() const {
  std::lock_guard<std::mutex> lock(mu_);
  return grants_;
}

namespace {

// ISO pass-through when the source already provides a timestamp; numeric
// strings are treated as epoch seconds. Anything else maps to the epoch so
// reruns stay byte-identical.
std::string normalize_timestamp(const std::string& created_at) {
  if (created_at.empty()) return format_utc(0);
  if (created_at.size() >= 19 && created_at[4] == '-' &&
      created_at[10] == 'T') {
    return created_at.size() == 20 && created_at.back() == 'Z'
               ? created_at
               : created_at.substr(0, 19) + "Z";
  }
  char* end = nullptr;
  long long secs = std::strtoll(created_at.c_str(), &end, 10);
  if (end != nullptr && *end == '\0' && end != created_at.c_str()) {
    return format_utc(secs);
  }
  return format_utc(0);
}

std::vector<std::string> read_corpus_lines(const std::filesystem::path& f) {
  std::vector<std::string> lines;
  std::ifstream in(f, std::ios::binary);
  if (!in) {
    throw StageError("fetch", "unreadable corpus file: " + f.string());
  }
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

SearchPage search_with_retry(SearchSource& source, const Query& query,
                             int page_size, const std::string& token,
                             const RetryPolicy& retry, RateLimiter& limiter,
                             Clock& clock) {
  std::string last_error;
  int64_t delay = retry.base_delay_ms;
  for (int attempt = 1; attempt <= retry.max_attempts; ++attempt) {
    limiter.acquire();
    try {
      return source.search(query, page_size, token);
    } catch (const TransportError& e) {
      last_error = e.what();
      if (attempt < retry.max_attempts) {
        clock.sleep_ms(delay);
        delay = static_cast<int64_t>(delay * retry.multiplier);
      }
    }
  }
  throw TransportError(last_error);
}

}  // namespace

std::vector<Post> fetch_posts(const std::vector<QueryPlan>& plans,
                              const SourceConfig& cfg, SearchSource& source,
                              RateLimiter& limiter, Clock& clock,
                              FetchReport& report) {
  std::vector<Post> out;
  std::unordered_set<std::string> seen_content;
  std::unordered_set<std::string> seen_ids;

  for (const auto& plan : plans) {
    for (const auto& query : plan.queries) {
      int fetched = 0;
      std::string token;
      bool more = true;
      while (more && fetched < cfg.max_posts_per_query) {
        int want = std::min(cfg.page_size, cfg.max_posts_per_query - fetched);
        SearchPage page;
        try {
          page = search_with_retry(source, query, want, token, cfg.retry,
                                   limiter, clock);
          ++report.requests;
        } catch (const AuthError& e) {
          throw StageError("fetch", e.what());
        } catch (const TransportError& e) {
          report.failures.push_back({query.rendered, e.what()});
          break;
        }
        for (const auto& raw : page.items) {
          ++report.raw_items;
          ++fetched;
          Post p;
          p.text = normalize_text(raw.text);
          if (token_count(p.text) < static_cast<size_t>(cfg.min_tokens)) {
            ++report.dropped_short;
            continue;
          }
          std::string content = content_post_id(p.text);
          // A native id equal to the sentinel would alias generated claims.
          p.post_id =
              (raw.id.empty() || raw.id == kGeneratedPostId) ? content : raw.id;
          if (seen_content.count(content) > 0 ||
              seen_ids.count(p.post_id) > 0) {
            ++report.deduplicated;
            continue;
          }
          seen_content.insert(content);
          seen_ids.insert(p.post_id);
          p.source_id = source.source_id();
          if (!raw.url.empty()) p.url = raw.url;
          p.fetched_at = normalize_timestamp(raw.created_at);
          p.query_ref = query.rendered;
          p.topic_id = query.topic_id;
          out.push_back(std::move(p));
          if (fetched >= cfg.max_posts_per_query) break;
        }
        token = page.next_token;
        more = !token.empty();
      }
    }
  }
  return out;
}

LocalCorpusSource::LocalCorpusSource(std::filesystem::path corpus_dir,
                                     std::string source_id)
    : dir_(std::move(corpus_dir)), source_id_(std::move(source_id)) {}

void LocalCorpusSource::ensure_loaded() {
  if (loaded_) return;
  if (!std::filesystem::is_directory(dir_)) {
    throw StageError("fetch", "corpus directory not found: " + dir_.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir_)) {
    if (e.is_regular_file() && e.path().extension() == ".jsonl") {
      files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    size_t line_no = 0;
    for (const auto& line : read_corpus_lines(f)) {
      ++line_no;
      nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object() || !j.contains("text") ||
          !j["text"].is_string()) {
        throw StageError("fetch", "bad corpus record at " + f.string() + ":" +
                                      std::to_string(line_no));
      }
      RawPost r;
      r.text = j["text"].get<std::string>();
      if (j.contains("id") && j["id"].is_string()) {
        r.id = j["id"].get<std::string>();
      }
      if (j.contains("url") && j["url"].is_string()) {
        r.url = j["url"].get<std::string>();
      }
      if (j.contains("created_at")) {
        if (j["created_at"].is_string()) {
          r.created_at = j["created_at"].get<std::string>();
        } else if (j["created_at"].is_number_integer()) {
          r.created_at = std::to_string(j["created_at"].get<long long>());
        }
      }
      folded_text_.push_back(casefold(r.text));
      corpus_.push_back(std::move(r));
    }
  }
  loaded_ = true;
}

std::string LocalCorpusSource::fingerprint() const {
  std::map<std::string, std::string> entries;
  if (std::filesystem::is_directory(dir_)) {
    for (const auto& e : std::filesystem::directory_iterator(dir_)) {
      if (e.is_regular_file()) {
        entries[e.path().filename().string()] = file_digest(e.path());
      }
    }
  }
  std::string acc = "local-corpus:" + source_id_;
  for (const auto& [name, digest] : entries) acc += "\n" + name + " " + digest;
  return sha256_hex128(acc);
}

SearchPage LocalCorpusSource::search(const Query& query, int page_size,
                                     const std::string& page_token) {
  note_call();
  ensure_loaded();

  std::array<std::string, 3> needles = {casefold(query.heavy_term),
                                        casefold(query.lesser_terms[0]),
                                        casefold(query.lesser_terms[1])};
  size_t start = 0;
  if (!page_token.empty()) start = std::stoull(page_token);

  SearchPage page;
  size_t i = start;
  for (; i < corpus_.size() &&
         static_cast<int>(page.items.size()) < page_size;
       ++i) {
    const std::string& hay = folded_text_[i];
    bool all = true;
    for (const auto& n : needles) {
      if (hay.find(n) == std::string::npos) {
        all = false;
        break;
      }
    }
    if (all) page.items.push_back(corpus_[i]);
  }
  if (i < corpus_.size()) page.next_token = std::to_string(i);
  return page;
}

HttpSearchSource::HttpSearchSource(std::string base_url, std::string path,
                                   std::string source_id,
                                   std::string api_key_env)
    : base_url_(std::move(base_url)),
      path_(std::move(path)),
      source_id_(std::move(source_id)) {
  if (const char* key = std::getenv(api_key_env.c_str())) {
    api_key_ = key;
  }
}

std::string HttpSearchSource::fingerprint() const {
  return sha256_hex128("http-source:" + base_url_ + path_ + ":" + source_id_);
}

SearchPage HttpSearchSource::search(const Query& query, int page_size,
                                    const std::string& page_token) {
  note_call();
  httplib::Client cli(base_url_);
  cli.set_connection_timeout(30);
  cli.set_read_timeout(60);
  httplib::Params params{{"q", query.rendered},
                         {"page_size", std::to_string(page_size)}};
  if (!page_token.empty()) params.insert({"page_token", page_token});
  httplib::Headers headers;
  if (!api_key_.empty()) {
    headers.insert({"Authorization", "Bearer " + api_key_});
  }
  auto res = cli.Get(path_, params, headers);
  if (!res) {
    throw TransportError("source request failed: " +
                         httplib::to_string(res.error()));
  }
  if (res->status == 401 || res->status == 403) {
    throw AuthError("source rejected credentials (status " +
                    std::to_string(res->status) + ")");
  }
  if (res->status != 200) {
    throw TransportError("source returned status " +
                         std::to_string(res->status));
  }
  nlohmann::json j = nlohmann::json::parse(res->body, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("items") ||
      !j["items"].is_array()) {
    throw TransportError("source response is not {items: [...]}");
  }
  SearchPage page;
  for (const auto& item : j["items"]) {
    if (!item.is_object() || !item.contains("text") ||
        !item["text"].is_string()) {
      continue;
    }
    RawPost r;
    r.text = item["text"].get<std::string>();
    if (item.contains("id") && item["id"].is_string()) {
      r.id = item["id"].get<std::string>();
    }
    if (item.contains("url") && item["url"].is_string()) {
      r.url = item["url"].get<std::string>();
    }
    if (item.contains("created_at") && item["created_at"].is_string()) {
      r.created_at = item["created_at"].get<std::string>();
    }
    page.items.push_back(std::move(r));
  }
  if (j.contains("next_page_token") && j["next_page_token"].is_string()) {
    page.next_token = j["next_page_token"].get<std::string>();
  }
  return page;
}

}  // namespace claimforge
