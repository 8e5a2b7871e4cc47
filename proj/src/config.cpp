#include "claimforge/config.hpp"

#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "claimforge/errors.hpp"
#include "claimforge/text.hpp"

namespace claimforge {

namespace {

class Reader {
 public:
  explicit Reader(std::vector<std::string>& violations)
      : violations_(violations) {}

  template <typename T>
  void get(const ordered_json& j, const char* key, T& out) {
    auto it = j.find(key);
    if (it == j.end()) return;
    try {
      out = it->get<T>();
    } catch (...) {
      violations_.push_back(std::string("bad type for \"") + key + "\"");
    }
  }

  void note(const std::string& msg) { violations_.push_back(msg); }

 private:
  std::vector<std::string>& violations_;
};

void read_retry(Reader& r, const ordered_json& j, RetryPolicy& p) {
  r.get(j, "max_attempts", p.max_attempts);
  r.get(j, "base_delay_ms", p.base_delay_ms);
  r.get(j, "multiplier", p.multiplier);
}

}  // namespace

ConfigLoad validate_config(const ordered_json& doc) {
  ConfigLoad out;
  Reader r(out.violations);
  RunConfig& c = out.config;

  if (!doc.is_object()) {
    out.violations.push_back("config must be a JSON object");
    return out;
  }

  if (doc.contains("topics")) {
    if (!doc["topics"].is_array()) {
      r.note("\"topics\" must be an array");
    } else {
      for (const auto& tj : doc["topics"]) {
        Topic t;
        if (tj.is_string()) {
          t.title = tj.get<std::string>();
        } else if (tj.is_object()) {
          r.get(tj, "title", t.title);
          r.get(tj, "topic_id", t.topic_id);
          r.get(tj, "description", t.description);
        } else {
          r.note("topic entries must be strings or objects");
          continue;
        }
        if (t.topic_id.empty()) t.topic_id = slugify(t.title);
        c.topics.push_back(std::move(t));
      }
    }
  }

  r.get(doc, "seed", c.seed);
  r.get(doc, "posts_file", c.external_posts);
  if (doc.contains("keywords")) {
    const auto& k = doc["keywords"];
    r.get(k, "heavy_n", c.heavy_n);
    r.get(k, "lesser_n", c.lesser_n);
    r.get(k, "refill_attempts", c.keyword_refill_attempts);
  }
  if (doc.contains("queries")) {
    r.get(doc["queries"], "count", c.query_count);
  }
  if (doc.contains("llm")) {
    const auto& l = doc["llm"];
    r.get(l, "kind", c.llm.kind);
    r.get(l, "mock_dir", c.llm.mock_dir);
    r.get(l, "endpoint", c.llm.endpoint);
    r.get(l, "path", c.llm.path);
    r.get(l, "model", c.llm.model);
    r.get(l, "temperature", c.llm.temperature);
    r.get(l, "max_output_tokens", c.llm.max_output_tokens);
    if (l.contains("retry")) read_retry(r, l["retry"], c.llm.retry);
  }
  if (doc.contains("embedding")) {
    const auto& e = doc["embedding"];
    r.get(e, "kind", c.embedding.kind);
    r.get(e, "dim", c.embedding.dim);
    r.get(e, "seed", c.embedding.seed);
    r.get(e, "endpoint", c.embedding.endpoint);
    r.get(e, "path", c.embedding.path);
    r.get(e, "model", c.embedding.model);
    if (e.contains("retry")) read_retry(r, e["retry"], c.embedding.retry);
  }
  if (doc.contains("source")) {
    const auto& s = doc["source"];
    r.get(s, "kind", c.source.kind);
    r.get(s, "corpus_dir", c.source.corpus_dir);
    r.get(s, "endpoint", c.source.endpoint);
    r.get(s, "path", c.source.path);
    r.get(s, "source_id", c.source.cfg.source_id);
    r.get(s, "page_size", c.source.cfg.page_size);
    r.get(s, "posts_per_query", c.source.cfg.max_posts_per_query);
    r.get(s, "requests_per_minute", c.source.cfg.requests_per_minute);
    r.get(s, "min_tokens", c.source.cfg.min_tokens);
    if (s.contains("retry")) read_retry(r, s["retry"], c.source.cfg.retry);
  }
  if (doc.contains("annotate")) {
    const auto& a = doc["annotate"];
    r.get(a, "candidate_labels", c.candidate_labels);
    r.get(a, "allow_freeform", c.allow_freeform);
    r.get(a, "abort_failure_rate", c.abort_failure_rate);
    r.get(a, "max_claim_chars", c.max_claim_chars);
  }
  if (doc.contains("cluster")) {
    r.get(doc["cluster"], "tau", c.tau);
  }
  if (doc.contains("split")) {
    const auto& s = doc["split"];
    r.get(s, "train", c.proportions.p[0]);
    r.get(s, "dev", c.proportions.p[1]);
    r.get(s, "test", c.proportions.p[2]);
  }
  if (doc.contains("eval")) {
    r.get(doc["eval"], "k", c.eval_k);
  }
  r.get(doc, "out_dir", c.out_dir);
  r.get(doc, "work_dir", c.work_dir);

  // Cross-field checks; every violation is reported.
  if (c.topics.empty() && c.external_posts.empty()) {
    r.note("at least one topic is required");
  }
  std::set<std::string> topic_ids;
  for (const auto& t : c.topics) {
    if (t.topic_id.empty()) r.note("topic with empty id");
    if (normalize_text(t.title).empty()) {
      r.note("topic with empty title: " + t.topic_id);
    }
    if (!topic_ids.insert(t.topic_id).second) {
      r.note("duplicate topic_id: " + t.topic_id);
    }
  }
  if (c.heavy_n < 1) r.note("keywords.heavy_n must be >= 1");
  if (c.lesser_n < 2) r.note("keywords.lesser_n must be >= 2");
  if (c.query_count < 1) r.note("queries.count must be >= 1");
  if (c.keyword_refill_attempts < 1) {
    r.note("keywords.refill_attempts must be >= 1");
  }
  if (!(c.tau > 0.0 && c.tau <= 1.0)) r.note("tau out of (0,1]");
  double sum = c.proportions.p[0] + c.proportions.p[1] + c.proportions.p[2];
  if (std::abs(sum - 1.0) > 1e-9) r.note("proportions must sum to 1");
  for (double p : c.proportions.p) {
    if (p < 0) r.note("split proportion is negative");
  }
  if (c.eval_k < 1) r.note("eval.k must be >= 1");
  if (c.source.cfg.page_size < 1) r.note("source.page_size must be >= 1");
  if (c.source.cfg.max_posts_per_query < 1) {
    r.note("source.posts_per_query must be >= 1");
  }
  if (c.source.cfg.requests_per_minute < 1) {
    r.note("source.requests_per_minute must be >= 1");
  }
  if (c.source.cfg.retry.max_attempts < 1 ||
      c.llm.retry.max_attempts < 1 || c.embedding.retry.max_attempts < 1) {
    r.note("retry.max_attempts must be >= 1");
  }
  if (c.abort_failure_rate < 0 || c.abort_failure_rate > 1) {
    r.note("annotate.abort_failure_rate must be in [0,1]");
  }
  if (c.embedding.dim < 1) r.note("embedding.dim must be >= 1");
  // Provider kinds are validated here; whether a kind's own inputs (mock
  // fixture dir, endpoints) are present is checked when the provider is
  // built, so a minimal config stays valid.
  if (c.llm.kind != "mock" && c.llm.kind != "http") {
    r.note("llm.kind must be \"mock\" or \"http\"");
  }
  if (c.embedding.kind != "hash" && c.embedding.kind != "http") {
    r.note("embedding.kind must be \"hash\" or \"http\"");
  }
  if (c.source.kind != "local" && c.source.kind != "http") {
    r.note("source.kind must be \"local\" or \"http\"");
  }
  if (c.embedding.model.empty() && c.embedding.kind == "hash") {
    c.embedding.model = "hash-projection-d" + std::to_string(c.embedding.dim) +
                        "-s" + std::to_string(c.embedding.seed);
  }
  return out;
}

ConfigLoad load_config_file(const std::filesystem::path& path) {
  return validate_config(read_json_file(path));
}

ordered_json to_json(const RunConfig& c) {
  ordered_json topics = ordered_json::array();
  for (const auto& t : c.topics) topics.push_back(to_json(t));
  return ordered_json{
      {"topics", topics},
      {"posts_file", c.external_posts},
      {"seed", c.seed},
      {"keywords",
       {{"heavy_n", c.heavy_n},
        {"lesser_n", c.lesser_n},
        {"refill_attempts", c.keyword_refill_attempts}}},
      {"queries", {{"count", c.query_count}}},
      {"llm",
       {{"kind", c.llm.kind},
        {"mock_dir", c.llm.mock_dir},
        {"endpoint", c.llm.endpoint},
        {"path", c.llm.path},
        {"model", c.llm.model},
        {"temperature", c.llm.temperature},
        {"max_output_tokens", c.llm.max_output_tokens}}},
      {"embedding",
       {{"kind", c.embedding.kind},
        {"dim", c.embedding.dim},
        {"seed", c.embedding.seed},
        {"endpoint", c.embedding.endpoint},
        {"path", c.embedding.path},
        {"model", c.embedding.model}}},
      {"source",
       {{"kind", c.source.kind},
        {"corpus_dir", c.source.corpus_dir},
        {"endpoint", c.source.endpoint},
        {"path", c.source.path},
        {"source_id", c.source.cfg.source_id},
        {"page_size", c.source.cfg.page_size},
        {"posts_per_query", c.source.cfg.max_posts_per_query},
        {"requests_per_minute", c.source.cfg.requests_per_minute},
        {"min_tokens", c.source.cfg.min_tokens}}},
      {"annotate",
       {{"candidate_labels", c.candidate_labels},
        {"allow_freeform", c.allow_freeform},
        {"abort_failure_rate", c.abort_failure_rate},
        {"max_claim_chars", c.max_claim_chars}}},
      {"cluster", {{"tau", c.tau}}},
      {"split",
       {{"train", c.proportions.p[0]},
        {"dev", c.proportions.p[1]},
        {"test", c.proportions.p[2]}}},
      {"eval", {{"k", c.eval_k}}},
      {"out_dir", c.out_dir},
      {"work_dir", c.work_dir}};
}

}  // namespace claimforge
