#include "claimforge/keywords.hpp"

#include <algorithm>
#include <set>

#include "claimforge/errors.hpp"
#include "claimforge/llm_parse.hpp"
#include "claimforge/prompts.hpp"
#include "claimforge/rng.hpp"
#include "claimforge/text.hpp"
#include "claimforge/validate.hpp"

namespace claimforge {

namespace {

// Normalized, casefolded, deduplicated append preserving first-seen order.
void absorb(std::vector<std::string>& list, std::set<std::string>& seen,
            const std::vector<std::string>& raw) {
  for (const auto& term : raw) {
    std::string t = casefold(normalize_text(term));
    if (t.empty()) continue;
    if (seen.insert(t).second) list.push_back(t);
  }
}

}  // namespace

KeywordSet generate_keywords(const Topic& topic, int heavy_n, int lesser_n,
                             ChatProvider& llm, const RetryPolicy& retry,
                             Clock& clock, int refill_attempts) {
  if (heavy_n < 1 || lesser_n < 2) {
    throw ValidationError("generate_keywords: heavy_n must be >= 1 and "
                          "lesser_n >= 2");
  }
  KeywordSet ks;
  ks.topic_id = topic.topic_id;
  std::set<std::string> heavy_seen;
  std::set<std::string> lesser_seen;
  std::string last_failure;

  for (int attempt = 1; attempt <= refill_attempts; ++attempt) {
    auto prompt = render_keywords_prompt(topic, heavy_n, lesser_n, attempt);
    auto req = make_request(LlmJob::Keywords, prompt, llm.model(),
                            /*temperature=*/0.0, /*max_output_tokens=*/1024);
    LlmResponse resp = complete(req, llm, retry, clock);
    ParseResult parsed = parse_structured(resp.raw_text, LlmJob::Keywords);
    if (!parsed.ok()) {
      last_failure = parsed.failure->message;
      if (attempt == refill_attempts) {
        throw StageError("keywords",
                         "unparseable keyword response: " + last_failure,
                         resp.raw_text);
      }
      continue;
    }
    const auto& payload = std::get<KeywordsPayload>(*parsed.payload);
    absorb(ks.heavy, heavy_seen, payload.heavy);
    absorb(ks.lesser, lesser_seen, payload.lesser);

    // Disjointness resolves in favor of heavy.
    std::erase_if(ks.lesser, [&](const std::string& t) {
      return heavy_seen.count(t) > 0;
    });
    lesser_seen.clear();
    lesser_seen.insert(ks.lesser.begin(), ks.lesser.end());

    if (static_cast<int>(ks.heavy.size()) >= heavy_n &&
        static_cast<int>(ks.lesser.size()) >= lesser_n) {
      break;
    }
  }

  if (static_cast<int>(ks.heavy.size()) > heavy_n) ks.heavy.resize(heavy_n);
  if (static_cast<int>(ks.lesser.size()) > lesser_n) ks.lesser.resize(lesser_n);

  auto violations = validate_record(ks);
  if (!violations.empty()) {
    throw ValidationError(
        "provider produced no usable keyword set for topic " + topic.topic_id,
        violations);
  }
  return ks;
}

std::vector<Query> enumerate_queries(const KeywordSet& ks) {
  // Unordered lesser pairs in canonical form, sorted lexicographically.
  std::vector<std::array<std::string, 2>> pairs;
  for (size_t i = 0; i < ks.lesser.size(); ++i) {
    for (size_t j = i + 1; j < ks.lesser.size(); ++j) {
      const std::string& a = ks.lesser[i];
      const std::string& b = ks.lesser[j];
      pairs.push_back(a < b ? std::array<std::string, 2>{a, b}
                            : std::array<std::string, 2>{b, a});
    }
  }
  std::sort(pairs.begin(), pairs.end());

  std::vector<Query> out;
  out.reserve(ks.heavy.size() * pairs.size());
  for (const auto& h : ks.heavy) {
    for (const auto& p : pairs) {
      Query q;
      q.topic_id = ks.topic_id;
      q.heavy_term = h;
      q.lesser_terms = p;
      q.rendered = h + " AND " + p[0] + " AND " + p[1];
      out.push_back(std::move(q));
    }
  }
  return out;
}

QueryPlan sample_queries(const KeywordSet& ks, int n, uint64_t seed) {
  if (n < 1) {
    throw ValidationError("sample_queries: n must be >= 1");
  }
  std::vector<Query> all = enumerate_queries(ks);

  QueryPlan plan;
  plan.topic_id = ks.topic_id;
  plan.requested_count = n;
  plan.seed = seed;

  if (static_cast<size_t>(n) >= all.size()) {
    plan.truncated = static_cast<size_t>(n) > all.size();
    plan.queries = std::move(all);
    return plan;
  }

  Rng rng(seed);
  for (size_t idx :
       sample_without_replacement(all.size(), static_cast<size_t>(n), rng)) {
    plan.queries.push_back(all[idx]);
  }
  return plan;
}

}  // namespace claimforge
