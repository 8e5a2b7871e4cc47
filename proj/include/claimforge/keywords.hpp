#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "claimforge/clock.hpp"
#include "claimforge/llm.hpp"
#include "claimforge/types.hpp"

namespace claimforge {

struct QueryPlan {
  std::string topic_id;
  int requested_count = 0;
  uint64_t seed = 0;
  bool truncated = false;  // requested more than the enumeration holds
  std::vector<Query> queries;
};

// Asks the LLM for the two keyword groups, re-prompting up to
// `refill_attempts` times when it returns too few distinct terms. Terms are
// normalized and casefolded; a term appearing in both groups is kept in
// heavy and dropped from lesser. Throws StageError on provider failure,
// ValidationError if no valid KeywordSet can be formed.
KeywordSet generate_keywords(const Topic& topic, int heavy_n, int lesser_n,
                             ChatProvider& llm, const RetryPolicy& retry,
                             Clock& clock, int refill_attempts = 3);

// Full Cartesian enumeration: every (heavy term, unordered lesser pair)
// exactly once. Canonical order: heavy list order major, lesser pair
// lexicographic minor. Size is always |heavy| * C(|lesser|, 2).
std::vector<Query> enumerate_queries(const KeywordSet& ks);

// n distinct queries drawn uniformly without replacement from the full
// enumeration, deterministic under seed. If n exceeds the enumeration size
// the whole enumeration is returned and `truncated` is set.
QueryPlan sample_queries(const KeywordSet& ks, int n, uint64_t seed);

}  // namespace claimforge
