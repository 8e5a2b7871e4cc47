#pragma once

#include <string>
#include <vector>

#include "claimforge/clock.hpp"
#include "claimforge/llm.hpp"
#include "claimforge/types.hpp"

namespace claimforge {

struct AnnotateOptions {
  RetryPolicy retry;
  double temperature = 0.0;
  int max_output_tokens = 1024;
  // Abort a job when more than this fraction of its items fail.
  double abort_failure_rate = 0.5;
  size_t max_claim_chars = 400;
};

struct AnnotateStats {
  long posts_processed = 0;
  long posts_failed = 0;
  long claims_extracted = 0;
  long claims_truncated = 0;
  long labels_assigned = 0;
  long labels_rejected = 0;  // outside candidates, free-form disallowed
  long relation_calls = 0;
  long relation_calls_failed = 0;
  long relation_steer_mismatch = 0;
  long relation_self_dropped = 0;
  long targets_registered = 0;
};

// Claim extraction: zero or more normalized claims per post, ids assigned
// via claim_id_of. Posts whose LLM call ultimately fails are skipped and
// counted; the stage aborts when the failure rate exceeds the threshold.
// Output is canonically sorted, so it is invariant under input permutation.
std::vector<ClaimTuple> extract_claims(const std::vector<Post>& posts,
                                       ChatProvider& llm,
                                       const AnnotateOptions& opt,
                                       Clock& clock, AnnotateStats& stats);

// Topic labeling. With candidates, labels outside the list are kept only
// when allow_freeform; without candidates everything runs free-form.
std::vector<TopicTuple> label_topics(
    const std::vector<Post>& posts,
    const std::vector<std::string>& candidate_labels, bool allow_freeform,
    ChatProvider& llm, const AnnotateOptions& opt, Clock& clock,
    AnnotateStats& stats);

struct RelationGenResult {
  std::vector<RelationTuple> relations;
  // Target claims authored by the LLM, registered with the "generated"
  // sentinel post id so relation integrity holds uniformly.
  std::vector<ClaimTuple> targets;
};

// Steered relation generation: for each source claim one Support target
// and one Undermine target are requested, giving a label-balanced set by
// construction. Targets whose text equals the source after normalization
// are dropped; responses whose label differs from the requested one are
// rejected and counted.
RelationGenResult generate_relations(const std::vector<ClaimTuple>& claims,
                                     ChatProvider& llm,
                                     const AnnotateOptions& opt, Clock& clock,
                                     AnnotateStats& stats);

}  // namespace claimforge
