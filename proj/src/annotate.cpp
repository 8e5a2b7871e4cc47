#include "claimforge/annotate.hpp"

#include <optional>
#include <set>
#include <unordered_map>

#include "claimforge/digest.hpp"
#include "claimforge/errors.hpp"
#include "claimforge/llm_parse.hpp"
#include "claimforge/prompts.hpp"
#include "claimforge/records.hpp"
#include "claimforge/text.hpp"

namespace claimforge {

namespace {

// complete + parse; nullopt on any failure (transport budget exhausted or
// unparseable output). Per design, parse failures are dropped, not retried.
std::optional<ParsedPayload> run_job(LlmJob job, const RenderedPrompt& prompt,
                                     ChatProvider& llm,
                                     const AnnotateOptions& opt,
                                     Clock& clock) {
  auto req = make_request(job, prompt, llm.model(), opt.temperature,
                          opt.max_output_tokens);
  std::string raw;
  try {
    raw = complete(req, llm, opt.retry, clock).raw_text;
  } catch (const StageError&) {
    return std::nullopt;
  }
  ParseResult parsed = parse_structured(raw, job);
  if (!parsed.ok()) return std::nullopt;
  return std::move(parsed.payload);
}

void check_failure_rate(const char* stage, long failed, long total,
                        double limit) {
  if (total > 0 && static_cast<double>(failed) / total > limit) {
    throw StageError(stage, std::to_string(failed) + " of " +
                                std::to_string(total) +
                                " items failed, above the abort threshold");
  }
}

}  // namespace

std::vector<ClaimTuple> extract_claims(const std::vector<Post>& posts,
                                       ChatProvider& llm,
                                       const AnnotateOptions& opt,
                                       Clock& clock, AnnotateStats& stats) {
  if (posts.empty()) {
    throw ValidationError("extract_claims: no posts");
  }
  std::vector<ClaimTuple> out;
  std::set<std::string> seen_ids;
  for (const auto& post : posts) {
    auto payload = run_job(LlmJob::ClaimExtract,
                           render_claim_extract_prompt(post.text), llm, opt,
                           clock);
    if (!payload) {
      ++stats.posts_failed;
      ++stats.posts_processed;
      continue;
    }
    ++stats.posts_processed;
    for (const auto& raw_claim :
         std::get<ClaimsPayload>(*payload).claims) {
      std::string text = normalize_text(raw_claim);
      if (text.empty()) continue;
      if (truncate_sentence(text, opt.max_claim_chars)) {
        ++stats.claims_truncated;
        if (text.empty()) continue;
      }
      ClaimTuple c;
      c.post_id = post.post_id;
      c.claim_text = text;
      c.claim_id = claim_id_of(c.post_id, c.claim_text);
      if (seen_ids.insert(c.claim_id).second) {
        ++stats.claims_extracted;
        out.push_back(std::move(c));
      }
    }
  }
  check_failure_rate("annotate", stats.posts_failed, stats.posts_processed,
                     opt.abort_failure_rate);
  canonical_sort(out);
  return out;
}

std::vector<TopicTuple> label_topics(
    const std::vector<Post>& posts,
    const std::vector<std::string>& candidate_labels, bool allow_freeform,
    ChatProvider& llm, const AnnotateOptions& opt, Clock& clock,
    AnnotateStats& stats) {
  if (posts.empty()) {
    throw ValidationError("label_topics: no posts");
  }
  // Candidate lookup is casefolded; the canonical candidate string wins.
  std::unordered_map<std::string, std::string> canonical;
  for (const auto& c : candidate_labels) {
    canonical[casefold(normalize_text(c))] = normalize_text(c);
  }

  std::vector<TopicTuple> out;
  std::set<std::pair<std::string, std::string>> seen;
  long failed = 0;
  for (const auto& post : posts) {
    auto payload =
        run_job(LlmJob::TopicLabel,
                render_topic_label_prompt(post.text, candidate_labels,
                                          allow_freeform),
                llm, opt, clock);
    if (!payload) {
      ++failed;
      continue;
    }
    for (const auto& raw_label : std::get<LabelsPayload>(*payload).labels) {
      std::string label = normalize_text(raw_label);
      if (label.empty()) continue;
      if (!candidate_labels.empty()) {
        auto it = canonical.find(casefold(label));
        if (it != canonical.end()) {
          label = it->second;
        } else if (!allow_freeform) {
          ++stats.labels_rejected;
          continue;
        }
      }
      if (seen.insert({post.post_id, label}).second) {
        ++stats.labels_assigned;
        out.push_back({post.post_id, label});
      }
    }
  }
  check_failure_rate("annotate", failed, static_cast<long>(posts.size()),
                     opt.abort_failure_rate);
  canonical_sort(out);
  return out;
}

RelationGenResult generate_relations(const std::vector<ClaimTuple>& claims,
                                     ChatProvider& llm,
                                     const AnnotateOptions& opt, Clock& clock,
                                     AnnotateStats& stats) {
  if (claims.empty()) {
    throw ValidationError("generate_relations: no claims");
  }
  RelationGenResult result;
  std::set<std::string> target_ids;
  std::set<std::array<std::string, 3>> seen_relations;

  for (const auto& source : claims) {
    for (Relation want : {Relation::Support, Relation::Undermine}) {
      ++stats.relation_calls;
      auto payload =
          run_job(LlmJob::RelationGen,
                  render_relation_prompt(source.claim_text, want), llm, opt,
                  clock);
      if (!payload) {
        ++stats.relation_calls_failed;
        continue;
      }
      const auto& rel = std::get<RelationPayload>(*payload);
      if (rel.relation != want) {
        ++stats.relation_steer_mismatch;
        continue;
      }
      std::string target_text = normalize_text(rel.target_text);
      if (target_text.empty()) {
        ++stats.relation_calls_failed;
        continue;
      }
      if (truncate_sentence(target_text, opt.max_claim_chars)) {
        ++stats.claims_truncated;
        if (target_text.empty()) continue;
      }
      if (target_text == source.claim_text) {
        ++stats.relation_self_dropped;
        continue;
      }
      std::string target_id = claim_id_of(kGeneratedPostId, target_text);
      if (target_ids.insert(target_id).second) {
        ++stats.targets_registered;
        result.targets.push_back({target_id, kGeneratedPostId, target_text});
      }
      if (seen_relations
              .insert({source.claim_id, target_id,
                       std::string(to_string(want))})
              .second) {
        result.relations.push_back({source.claim_id, target_id, want});
      }
    }
  }
  check_failure_rate("annotate", stats.relation_calls_failed,
                     stats.relation_calls, opt.abort_failure_rate);
  canonical_sort(result.relations);
  canonical_sort(result.targets);
  return result;
}

}  // namespace claimforge
