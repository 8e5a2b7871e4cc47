#include "claimforge/prompts.hpp"

#include <sstream>

#include "claimforge/digest.hpp"

namespace claimforge {

namespace {

constexpr const char* kKeywordsSystem =
    "You generate search keywords for social media research. "
    "Respond with a single JSON object and nothing else.";

constexpr const char* kKeywordsUser =
    "Topic: {title}\n"
    "{description}"
    "Produce two groups of topical keywords for searching social media.\n"
    "- \"heavy\": {heavy_n} keywords strongly indicative of the topic; a "
    "post containing one is very likely about the topic.\n"
    "- \"lesser\": {lesser_n} keywords associated with the topic but also "
    "used in other contexts.\n"
    "Keywords must be lowercase, distinct, and no keyword may appear in "
    "both groups.\n"
    "{refill}"
    "Answer with exactly: {\"heavy\": [...], \"lesser\": [...]}";

constexpr const char* kClaimExtractSystem =
    "You extract checkworthy factual claims from social media posts. "
    "Respond with a single JSON object and nothing else.";

constexpr const char* kClaimExtractUser =
    "Post:\n{post}\n\n"
    "List every checkworthy factual claim the post makes, each as one "
    "self-contained declarative sentence. Return an empty list if the post "
    "makes no checkworthy claim.\n"
    "Answer with exactly: {\"claims\": [\"...\"]}";

constexpr const char* kTopicLabelSystem =
    "You assign topic labels to social media posts. "
    "Respond with a single JSON object and nothing else.";

constexpr const char* kTopicLabelUserCandidates =
    "Post:\n{post}\n\n"
    "Candidate topics:\n{candidates}\n"
    "Which of the candidate topics does the post discuss? Return zero or "
    "more labels.{freeform}\n"
    "Answer with exactly: {\"labels\": [\"...\"]}";

constexpr const char* kTopicLabelUserFree =
    "Post:\n{post}\n\n"
    "Name the misinformation-relevant topics the post discusses, as short "
    "labels. Return zero or more labels.\n"
    "Answer with exactly: {\"labels\": [\"...\"]}";

constexpr const char* kRelationSystem =
    "You write claims that relate to a given claim. Judge only how the "
    "claims relate to each other, never whether either is true. "
    "Respond with a single JSON object and nothing else.";

constexpr const char* kRelationUserSupport =
    "Source claim: {claim}\n\n"
    "Write one new claim that would support the source claim: if your claim "
    "were accepted, the source claim would become more credible. Do not "
    "restate the source claim.\n"
    "Answer with exactly: {\"target\": \"...\", \"relation\": \"Support\"}";

constexpr const char* kRelationUserUndermine =
    "Source claim: {claim}\n\n"
    "Write one new claim that would undermine the source claim: if your "
    "claim were accepted, the source claim would become less credible. Do "
    "not restate the source claim.\n"
    "Answer with exactly: {\"target\": \"...\", \"relation\": \"Undermine\"}";

std::string replace_all(std::string text, const std::string& what,
                        const std::string& with) {
  size_t pos = 0;
  while ((pos = text.find(what, pos)) != std::string::npos) {
    text.replace(pos, what.size(), with);
    pos += with.size();
  }
  return text;
}

}  // namespace

RenderedPrompt render_keywords_prompt(const Topic& topic, int heavy_n,
                                      int lesser_n, int attempt) {
  std::string user = kKeywordsUser;
  user = replace_all(user, "{title}", topic.title);
  user = replace_all(user, "{description}",
                     topic.description.empty()
                         ? ""
                         : "Context: " + topic.description + "\n");
  user = replace_all(user, "{heavy_n}", std::to_string(heavy_n));
  user = replace_all(user, "{lesser_n}", std::to_string(lesser_n));
  user = replace_all(
      user, "{refill}",
      attempt <= 1 ? ""
                   : "This is request " + std::to_string(attempt) +
                         " for this topic; provide keywords distinct from "
                         "any earlier answer.\n");
  return {kKeywordsSystem, user};
}

RenderedPrompt render_claim_extract_prompt(const std::string& post_text) {
  return {kClaimExtractSystem,
          replace_all(kClaimExtractUser, "{post}", post_text)};
}

RenderedPrompt render_topic_label_prompt(
    const std::string& post_text, const std::vector<std::string>& candidates,
    bool allow_freeform) {
  if (candidates.empty()) {
    return {kTopicLabelSystem,
            replace_all(kTopicLabelUserFree, "{post}", post_text)};
  }
  std::ostringstream list;
  for (const auto& c : candidates) list << "- " << c << "\n";
  std::string user = kTopicLabelUserCandidates;
  user = replace_all(user, "{post}", post_text);
  user = replace_all(user, "{candidates}", list.str());
  user = replace_all(user, "{freeform}",
                     allow_freeform
                         ? " You may add a label outside the candidates if "
                           "none fits."
                         : " Use candidate labels only.");
  return {kTopicLabelSystem, user};
}

RenderedPrompt render_relation_prompt(const std::string& source_claim_text,
                                      Relation want) {
  const char* tmpl = want == Relation::Support ? kRelationUserSupport
                                               : kRelationUserUndermine;
  return {kRelationSystem, replace_all(tmpl, "{claim}", source_claim_text)};
}

LlmRequest make_request(LlmJob job, const RenderedPrompt& p,
                        const std::string& model, double temperature,
                        int max_output_tokens) {
  LlmRequest req;
  req.job = job;
  req.system_text = p.system_text;
  req.user_text = p.user_text;
  req.model = model;
  req.temperature = temperature;
  req.max_output_tokens = max_output_tokens;
  return req;
}

std::string prompt_templates_digest() {
  return sha256_hex128(frame_fields(
      {kPromptVersion, kKeywordsSystem, kKeywordsUser, kClaimExtractSystem,
       kClaimExtractUser, kTopicLabelSystem, kTopicLabelUserCandidates,
       kTopicLabelUserFree, kRelationSystem, kRelationUserSupport,
       kRelationUserUndermine}));
}

}  // namespace claimforge
