#pragma once

#include <string>
#include <vector>

#include "claimforge/llm.hpp"
#include "claimforge/types.hpp"

namespace claimforge {

// Bump when any template text changes; recorded in the manifest so label
// provenance survives template evolution.
inline constexpr const char* kPromptVersion = "v1";

struct RenderedPrompt {
  std::string system_text;
  std::string user_text;
};

// All four renderers are pure functions of their inputs and the template
// version. `attempt` > 1 asks for additional distinct keywords, so refill
// calls produce distinct prompts (and hence distinct mock fixture keys).
RenderedPrompt render_keywords_prompt(const Topic& topic, int heavy_n,
                                      int lesser_n, int attempt = 1);
RenderedPrompt render_claim_extract_prompt(const std::string& post_text);
RenderedPrompt render_topic_label_prompt(
    const std::string& post_text, const std::vector<std::string>& candidates,
    bool allow_freeform);
RenderedPrompt render_relation_prompt(const std::string& source_claim_text,
                                      Relation want);

LlmRequest make_request(LlmJob job, const RenderedPrompt& p,
                        const std::string& model, double temperature,
                        int max_output_tokens);

// Digest over every template string plus kPromptVersion.
std::string prompt_templates_digest();

}  // namespace claimforge
