#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "claimforge/llm.hpp"
#include "claimforge/types.hpp"

namespace claimforge {

struct KeywordsPayload {
  std::vector<std::string> heavy;
  std::vector<std::string> lesser;
};

struct ClaimsPayload {
  std::vector<std::string> claims;
};

struct LabelsPayload {
  std::vector<std::string> labels;
};

struct RelationPayload {
  std::string target_text;
  Relation relation;
};

enum class ParseFailStage { Json, Repair, Schema };

const char* to_string(ParseFailStage s);

struct ParseFailure {
  ParseFailStage stage;
  std::string message;
  std::string raw;  // verbatim provider output, for diagnostics
};

using ParsedPayload =
    std::variant<KeywordsPayload, ClaimsPayload, LabelsPayload,
                 RelationPayload>;

struct ParseResult {
  std::optional<ParsedPayload> payload;
  std::optional<ParseFailure> failure;

  bool ok() const { return payload.has_value(); }
};

// Strict JSON first; on failure one repair pass (strip code fences, trim to
// the outermost '{'..'}'), then schema validation for the job kind. Never
// throws, whatever the input bytes.
ParseResult parse_structured(const std::string& raw, LlmJob kind);

}  // namespace claimforge
