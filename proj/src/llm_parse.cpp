#include "claimforge/llm_parse.hpp"

#include <nlohmann/json.hpp>

namespace claimforge {

using json = nlohmann::json;

const char* to_string(ParseFailStage s) {
  switch (s) {
    case ParseFailStage::Json:
      return "json";
    case ParseFailStage::Repair:
      return "repair";
    case ParseFailStage::Schema:
      return "schema";
  }
  return "unknown";
}

namespace {

ParseResult fail(ParseFailStage stage, std::string message,
                 const std::string& raw) {
  ParseResult r;
  r.failure = ParseFailure{stage, std::move(message), raw};
  return r;
}

std::string strip_for_repair(const std::string& raw) {
  std::string s = raw;
  // Drop markdown code fences if the payload is wrapped in them.
  size_t first_fence = s.find("```");
  if (first_fence != std::string::npos) {
    size_t line_end = s.find('\n', first_fence);
    size_t close = line_end == std::string::npos
                       ? std::string::npos
                       : s.find("```", line_end);
    if (line_end != std::string::npos && close != std::string::npos) {
      s = s.substr(line_end + 1, close - line_end - 1);
    }
  }
  size_t open = s.find('{');
  size_t close = s.rfind('}');
  if (open == std::string::npos || close == std::string::npos ||
      close < open) {
    return "";
  }
  return s.substr(open, close - open + 1);
}

bool get_string_array(const json& j, const char* field,
                      std::vector<std::string>& out, std::string& err) {
  auto it = j.find(field);
  if (it == j.end()) {
    err = std::string("missing field \"") + field + "\"";
    return false;
  }
  if (!it->is_array()) {
    err = std::string("field \"") + field + "\" is not an array";
    return false;
  }
  for (const auto& e : *it) {
    if (!e.is_string()) {
      err = std::string("non-string entry in \"") + field + "\"";
      return false;
    }
    out.push_back(e.get<std::string>());
  }
  return true;
}

ParseResult validate_schema(const json& j, LlmJob kind,
                            const std::string& raw) {
  if (!j.is_object()) {
    return fail(ParseFailStage::Schema, "payload is not a JSON object", raw);
  }
  std::string err;
  ParseResult r;
  switch (kind) {
    case LlmJob::Keywords: {
      KeywordsPayload p;
      if (!get_string_array(j, "heavy", p.heavy, err) ||
          !get_string_array(j, "lesser", p.lesser, err)) {
        return fail(ParseFailStage::Schema, err, raw);
      }
      r.payload = std::move(p);
      return r;
    }
    case LlmJob::ClaimExtract: {
      ClaimsPayload p;
      if (!get_string_array(j, "claims", p.claims, err)) {
        return fail(ParseFailStage::Schema, err, raw);
      }
      r.payload = std::move(p);
      return r;
    }
    case LlmJob::TopicLabel: {
      LabelsPayload p;
      if (!get_string_array(j, "labels", p.labels, err)) {
        return fail(ParseFailStage::Schema, err, raw);
      }
      r.payload = std::move(p);
      return r;
    }
    case LlmJob::RelationGen: {
      auto target = j.find("target");
      if (target == j.end() || !target->is_string()) {
        return fail(ParseFailStage::Schema,
                    "missing or non-string field \"target\"", raw);
      }
      auto label = j.find("relation");
      if (label == j.end() || !label->is_string()) {
        return fail(ParseFailStage::Schema,
                    "missing or non-string field \"relation\"", raw);
      }
      auto rel = relation_from_string(label->get<std::string>());
      if (!rel) {
        return fail(ParseFailStage::Schema,
                    "unknown label: " + label->get<std::string>(), raw);
      }
      RelationPayload p;
      p.target_text = target->get<std::string>();
      p.relation = *rel;
      r.payload = std::move(p);
      return r;
    }
  }
  return fail(ParseFailStage::Schema, "unknown job kind", raw);
}

}  // namespace

ParseResult parse_structured(const std::string& raw, LlmJob kind) {
  json j = json::parse(raw, nullptr, false);
  if (j.is_discarded()) {
    std::string repaired = strip_for_repair(raw);
    if (repaired.empty()) {
      return fail(ParseFailStage::Json, "not JSON and no object to repair",
                  raw);
    }
    j = json::parse(repaired, nullptr, false);
    if (j.is_discarded()) {
      return fail(ParseFailStage::Repair, "repair pass did not yield JSON",
                  raw);
    }
  }
  return validate_schema(j, kind, raw);
}

}  // namespace claimforge
