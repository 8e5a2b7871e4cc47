#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "claimforge/types.hpp"

// Canonical on-disk record schemas. One JSON object per line, UTF-8.
// Field order in emitted files is fixed (see to_json overloads); parsing
// accepts any field order.

namespace claimforge {

using ordered_json = nlohmann::ordered_json;

ordered_json to_json(const Topic& t);
ordered_json to_json(const KeywordSet& ks);
ordered_json to_json(const Query& q);
ordered_json to_json(const Post& p);
ordered_json to_json(const ClaimTuple& c);
ordered_json to_json(const TopicTuple& t);
ordered_json to_json(const RelationTuple& r);
ordered_json to_json(const ClusterAssignment& a);
ordered_json to_json(const DatasetManifest& m);

// All throw ValidationError naming the missing/mistyped field.
Topic topic_from_json(const ordered_json& j);
KeywordSet keywordset_from_json(const ordered_json& j);
Query query_from_json(const ordered_json& j);
Post post_from_json(const ordered_json& j);
ClaimTuple claim_from_json(const ordered_json& j);
TopicTuple topictuple_from_json(const ordered_json& j);
RelationTuple relation_from_json(const ordered_json& j);
ClusterAssignment assignment_from_json(const ordered_json& j);
DatasetManifest manifest_from_json(const ordered_json& j);

// One compact JSON document, no trailing newline.
template <typename T>
std::string to_jsonl_line(const T& record) {
  return to_json(record).dump();
}

// JSONL file IO. Readers throw ValidationError with the offending line
// number; writers write to "<path>.tmp" then rename.
std::vector<std::string> read_lines(const std::filesystem::path& path);
void write_lines_atomic(const std::filesystem::path& path,
                        const std::vector<std::string>& lines);

std::vector<Post> read_posts_jsonl(const std::filesystem::path& path);
std::vector<ClaimTuple> read_claims_jsonl(const std::filesystem::path& path);
std::vector<TopicTuple> read_topics_jsonl(const std::filesystem::path& path);
std::vector<RelationTuple> read_relations_jsonl(
    const std::filesystem::path& path);

void write_posts_jsonl(const std::filesystem::path& path,
                       const std::vector<Post>& v);
void write_claims_jsonl(const std::filesystem::path& path,
                        const std::vector<ClaimTuple>& v);
void write_topics_jsonl(const std::filesystem::path& path,
                        const std::vector<TopicTuple>& v);
void write_relations_jsonl(const std::filesystem::path& path,
                           const std::vector<RelationTuple>& v);

// Canonical emission order: posts by id, claims by id, topic tuples by
// (post_id, label), relations by (source, target, relation).
void canonical_sort(std::vector<Post>& v);
void canonical_sort(std::vector<ClaimTuple>& v);
void canonical_sort(std::vector<TopicTuple>& v);
void canonical_sort(std::vector<RelationTuple>& v);

// Whole-document JSON helpers (manifest, reports, cached artifacts).
ordered_json read_json_file(const std::filesystem::path& path);
void write_json_file_atomic(const std::filesystem::path& path,
                            const ordered_json& doc);

}  // namespace claimforge
