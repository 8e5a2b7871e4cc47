#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace claimforge {

// Claims authored by the relation generator (not extracted from a post)
// carry this sentinel post id so the claim table stays uniform.
inline constexpr const char* kGeneratedPostId = "generated";

struct Topic {
  std::string topic_id;  // stable slug-like id
  std::string title;
  std::string description;

  friend bool operator==(const Topic&, const Topic&) = default;
};

// Two LLM-generated keyword groups: `heavy` terms are strongly indicative
// of the topic, `lesser` terms are associated but not exclusive to it.
// Terms are stored normalized and casefolded; the lists are disjoint.
struct KeywordSet {
  std::string topic_id;
  std::vector<std::string> heavy;
  std::vector<std::string> lesser;

  friend bool operator==(const KeywordSet&, const KeywordSet&) = default;
};

// One search query: a heavy term plus two distinct lesser terms joined by
// " AND ". The lesser pair is stored in lexicographic order.
struct Query {
  std::string topic_id;
  std::string heavy_term;
  std::array<std::string, 2> lesser_terms;
  std::string rendered;

  friend bool operator==(const Query&, const Query&) = default;
};

struct Post {
  std::string post_id;    // source-native id or content hash
  std::string source_id;  // which source client produced it
  std::string text;       // normalized
  std::optional<std::string> url;
  std::string fetched_at;  // UTC, "YYYY-MM-DDTHH:MM:SSZ"
  std::string query_ref;   // rendered query that retrieved it
  std::string topic_id;

  friend bool operator==(const Post&, const Post&) = default;
};

struct ClaimTuple {
  std::string claim_id;  // claim_id_of(post_id, claim_text)
  std::string post_id;
  std::string claim_text;

  friend bool operator==(const ClaimTuple&, const ClaimTuple&) = default;
};

struct TopicTuple {
  std::string post_id;
  std::string topic_label;

  friend bool operator==(const TopicTuple&, const TopicTuple&) = default;
};

enum class Relation { Support, Undermine };

const char* to_string(Relation r);
// Accepts the two closed-set labels (case-insensitively); nullopt otherwise.
std::optional<Relation> relation_from_string(const std::string& s);

struct RelationTuple {
  std::string source_claim_id;
  std::string target_claim_id;
  Relation relation;

  friend bool operator==(const RelationTuple&, const RelationTuple&) = default;
};

struct EmbeddingVector {
  std::vector<double> values;

  size_t dim() const { return values.size(); }
  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) =
      default;
};

// Total map claim -> cluster plus one representative claim per cluster.
// Cluster ids are dense integers assigned by smallest member index.
struct ClusterAssignment {
  std::map<std::string, int> cluster_of;
  std::vector<std::string> representatives;  // index = cluster id

  size_t cluster_count() const { return representatives.size(); }
  friend bool operator==(const ClusterAssignment&, const ClusterAssignment&) =
      default;
};

inline constexpr const char* kSplitNames[3] = {"train", "dev", "test"};

struct ProviderInfo {
  std::string kind;   // "mock", "http", "hash", "local", ...
  std::string model;  // opaque model / source name

  friend bool operator==(const ProviderInfo&, const ProviderInfo&) = default;
};

struct DatasetManifest {
  int schema_version = 1;
  uint64_t seed = 0;
  ProviderInfo llm;
  ProviderInfo embedding;
  ProviderInfo source;
  std::string prompt_version;
  std::string prompt_digest;
  std::vector<Topic> topics;
  double tau = 0.95;
  std::string similarity = "cosine";
  std::string query_sampling = "uniform_without_replacement";
  std::string relation_steering = "balanced_support_undermine";
  std::array<double, 3> proportions{0.8, 0.1, 0.1};
  // split name -> record type ("posts", "claims", "topics", "relations") -> count
  std::map<std::string, std::map<std::string, long>> counts;
  // path relative to the dataset root -> "sha256:<hex>"
  std::map<std::string, std::string> files;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) =
      default;
};

}  // namespace claimforge
