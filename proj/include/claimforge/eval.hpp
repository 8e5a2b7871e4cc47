#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "claimforge/embed.hpp"
#include "claimforge/records.hpp"

namespace claimforge {

struct QrelsQuery {
  std::string query_id;
  std::string text;
};

struct QrelsCandidate {
  std::string cand_id;
  std::string text;
};

struct Qrels {
  std::vector<QrelsQuery> queries;
  std::vector<QrelsCandidate> candidates;
  std::set<std::pair<std::string, std::string>> relevance;
};

std::vector<std::string> validate_qrels(const Qrels& q);

struct ScoredCandidate {
  std::string cand_id;
  double score;
};

// Per query: candidates in descending score order, score ties broken by
// lexicographic cand_id, no duplicates.
struct Ranking {
  std::map<std::string, std::vector<ScoredCandidate>> per_query;
};

// Ranks every candidate for every query by cosine similarity of embeddings.
Ranking rank_by_embedding(const Qrels& qrels, EmbeddingProvider& provider,
                          EmbeddingCache* cache, const RetryPolicy& retry,
                          Clock& clock);

// Truncated average precision:
//   AP@k = (sum over relevant ranks r <= k of precision@r) / min(|rel|, k).
double average_precision_at_k(const std::vector<std::string>& ranked,
                              const std::set<std::string>& relevant, int k);

struct MapReport {
  int k = 20;
  double map = 0;
  long query_count = 0;
  long evaluated_queries = 0;
  long skipped_queries = 0;  // queries with no relevant candidate
  long candidate_count = 0;
};

// Unweighted mean of AP@k over queries with at least one relevant
// candidate. Queries with none are skipped, not scored zero. Throws
// ValidationError when no query is evaluable.
MapReport map_at_k(const Ranking& ranking, const Qrels& qrels, int k);

struct ClassScores {
  long tp = 0, fp = 0, fn = 0;
  double precision = 0, recall = 0, f1 = 0;
};

struct F1Report {
  std::map<std::string, ClassScores> per_class;
  double macro_f1 = 0;
  long item_count = 0;
  long missing_predictions = 0;  // gold items without a prediction (scored FN)
};

// Per-class precision/recall/F1 over a closed label set (scores are 0 when
// a denominator is 0); macro F1 is the unweighted mean across the set.
// Predictions for unknown items or with labels outside the set are
// validation errors.
F1Report macro_f1(
    const std::vector<std::pair<std::string, std::string>>& predictions,
    const std::vector<std::pair<std::string, std::string>>& gold,
    const std::vector<std::string>& labels);

// File formats: ".tsv" = tab-separated columns, anything else = JSONL.
// queries: {query_id, text}; candidates: {cand_id, text};
// qrels: {query_id, cand_id}; rankings: {query_id, cand_id, score};
// labeled items: {item_id, label}.
Qrels load_qrels(const std::filesystem::path& queries,
                 const std::filesystem::path& candidates,
                 const std::filesystem::path& qrels);
Ranking load_ranking(const std::filesystem::path& path);
std::vector<std::pair<std::string, std::string>> load_labeled(
    const std::filesystem::path& path);

ordered_json to_json(const MapReport& r);
ordered_json to_json(const F1Report& r);

}  // namespace claimforge
