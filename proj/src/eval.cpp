#include "claimforge/eval.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "claimforge/errors.hpp"

namespace claimforge {

std::vector<std::string> validate_qrels(const Qrels& q) {
  std::vector<std::string> v;
  std::unordered_set<std::string> qids;
  for (const auto& query : q.queries) {
    if (query.query_id.empty()) v.push_back("empty query_id");
    if (!qids.insert(query.query_id).second) {
      v.push_back("duplicate query_id: " + query.query_id);
    }
  }
  std::unordered_set<std::string> cids;
  for (const auto& cand : q.candidates) {
    if (cand.cand_id.empty()) v.push_back("empty cand_id");
    if (!cids.insert(cand.cand_id).second) {
      v.push_back("duplicate cand_id: " + cand.cand_id);
    }
  }
  for (const auto& [qid, cid] : q.relevance) {
    if (qids.count(qid) == 0) {
      v.push_back("relevance references unknown query: " + qid);
    }
    if (cids.count(cid) == 0) {
      v.push_back("relevance references unknown candidate: " + cid);
    }
  }
  return v;
}

Ranking rank_by_embedding(const Qrels& qrels, EmbeddingProvider& provider,
                          EmbeddingCache* cache, const RetryPolicy& retry,
                          Clock& clock) {
  auto violations = validate_qrels(qrels);
  if (!violations.empty()) {
    throw ValidationError("invalid qrels", violations);
  }
  std::vector<std::string> texts;
  texts.reserve(qrels.queries.size() + qrels.candidates.size());
  for (const auto& q : qrels.queries) texts.push_back(q.text);
  for (const auto& c : qrels.candidates) texts.push_back(c.text);
  auto vectors = embed_all(texts, provider, cache, retry, clock);

  Ranking out;
  const size_t nq = qrels.queries.size();
  for (size_t qi = 0; qi < nq; ++qi) {
    std::vector<ScoredCandidate> scored;
    scored.reserve(qrels.candidates.size());
    for (size_t ci = 0; ci < qrels.candidates.size(); ++ci) {
      scored.push_back({qrels.candidates[ci].cand_id,
                        cosine(vectors[qi], vectors[nq + ci])});
    }
    std::sort(scored.begin(), scored.end(),
              [](const ScoredCandidate& a, const ScoredCandidate& b) {
                if (a.score != b.score) return a.score > b.score;
                return a.cand_id < b.cand_id;
              });
    out.per_query[qrels.queries[qi].query_id] = std::move(scored);
  }
  return out;
}

double average_precision_at_k(const std::vector<std::string>& ranked,
                              const std::set<std::string>& relevant, int k) {
  if (k < 1) {
    throw ValidationError("average_precision_at_k: k must be >= 1");
  }
  if (relevant.empty()) return 0.0;
  size_t depth = std::min(ranked.size(), static_cast<size_t>(k));
  double sum = 0;
  long hits = 0;
  for (size_t r = 0; r < depth; ++r) {
    if (relevant.count(ranked[r]) > 0) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(r + 1);
    }
  }
  double denom = static_cast<double>(
      std::min(relevant.size(), static_cast<size_t>(k)));
  return sum / denom;
}

MapReport map_at_k(const Ranking& ranking, const Qrels& qrels, int k) {
  if (k < 1) {
    throw ValidationError("map_at_k: k must be >= 1");
  }
  std::unordered_map<std::string, std::set<std::string>> relevant_of;
  for (const auto& [qid, cid] : qrels.relevance) relevant_of[qid].insert(cid);

  MapReport report;
  report.k = k;
  report.query_count = static_cast<long>(qrels.queries.size());
  report.candidate_count = static_cast<long>(qrels.candidates.size());
  double sum = 0;
  for (const auto& q : qrels.queries) {
    auto rel = relevant_of.find(q.query_id);
    if (rel == relevant_of.end() || rel->second.empty()) {
      ++report.skipped_queries;
      continue;
    }
    std::vector<std::string> ranked;
    auto it = ranking.per_query.find(q.query_id);
    if (it != ranking.per_query.end()) {
      ranked.reserve(it->second.size());
      for (const auto& sc : it->second) ranked.push_back(sc.cand_id);
    }
    sum += average_precision_at_k(ranked, rel->second, k);
    ++report.evaluated_queries;
  }
  if (report.evaluated_queries == 0) {
    throw ValidationError("map_at_k: no evaluable queries (none has a "
                          "relevant candidate)");
  }
  report.map = sum / static_cast<double>(report.evaluated_queries);
  return report;
}

F1Report macro_f1(
    const std::vector<std::pair<std::string, std::string>>& predictions,
    const std::vector<std::pair<std::string, std::string>>& gold,
    const std::vector<std::string>& labels) {
  std::set<std::string> label_set(labels.begin(), labels.end());
  if (label_set.empty()) {
    throw ValidationError("macro_f1: empty label set");
  }
  std::unordered_map<std::string, std::string> gold_of;
  for (const auto& [item, label] : gold) {
    if (label_set.count(label) == 0) {
      throw ValidationError("macro_f1: gold label outside label set: " +
                            label);
    }
    auto [it, inserted] = gold_of.emplace(item, label);
    if (!inserted && it->second != label) {
      throw ValidationError("macro_f1: conflicting gold labels for item " +
                            item);
    }
  }

  F1Report report;
  for (const auto& l : labels) report.per_class[l];

  std::unordered_map<std::string, std::string> pred_of;
  for (const auto& [item, label] : predictions) {
    auto g = gold_of.find(item);
    if (g == gold_of.end()) {
      throw ValidationError("macro_f1: prediction for unknown item: " + item);
    }
    if (label_set.count(label) == 0) {
      throw ValidationError("macro_f1: predicted label outside label set: " +
                            label);
    }
    auto [it, inserted] = pred_of.emplace(item, label);
    if (!inserted) {
      throw ValidationError("macro_f1: duplicate prediction for item " + item);
    }
  }

  for (const auto& [item, gold_label] : gold_of) {
    ++report.item_count;
    auto p = pred_of.find(item);
    if (p == pred_of.end()) {
      // No prediction: a miss for the gold class.
      ++report.missing_predictions;
      ++report.per_class[gold_label].fn;
      continue;
    }
    if (p->second == gold_label) {
      ++report.per_class[gold_label].tp;
    } else {
      ++report.per_class[p->second].fp;
      ++report.per_class[gold_label].fn;
    }
  }

  double macro_sum = 0;
  for (auto& [label, s] : report.per_class) {
    s.precision = (s.tp + s.fp) > 0
                      ? static_cast<double>(s.tp) / (s.tp + s.fp)
                      : 0.0;
    s.recall =
        (s.tp + s.fn) > 0 ? static_cast<double>(s.tp) / (s.tp + s.fn) : 0.0;
    s.f1 = (s.precision + s.recall) > 0
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    macro_sum += s.f1;
  }
  report.macro_f1 = macro_sum / static_cast<double>(report.per_class.size());
  return report;
}

namespace {

std::vector<std::vector<std::string>> load_columns(
    const std::filesystem::path& path,
    const std::vector<std::string>& json_fields) {
  std::vector<std::vector<std::string>> rows;
  bool tsv = path.extension() == ".tsv";
  size_t line_no = 0;
  for (const auto& line : read_lines(path)) {
    ++line_no;
    std::vector<std::string> row;
    if (tsv) {
      size_t start = 0;
      for (;;) {
        size_t tab = line.find('\t', start);
        row.push_back(line.substr(
            start, tab == std::string::npos ? std::string::npos : tab - start));
        if (tab == std::string::npos) break;
        start = tab + 1;
      }
      if (row.size() < json_fields.size()) {
        throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                              ": expected " +
                              std::to_string(json_fields.size()) + " columns");
      }
      row.resize(json_fields.size());
    } else {
      ordered_json j = ordered_json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object()) {
        throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                              ": invalid JSON");
      }
      for (const auto& f : json_fields) {
        auto it = j.find(f);
        if (it == j.end()) {
          throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                ": missing field " + f);
        }
        row.push_back(it->is_string() ? it->get<std::string>() : it->dump());
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

Qrels load_qrels(const std::filesystem::path& queries,
                 const std::filesystem::path& candidates,
                 const std::filesystem::path& qrels) {
  Qrels out;
  for (auto& row : load_columns(queries, {"query_id", "text"})) {
    out.queries.push_back({row[0], row[1]});
  }
  for (auto& row : load_columns(candidates, {"cand_id", "text"})) {
    out.candidates.push_back({row[0], row[1]});
  }
  for (auto& row : load_columns(qrels, {"query_id", "cand_id"})) {
    out.relevance.insert({row[0], row[1]});
  }
  auto violations = validate_qrels(out);
  if (!violations.empty()) {
    throw ValidationError("invalid qrels", violations);
  }
  return out;
}

Ranking load_ranking(const std::filesystem::path& path) {
  Ranking out;
  std::unordered_map<std::string, std::unordered_set<std::string>> seen;
  for (auto& row : load_columns(path, {"query_id", "cand_id", "score"})) {
    double score = 0;
    try {
      score = std::stod(row[2]);
    } catch (...) {
      throw ValidationError("ranking: bad score \"" + row[2] + "\" for " +
                            row[0]);
    }
    if (!seen[row[0]].insert(row[1]).second) {
      throw ValidationError("ranking: duplicate candidate " + row[1] +
                            " for query " + row[0]);
    }
    out.per_query[row[0]].push_back({row[1], score});
  }
  for (auto& [qid, scored] : out.per_query) {
    std::sort(scored.begin(), scored.end(),
              [](const ScoredCandidate& a, const ScoredCandidate& b) {
                if (a.score != b.score) return a.score > b.score;
                return a.cand_id < b.cand_id;
              });
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> load_labeled(
    const std::filesystem::path& path) {
  std::vector<std::pair<std::string, std::string>> out;
  for (auto& row : load_columns(path, {"item_id", "label"})) {
    out.emplace_back(row[0], row[1]);
  }
  return out;
}

ordered_json to_json(const MapReport& r) {
  return ordered_json{{"task", "map_at_k"},
                      {"k", r.k},
                      {"map_at_k", r.map},
                      {"query_count", r.query_count},
                      {"evaluated_queries", r.evaluated_queries},
                      {"skipped_queries", r.skipped_queries},
                      {"candidate_count", r.candidate_count},
                      {"ap_denominator", "min(|relevant|, k)"},
                      {"tie_break", "lexicographic_cand_id"}};
}

ordered_json to_json(const F1Report& r) {
  ordered_json per_class = ordered_json::object();
  for (const auto& [label, s] : r.per_class) {
    per_class[label] = ordered_json{{"precision", s.precision},
                                    {"recall", s.recall},
                                    {"f1", s.f1},
                                    {"tp", s.tp},
                                    {"fp", s.fp},
                                    {"fn", s.fn}};
  }
  return ordered_json{{"task", "macro_f1"},
                      {"macro_f1", r.macro_f1},
                      {"per_class", per_class},
                      {"item_count", r.item_count},
                      {"missing_predictions", r.missing_predictions}};
}

}  // namespace claimforge
