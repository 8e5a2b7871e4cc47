#include "claimforge/cluster.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "claimforge/errors.hpp"
#include "claimforge/records.hpp"

namespace claimforge {

namespace {

class UnionFind {
 public:
  explicit UnionFind(size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), size_t{0});
  }
  size_t find(size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(size_t a, size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<size_t> parent_;
  std::vector<size_t> rank_;
};

}  // namespace

ClusterAssignment cluster(const std::vector<std::string>& claim_ids,
                          const std::vector<EmbeddingVector>& embeddings,
                          const ClusterConfig& cfg) {
  const size_t n = claim_ids.size();
  if (n == 0) {
    throw ValidationError("cluster: no embeddings");
  }
  if (embeddings.size() != n) {
    throw ValidationError("cluster: ids and embeddings differ in length");
  }
  const size_t dim = embeddings[0].dim();
  for (size_t i = 1; i < n; ++i) {
    if (embeddings[i].dim() != dim) {
      throw ValidationError("cluster: dimension mismatch at index " +
                            std::to_string(i));
    }
  }
  {
    std::set<std::string> distinct(claim_ids.begin(), claim_ids.end());
    if (distinct.size() != n) {
      throw ValidationError("cluster: duplicate claim ids");
    }
  }

  UnionFind uf(n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      if (cosine(embeddings[i], embeddings[j]) > cfg.tau) {
        uf.unite(i, j);
      }
    }
  }

  // Dense cluster ids in order of smallest member index.
  std::unordered_map<size_t, int> root_to_cluster;
  std::vector<std::vector<size_t>> members;
  for (size_t i = 0; i < n; ++i) {
    size_t root = uf.find(i);
    auto it = root_to_cluster.find(root);
    if (it == root_to_cluster.end()) {
      it = root_to_cluster.emplace(root, static_cast<int>(members.size()))
               .first;
      members.emplace_back();
    }
    members[it->second].push_back(i);
  }

  ClusterAssignment out;
  out.representatives.resize(members.size());
  for (size_t c = 0; c < members.size(); ++c) {
    std::vector<std::string> ids;
    std::vector<EmbeddingVector> vecs;
    ids.reserve(members[c].size());
    for (size_t idx : members[c]) {
      out.cluster_of[claim_ids[idx]] = static_cast<int>(c);
      ids.push_back(claim_ids[idx]);
      vecs.push_back(embeddings[idx]);
    }
    out.representatives[c] = pick_representative(ids, vecs);
  }
  return out;
}

std::string pick_representative(const std::vector<std::string>& member_ids,
                                const std::vector<EmbeddingVector>& members) {
  if (member_ids.empty()) {
    throw ValidationError("pick_representative: empty cluster");
  }
  if (member_ids.size() == 1) return member_ids[0];

  // Canonical claim-id order, so summation order (and therefore any
  // floating-point tie) is independent of how members were collected.
  std::vector<size_t> order(member_ids.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return member_ids[a] < member_ids[b];
  });

  std::string best_id;
  double best_score = 0;
  bool first = true;
  for (size_t oi : order) {
    double score = 0;
    for (size_t oj : order) {
      if (oi == oj) continue;
      score += cosine(members[oi], members[oj]);
    }
    if (first || score > best_score ||
        (score == best_score && member_ids[oi] < best_id)) {
      best_score = score;
      best_id = member_ids[oi];
      first = false;
    }
  }
  return best_id;
}

std::vector<RelationTuple> rewrite_relations(
    const std::vector<RelationTuple>& relations,
    const ClusterAssignment& assignment, RewriteStats& stats) {
  auto rep_of = [&](const std::string& claim_id) -> const std::string& {
    auto it = assignment.cluster_of.find(claim_id);
    if (it == assignment.cluster_of.end()) {
      throw ValidationError("rewrite_relations: dangling claim id " +
                            claim_id);
    }
    return assignment.representatives[static_cast<size_t>(it->second)];
  };

  std::set<std::array<std::string, 3>> seen;
  std::map<std::pair<std::string, std::string>, std::set<Relation>> labels;
  std::vector<RelationTuple> rewritten;
  for (const auto& r : relations) {
    RelationTuple t;
    t.source_claim_id = rep_of(r.source_claim_id);
    t.target_claim_id = rep_of(r.target_claim_id);
    t.relation = r.relation;
    if (t.source_claim_id == t.target_claim_id) {
      ++stats.self_dropped;
      continue;
    }
    if (!seen.insert({t.source_claim_id, t.target_claim_id,
                      std::string(to_string(t.relation))})
             .second) {
      ++stats.duplicates_dropped;
      continue;
    }
    labels[{t.source_claim_id, t.target_claim_id}].insert(t.relation);
    rewritten.push_back(std::move(t));
  }

  std::vector<RelationTuple> out;
  for (const auto& t : rewritten) {
    const auto& seen_labels =
        labels.at({t.source_claim_id, t.target_claim_id});
    if (seen_labels.size() > 1) {
      ++stats.conflict_dropped;
      continue;
    }
    out.push_back(t);
  }
  for (const auto& [pair, seen_labels] : labels) {
    if (seen_labels.size() > 1) ++stats.conflict_pairs;
  }
  canonical_sort(out);
  return out;
}

}  // namespace claimforge
