#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "claimforge/cluster.hpp"
#include "claimforge/rng.hpp"
#include "support/test_support.hpp"

using namespace claimforge;

namespace {

// Independent oracle: adjacency matrix + DFS, no union-find. Returns the
// partition as a set of sets of claim ids.
std::set<std::set<std::string>> oracle_components(
    const std::vector<std::string>& ids,
    const std::vector<EmbeddingVector>& vecs, double tau) {
  const size_t n = ids.size();
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (i != j && cosine(vecs[i], vecs[j]) > tau) adj[i][j] = true;
    }
  }
  std::vector<bool> visited(n, false);
  std::set<std::set<std::string>> out;
  for (size_t start = 0; start < n; ++start) {
    if (visited[start]) continue;
    std::set<std::string> comp;
    std::vector<size_t> stack{start};
    visited[start] = true;
    while (!stack.empty()) {
      size_t v = stack.back();
      stack.pop_back();
      comp.insert(ids[v]);
      for (size_t w = 0; w < n; ++w) {
        if (adj[v][w] && !visited[w]) {
          visited[w] = true;
          stack.push_back(w);
        }
      }
    }
    out.insert(std::move(comp));
  }
  return out;
}

std::set<std::set<std::string>> partition_of(const ClusterAssignment& a) {
  std::map<int, std::set<std::string>> by_cluster;
  for (const auto& [id, c] : a.cluster_of) by_cluster[c].insert(id);
  std::set<std::set<std::string>> out;
  for (auto& [c, members] : by_cluster) out.insert(std::move(members));
  return out;
}

std::vector<EmbeddingVector> random_unit_vectors(size_t n, int dim, Rng& rng) {
  std::vector<EmbeddingVector> out;
  for (size_t i = 0; i < n; ++i) {
    EmbeddingVector v;
    double norm2 = 0;
    for (int d = 0; d < dim; ++d) {
      double x = rng.unit() * 2.0 - 1.0;
      v.values.push_back(x);
      norm2 += x * x;
    }
    double inv = 1.0 / std::sqrt(norm2);
    for (double& x : v.values) x *= inv;
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<std::string> make_ids(size_t n) {
  std::vector<std::string> ids;
  for (size_t i = 0; i < n; ++i) {
    ids.push_back("c" + std::to_string(100 + i));
  }
  return ids;
}

}  // namespace

TEST_CASE("all-dissimilar input yields singleton clusters") {
  // Orthogonal one-hot vectors: all pairwise similarities are 0.
  std::vector<EmbeddingVector> vecs;
  for (int i = 0; i < 5; ++i) {
    EmbeddingVector v;
    v.values.assign(8, 0.0);
    v.values[i] = 1.0;
    vecs.push_back(v);
  }
  auto ids = make_ids(5);
  auto a = cluster(ids, vecs, ClusterConfig{0.95, "medoid"});
  CHECK(a.cluster_count() == 5);
  for (const auto& id : ids) {
    CHECK(a.representatives[a.cluster_of.at(id)] == id);
  }
}

TEST_CASE("transitive chain merges through the middle member") {
  // a-b 0.96, b-c 0.96, a-c 0.90: one cluster despite a-c below tau.
  double s = 0.96;
  EmbeddingVector b{{1.0, 0.0, 0.0}};
  EmbeddingVector a{{s, std::sqrt(1 - s * s), 0.0}};
  double x = (0.90 - s * s) / std::sqrt(1 - s * s);
  EmbeddingVector c{{s, x, std::sqrt(1 - s * s - x * x)}};

  CHECK(cosine(a, b) == doctest::Approx(0.96).epsilon(1e-12));
  CHECK(cosine(b, c) == doctest::Approx(0.96).epsilon(1e-12));
  CHECK(cosine(a, c) == doctest::Approx(0.90).epsilon(1e-12));

  std::vector<std::string> ids{"a", "b", "c"};
  std::vector<EmbeddingVector> vecs{a, b, c};
  auto assignment = cluster(ids, vecs, ClusterConfig{0.95, "medoid"});
  CHECK(assignment.cluster_count() == 1);
  CHECK(partition_of(assignment) ==
        oracle_components(ids, vecs, 0.95));
  // b is the medoid: summed similarity 1.92 vs 1.86 for a and c.
  CHECK(assignment.representatives[0] == "b");
}

TEST_CASE("partition equals the brute-force oracle on random instances") {
  Rng rng(424242);
  for (double tau : {0.5, 0.9, 0.95}) {
    for (int trial = 0; trial < 40; ++trial) {
      size_t n = 2 + rng.bounded(49);
      auto vecs = random_unit_vectors(n, 8, rng);
      auto ids = make_ids(n);
      auto assignment = cluster(ids, vecs, ClusterConfig{tau, "medoid"});
      CHECK(partition_of(assignment) == oracle_components(ids, vecs, tau));
    }
  }
}

TEST_CASE("ties at exactly tau do not merge") {
  EmbeddingVector a{{1.0, 0.0}};
  EmbeddingVector b{{1.0, 0.0}};  // cosine exactly 1.0
  auto one = cluster({"x", "y"}, {a, b}, ClusterConfig{1.0, "medoid"});
  CHECK(one.cluster_count() == 2);  // strict inequality: 1.0 > 1.0 is false
}

TEST_CASE("permutation invariance of partition and representatives") {
  Rng rng(777);
  auto vecs = random_unit_vectors(30, 8, rng);
  // Plant a few near-duplicates.
  vecs[5] = vecs[2];
  vecs[11] = vecs[2];
  vecs[20] = vecs[19];
  auto ids = make_ids(30);

  auto base = cluster(ids, vecs, ClusterConfig{0.9, "medoid"});
  std::set<std::string> base_reps(base.representatives.begin(),
                                  base.representatives.end());

  std::vector<size_t> perm(30);
  std::iota(perm.begin(), perm.end(), size_t{0});
  Rng shuffler(3);
  shuffler.shuffle(perm);
  std::vector<std::string> ids2;
  std::vector<EmbeddingVector> vecs2;
  for (size_t i : perm) {
    ids2.push_back(ids[i]);
    vecs2.push_back(vecs[i]);
  }
  auto shuffled = cluster(ids2, vecs2, ClusterConfig{0.9, "medoid"});
  std::set<std::string> shuffled_reps(shuffled.representatives.begin(),
                                      shuffled.representatives.end());
  CHECK(partition_of(base) == partition_of(shuffled));
  CHECK(base_reps == shuffled_reps);
}

TEST_CASE("threshold monotonicity: higher tau refines the partition") {
  Rng rng(31337);
  for (int trial = 0; trial < 30; ++trial) {
    size_t n = 2 + rng.bounded(40);
    auto vecs = random_unit_vectors(n, 8, rng);
    auto ids = make_ids(n);
    double t1 = 0.3 + 0.4 * rng.unit();
    double t2 = t1 + (0.99 - t1) * rng.unit();
    auto p1 = cluster(ids, vecs, ClusterConfig{t1, "medoid"});
    auto p2 = cluster(ids, vecs, ClusterConfig{t2, "medoid"});
    // Every tau2 cluster lies inside one tau1 cluster.
    for (const auto& fine : partition_of(p2)) {
      bool contained = false;
      for (const auto& coarse : partition_of(p1)) {
        if (std::includes(coarse.begin(), coarse.end(), fine.begin(),
                          fine.end())) {
          contained = true;
          break;
        }
      }
      CHECK(contained);
    }
  }
}

TEST_CASE("medoid picks the central member, ties to smaller id") {
  // b sits between a and c.
  EmbeddingVector a{cftest::planar_unit(4, 0, 1, 0.0)};
  EmbeddingVector b{cftest::planar_unit(4, 0, 1, 0.2)};
  EmbeddingVector c{cftest::planar_unit(4, 0, 1, 0.4)};
  CHECK(pick_representative({"a", "b", "c"}, {a, b, c}) == "b");
  // Brute-force check of the medoid objective.
  double score_a = cosine(a, b) + cosine(a, c);
  double score_b = cosine(b, a) + cosine(b, c);
  double score_c = cosine(c, a) + cosine(c, b);
  CHECK(score_b > score_a);
  CHECK(score_b > score_c);

  // Exact tie between two identical members: lexicographically smaller id.
  CHECK(pick_representative({"z", "m"}, {a, a}) == "m");
  CHECK(pick_representative({"only"}, {a}) == "only");
}

TEST_CASE("cluster input validation") {
  CHECK_THROWS_AS(cluster({}, {}, ClusterConfig{}), ValidationError);
  EmbeddingVector v2{{1.0, 0.0}};
  EmbeddingVector v3{{1.0, 0.0, 0.0}};
  CHECK_THROWS_AS(cluster({"a", "b"}, {v2, v3}, ClusterConfig{}),
                  ValidationError);
  CHECK_THROWS_AS(cluster({"a", "a"}, {v2, v2}, ClusterConfig{}),
                  ValidationError);
}

TEST_CASE("rewrite_relations maps ends to representatives") {
  ClusterAssignment a;
  a.cluster_of = {{"c1", 0}, {"c2", 0}, {"c3", 1}, {"c4", 2}};
  a.representatives = {"c1", "c3", "c4"};

  SUBCASE("identity assignment is a no-op") {
    ClusterAssignment ident;
    ident.cluster_of = {{"c1", 0}, {"c3", 1}};
    ident.representatives = {"c1", "c3"};
    std::vector<RelationTuple> rels{{"c1", "c3", Relation::Support}};
    RewriteStats stats;
    CHECK(rewrite_relations(rels, ident, stats) == rels);
    CHECK(stats.self_dropped == 0);
  }

  SUBCASE("merged source and target become a dropped self-relation") {
    std::vector<RelationTuple> rels{{"c2", "c1", Relation::Support}};
    RewriteStats stats;
    CHECK(rewrite_relations(rels, a, stats).empty());
    CHECK(stats.self_dropped == 1);
  }

  SUBCASE("duplicates collapse after rewriting") {
    std::vector<RelationTuple> rels{{"c1", "c3", Relation::Support},
                                    {"c2", "c3", Relation::Support}};
    RewriteStats stats;
    auto out = rewrite_relations(rels, a, stats);
    REQUIRE(out.size() == 1);
    CHECK(out[0] == RelationTuple{"c1", "c3", Relation::Support});
    CHECK(stats.duplicates_dropped == 1);
  }

  SUBCASE("conflicting labels on one pair drop both tuples") {
    std::vector<RelationTuple> rels{{"c1", "c3", Relation::Support},
                                    {"c2", "c3", Relation::Undermine}};
    RewriteStats stats;
    CHECK(rewrite_relations(rels, a, stats).empty());
    CHECK(stats.conflict_pairs == 1);
    CHECK(stats.conflict_dropped == 2);
  }

  SUBCASE("dangling ids are a validation error") {
    std::vector<RelationTuple> rels{{"ghost", "c3", Relation::Support}};
    RewriteStats stats;
    CHECK_THROWS_AS(rewrite_relations(rels, a, stats), ValidationError);
  }
}
