#include <doctest.h>

#include <map>
#include <set>

#include "claimforge/digest.hpp"
#include "claimforge/errors.hpp"
#include "claimforge/rng.hpp"
#include "claimforge/split.hpp"
#include "support/test_support.hpp"

using namespace claimforge;

namespace {

struct Fixture {
  std::vector<Post> posts;
  std::vector<ClaimTuple> claims;
  std::vector<TopicTuple> topics;
  std::vector<RelationTuple> relations;
  ClusterAssignment assignment;
};

Post make_post(const std::string& id) {
  Post p;
  p.post_id = id;
  p.source_id = "local";
  p.text = "text of " + id;
  p.fetched_at = "1970-01-01T00:00:00Z";
  p.query_ref = "q";
  p.topic_id = "t";
  return p;
}

// n_posts posts, one claim each, every claim its own cluster.
Fixture simple_fixture(int n_posts) {
  Fixture f;
  for (int i = 0; i < n_posts; ++i) {
    std::string pid = "p" + std::to_string(100 + i);
    f.posts.push_back(make_post(pid));
    std::string text = "claim of " + pid;
    ClaimTuple c{claim_id_of(pid, text), pid, text};
    f.assignment.cluster_of[c.claim_id] = i;
    f.assignment.representatives.push_back(c.claim_id);
    f.claims.push_back(std::move(c));
    f.topics.push_back({pid, "label"});
  }
  return f;
}

}  // namespace

TEST_CASE("degenerate proportions put everything in train") {
  auto f = simple_fixture(7);
  SplitProportions props;
  props.p = {1.0, 0.0, 0.0};
  auto r = split_dataset(f.posts, f.claims, f.topics, f.relations,
                         f.assignment, props, 1);
  CHECK(r.bundles[0].posts.size() == 7);
  CHECK(r.bundles[0].claims.size() == 7);
  CHECK(r.bundles[1].posts.empty());
  CHECK(r.bundles[2].posts.empty());
}

TEST_CASE("10 clusters at 0.8/0.1/0.1 apportion as 8/1/1") {
  auto f = simple_fixture(10);
  auto r = split_dataset(f.posts, f.claims, f.topics, f.relations,
                         f.assignment, SplitProportions{}, 42);
  CHECK(r.stats.groups_per_split == std::array<size_t, 3>{8, 1, 1});
  CHECK(r.bundles[0].claims.size() == 8);
  CHECK(r.bundles[1].claims.size() == 1);
  CHECK(r.bundles[2].claims.size() == 1);
}

TEST_CASE("largest-remainder apportionment oracle") {
  CHECK(apportion(10, {0.8, 0.1, 0.1}) == std::array<size_t, 3>{8, 1, 1});
  CHECK(apportion(0, {0.8, 0.1, 0.1}) == std::array<size_t, 3>{0, 0, 0});
  CHECK(apportion(1, {1.0, 0.0, 0.0}) == std::array<size_t, 3>{1, 0, 0});
  CHECK(apportion(5, {0.5, 0.25, 0.25}) == std::array<size_t, 3>{3, 1, 1});
  // Sum is always total.
  for (size_t n : {1u, 7u, 23u, 100u}) {
    auto c = apportion(n, {0.6, 0.3, 0.1});
    CHECK(c[0] + c[1] + c[2] == n);
  }
}

TEST_CASE("split is deterministic under seed") {
  auto f = simple_fixture(20);
  auto r1 = split_dataset(f.posts, f.claims, f.topics, f.relations,
                          f.assignment, SplitProportions{}, 9);
  auto r2 = split_dataset(f.posts, f.claims, f.topics, f.relations,
                          f.assignment, SplitProportions{}, 9);
  for (int s = 0; s < 3; ++s) {
    CHECK(r1.bundles[s].posts == r2.bundles[s].posts);
    CHECK(r1.bundles[s].claims == r2.bundles[s].claims);
  }
  auto r3 = split_dataset(f.posts, f.claims, f.topics, f.relations,
                          f.assignment, SplitProportions{}, 10);
  bool same = true;
  for (int s = 0; s < 3; ++s) {
    same = same && r1.bundles[s].claims == r3.bundles[s].claims;
  }
  CHECK(!same);
}

TEST_CASE("fewer groups than positive splits is a validation error") {
  auto f = simple_fixture(2);
  CHECK_THROWS_AS(split_dataset(f.posts, f.claims, f.topics, f.relations,
                                f.assignment, SplitProportions{}, 1),
                  ValidationError);
  // Two groups over two positive splits is fine.
  SplitProportions two;
  two.p = {0.5, 0.5, 0.0};
  CHECK_NOTHROW(split_dataset(f.posts, f.claims, f.topics, f.relations,
                              f.assignment, two, 1));
}

TEST_CASE("bad proportions are validation errors") {
  auto f = simple_fixture(5);
  SplitProportions bad;
  bad.p = {0.8, 0.1, 0.0};
  CHECK_THROWS_AS(split_dataset(f.posts, f.claims, f.topics, f.relations,
                                f.assignment, bad, 1),
                  ValidationError);
}

TEST_CASE("clusters sharing a post land in one split") {
  // One post with two claims in two different clusters.
  Fixture f;
  f.posts.push_back(make_post("p1"));
  for (int i = 0; i < 9; ++i) {
    f.posts.push_back(make_post("q" + std::to_string(i)));
  }
  auto add_claim = [&](const std::string& pid, const std::string& text,
                       int cluster) {
    ClaimTuple c{claim_id_of(pid, text), pid, text};
    f.assignment.cluster_of[c.claim_id] = cluster;
    if (static_cast<int>(f.assignment.representatives.size()) <= cluster) {
      f.assignment.representatives.resize(cluster + 1);
    }
    if (f.assignment.representatives[cluster].empty()) {
      f.assignment.representatives[cluster] = c.claim_id;
    }
    f.claims.push_back(c);
    return c.claim_id;
  };
  add_claim("p1", "first claim", 0);
  add_claim("p1", "second claim", 1);
  for (int i = 0; i < 9; ++i) {
    add_claim("q" + std::to_string(i), "claim q" + std::to_string(i), 2 + i);
  }

  for (uint64_t seed = 0; seed < 30; ++seed) {
    auto r = split_dataset(f.posts, f.claims, f.topics, f.relations,
                           f.assignment, SplitProportions{}, seed);
    // p1 appears in exactly one split, with both its claims.
    int splits_with_p1 = 0;
    for (int s = 0; s < 3; ++s) {
      bool has = false;
      for (const auto& p : r.bundles[s].posts) has |= p.post_id == "p1";
      if (has) {
        ++splits_with_p1;
        int p1_claims = 0;
        for (const auto& c : r.bundles[s].claims) {
          if (c.post_id == "p1") ++p1_claims;
        }
        CHECK(p1_claims == 2);
      }
    }
    CHECK(splits_with_p1 == 1);
  }
}

TEST_CASE("leakage freedom and cross-split relation accounting on random "
          "instances") {
  Rng rng(606060);
  for (int trial = 0; trial < 50; ++trial) {
    Fixture f;
    size_t n_posts = 5 + rng.bounded(20);
    int next_cluster = 0;
    std::vector<std::string> all_claim_ids;
    for (size_t i = 0; i < n_posts; ++i) {
      std::string pid = "p" + std::to_string(i);
      f.posts.push_back(make_post(pid));
      size_t n_claims = rng.bounded(3);  // 0..2 claims per post
      for (size_t k = 0; k < n_claims; ++k) {
        std::string text = "claim " + std::to_string(k) + " of " + pid;
        ClaimTuple c{claim_id_of(pid, text), pid, text};
        f.assignment.cluster_of[c.claim_id] = next_cluster;
        f.assignment.representatives.push_back(c.claim_id);
        ++next_cluster;
        all_claim_ids.push_back(c.claim_id);
        f.claims.push_back(std::move(c));
      }
      if (rng.bounded(2)) f.topics.push_back({pid, "some label"});
    }
    // A few generated targets in their own clusters.
    for (int g = 0; g < 5; ++g) {
      std::string text = "generated target " + std::to_string(g);
      ClaimTuple c{claim_id_of(kGeneratedPostId, text), kGeneratedPostId,
                   text};
      f.assignment.cluster_of[c.claim_id] = next_cluster;
      f.assignment.representatives.push_back(c.claim_id);
      ++next_cluster;
      all_claim_ids.push_back(c.claim_id);
      f.claims.push_back(std::move(c));
    }
    if (all_claim_ids.size() < 4) continue;
    for (int r = 0; r < 15; ++r) {
      std::string a = all_claim_ids[rng.bounded(all_claim_ids.size())];
      std::string b = all_claim_ids[rng.bounded(all_claim_ids.size())];
      if (a == b) continue;
      f.relations.push_back(
          {a, b, rng.bounded(2) ? Relation::Support : Relation::Undermine});
    }

    auto result = split_dataset(f.posts, f.claims, f.topics, f.relations,
                                f.assignment, SplitProportions{},
                                rng.bounded(1u << 30));

    std::set<std::string> seen_posts, seen_claims;
    std::set<int> seen_clusters;
    size_t kept_relations = 0;
    for (int s = 0; s < 3; ++s) {
      for (const auto& p : result.bundles[s].posts) {
        CHECK(seen_posts.insert(p.post_id).second);
      }
      for (const auto& c : result.bundles[s].claims) {
        CHECK(seen_claims.insert(c.claim_id).second);
        int cl = f.assignment.cluster_of.at(c.claim_id);
        // A cluster may not appear in two splits; all our clusters are
        // singletons so membership equals the claim check, plus:
        seen_clusters.insert(cl);
      }
      kept_relations += result.bundles[s].relations.size();
      // Referential integrity inside the split for relations.
      std::set<std::string> split_claims;
      for (const auto& c : result.bundles[s].claims) {
        split_claims.insert(c.claim_id);
      }
      for (const auto& rel : result.bundles[s].relations) {
        CHECK(split_claims.count(rel.source_claim_id) == 1);
        CHECK(split_claims.count(rel.target_claim_id) == 1);
      }
    }
    CHECK(seen_posts.size() == f.posts.size());
    CHECK(seen_claims.size() == f.claims.size());
    CHECK(kept_relations + result.stats.cross_split_relations_dropped ==
          f.relations.size());
  }
}
