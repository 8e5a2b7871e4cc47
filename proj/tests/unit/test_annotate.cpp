#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "claimforge/annotate.hpp"
#include "claimforge/digest.hpp"
#include "claimforge/records.hpp"
#include "claimforge/rng.hpp"
#include "claimforge/validate.hpp"
#include "support/test_support.hpp"

using namespace claimforge;

namespace {

Post make_post(const std::string& id, const std::string& text) {
  Post p;
  p.post_id = id;
  p.source_id = "local";
  p.text = text;
  p.fetched_at = "1970-01-01T00:00:00Z";
  p.query_ref = "q";
  p.topic_id = "t1";
  return p;
}

AnnotateOptions fast_options() {
  AnnotateOptions opt;
  opt.retry = RetryPolicy{2, 1, 2.0};
  return opt;
}

}  // namespace

TEST_CASE("extract_claims maps fixture lists to tuples") {
  cftest::TempDir tmp("ann");
  auto p1 = make_post("p1", "post one text");
  cftest::fixture_claims(tmp.path(), p1.text, {"A causes B", "C is banned"});
  MockChatProvider llm(tmp.path());
  ManualClock clock;
  AnnotateStats stats;
  auto claims = extract_claims({p1}, llm, fast_options(), clock, stats);
  REQUIRE(claims.size() == 2);
  for (const auto& c : claims) {
    CHECK(c.post_id == "p1");
    CHECK(c.claim_id == claim_id_of(c.post_id, c.claim_text));
    CHECK(validate_record(c).empty());
  }
  CHECK(stats.claims_extracted == 2);
}

TEST_CASE("a post yielding no claims still counts as processed") {
  cftest::TempDir tmp("ann-empty");
  auto p1 = make_post("p1", "nothing checkworthy here");
  cftest::fixture_claims(tmp.path(), p1.text, {});
  MockChatProvider llm(tmp.path());
  ManualClock clock;
  AnnotateStats stats;
  auto claims = extract_claims({p1}, llm, fast_options(), clock, stats);
  CHECK(claims.empty());
  CHECK(stats.posts_processed == 1);
  CHECK(stats.posts_failed == 0);
}

TEST_CASE("output multiset equals a fixture-join oracle over 100 posts") {
  cftest::TempDir tmp("ann-oracle");
  std::vector<Post> posts;
  std::map<std::string, std::vector<std::string>> fixture_map;
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    auto p = make_post("p" + std::to_string(i),
                       "post body number " + std::to_string(i));
    std::vector<std::string> claims;
    size_t n = rng.bounded(4);
    for (size_t k = 0; k < n; ++k) {
      claims.push_back("claim " + std::to_string(k) + " of post " +
                       std::to_string(i));
    }
    fixture_map[p.post_id] = claims;
    cftest::fixture_claims(tmp.path(), p.text, claims);
    posts.push_back(std::move(p));
  }
  MockChatProvider llm(tmp.path());
  ManualClock clock;
  AnnotateStats stats;
  auto claims = extract_claims(posts, llm, fast_options(), clock, stats);

  // Oracle: join fixtures directly.
  std::vector<ClaimTuple> expected;
  for (const auto& [post_id, texts] : fixture_map) {
    for (const auto& t : texts) {
      expected.push_back({claim_id_of(post_id, t), post_id, t});
    }
  }
  canonical_sort(expected);
  CHECK(claims == expected);
}

TEST_CASE("claim output is invariant under input permutation") {
  cftest::TempDir tmp("ann-perm");
  std::vector<Post> posts;
  for (int i = 0; i < 10; ++i) {
    auto p = make_post("p" + std::to_string(i), "text " + std::to_string(i));
    cftest::fixture_claims(tmp.path(), p.text,
                           {"claim for " + std::to_string(i)});
    posts.push_back(std::move(p));
  }
  MockChatProvider llm(tmp.path());
  ManualClock clock;
  AnnotateStats s1, s2;
  auto sorted = extract_claims(posts, llm, fast_options(), clock, s1);
  std::reverse(posts.begin(), posts.end());
  auto reversed = extract_claims(posts, llm, fast_options(), clock, s2);
  CHECK(sorted == reversed);
}

TEST_CASE("overlong claims are truncated at a sentence boundary") {
  cftest::TempDir tmp("ann-trunc");
  auto p1 = make_post("p1", "post with a long claim");
  std::string long_claim = "Short head sentence. ";
  while (long_claim.size() < 450) long_claim += "padding words here and more ";
  cftest::fixture_claims(tmp.path(), p1.text, {long_claim});
  MockChatProvider llm(tmp.path());
  ManualClock clock;
  AnnotateStats stats;
  auto claims = extract_claims({p1}, llm, fast_options(), clock, stats);
  REQUIRE(claims.size() == 1);
  CHECK(claims[0].claim_text == "Short head sentence.");
  CHECK(stats.claims_truncated == 1);
}

TEST_CASE("abort when too many posts fail") {
  cftest::TempDir tmp("ann-abort");
  // Fixtures only for 1 of 3 posts; the other two fail every attempt.
  auto p1 = make_post("p1", "has fixture");
  auto p2 = make_post("p2", "missing fixture one");
  auto p3 = make_post("p3", "missing fixture two");
  cftest::fixture_claims(tmp.path(), p1.text, {"ok"});
  MockChatProvider llm(tmp.path());
  ManualClock clock;
  AnnotateStats stats;
  CHECK_THROWS_AS(
      extract_claims({p1, p2, p3}, llm, fast_options(), clock, stats),
      StageError);
}

TEST_CASE("label_topics in candidate mode") {
  cftest::TempDir tmp("ann-topic");
  std::vector<std::string> candidates{"green card backlog",
                                      "zero-dollar shopping"};
  auto p1 = make_post("p1", "backlog talk");
  auto p2 = make_post("p2", "unrelated");
  cftest::fixture_labels(tmp.path(), p1.text, candidates, false,
                         {"Green Card Backlog"});
  cftest::fixture_labels(tmp.path(), p2.text, candidates, false,
                         {"vaccines"});
  MockChatProvider llm(tmp.path());
  ManualClock clock;
  AnnotateStats stats;
  auto tuples = label_topics({p1, p2}, candidates, false, llm, fast_options(),
                             clock, stats);
  REQUIRE(tuples.size() == 1);
  CHECK(tuples[0].post_id == "p1");
  CHECK(tuples[0].topic_label == "green card backlog");  // canonical form
  CHECK(stats.labels_rejected == 1);
}

TEST_CASE("label_topics free-form keeps novel labels") {
  cftest::TempDir tmp("ann-topic-free");
  auto p1 = make_post("p1", "vaccine post");
  cftest::fixture_labels(tmp.path(), p1.text, {}, true, {"vaccines"});
  MockChatProvider llm(tmp.path());
  ManualClock clock;
  AnnotateStats stats;
  auto tuples =
      label_topics({p1}, {}, true, llm, fast_options(), clock, stats);
  REQUIRE(tuples.size() == 1);
  CHECK(tuples[0].topic_label == "vaccines");
}

TEST_CASE("generate_relations produces one steered tuple per label") {
  cftest::TempDir tmp("ann-rel");
  ClaimTuple source{claim_id_of("p1", "X causes Y"), "p1", "X causes Y"};
  cftest::fixture_relation(tmp.path(), source.claim_text, Relation::Support,
                           "Z amplifies X");
  cftest::fixture_relation(tmp.path(), source.claim_text, Relation::Undermine,
                           "Y happens without X");
  MockChatProvider llm(tmp.path());
  ManualClock clock;
  AnnotateStats stats;
  auto result =
      generate_relations({source}, llm, fast_options(), clock, stats);
  REQUIRE(result.relations.size() == 2);
  std::set<Relation> labels;
  for (const auto& r : result.relations) {
    CHECK(r.source_claim_id == source.claim_id);
    labels.insert(r.relation);
  }
  CHECK(labels == std::set<Relation>{Relation::Support, Relation::Undermine});
  REQUIRE(result.targets.size() == 2);
  for (const auto& t : result.targets) {
    CHECK(t.post_id == kGeneratedPostId);
    CHECK(t.claim_id == claim_id_of(kGeneratedPostId, t.claim_text));
  }
}

TEST_CASE("a target equal to its source is dropped") {
  cftest::TempDir tmp("ann-self");
  ClaimTuple source{claim_id_of("p1", "X causes Y"), "p1", "X causes Y"};
  cftest::fixture_relation(tmp.path(), source.claim_text, Relation::Support,
                           "  X   causes Y ");  // same after normalization
  cftest::fixture_relation(tmp.path(), source.claim_text, Relation::Undermine,
                           "Y happens without X");
  MockChatProvider llm(tmp.path());
  ManualClock clock;
  AnnotateStats stats;
  auto result =
      generate_relations({source}, llm, fast_options(), clock, stats);
  CHECK(result.relations.size() == 1);
  CHECK(result.relations[0].relation == Relation::Undermine);
  CHECK(stats.relation_self_dropped == 1);
}

TEST_CASE("a response with the wrong steer label is rejected") {
  cftest::TempDir tmp("ann-steer");
  ClaimTuple source{claim_id_of("p1", "S"), "p1", "S"};
  cftest::fixture_relation(tmp.path(), source.claim_text, Relation::Support,
                           "T", "Undermine");  // mislabeled
  cftest::fixture_relation(tmp.path(), source.claim_text, Relation::Undermine,
                           "U");
  MockChatProvider llm(tmp.path());
  ManualClock clock;
  AnnotateStats stats;
  auto result =
      generate_relations({source}, llm, fast_options(), clock, stats);
  CHECK(result.relations.size() == 1);
  CHECK(stats.relation_steer_mismatch == 1);
}

TEST_CASE("relation label histogram matches a fixture-count oracle") {
  cftest::TempDir tmp("ann-hist");
  std::vector<ClaimTuple> sources;
  long expect_support = 0, expect_undermine = 0;
  Rng rng(23);
  for (int i = 0; i < 50; ++i) {
    std::string text = "source claim " + std::to_string(i);
    ClaimTuple c{claim_id_of("p" + std::to_string(i), text),
                 "p" + std::to_string(i), text};
    // Support fixtures for all, undermine fixtures for roughly half.
    cftest::fixture_relation(tmp.path(), text, Relation::Support,
                             "support of " + std::to_string(i));
    ++expect_support;
    if (rng.bounded(2) == 0) {
      cftest::fixture_relation(tmp.path(), text, Relation::Undermine,
                               "undermine of " + std::to_string(i));
      ++expect_undermine;
    }
    sources.push_back(std::move(c));
  }
  AnnotateOptions opt = fast_options();
  opt.abort_failure_rate = 0.9;  // missing undermine fixtures are failures
  MockChatProvider llm(tmp.path());
  ManualClock clock;
  AnnotateStats stats;
  auto result = generate_relations(sources, llm, opt, clock, stats);
  long got_support = 0, got_undermine = 0;
  for (const auto& r : result.relations) {
    (r.relation == Relation::Support ? got_support : got_undermine)++;
  }
  CHECK(got_support == expect_support);
  CHECK(got_undermine == expect_undermine);
}
