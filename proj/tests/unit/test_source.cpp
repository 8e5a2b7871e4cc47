#include <doctest.h>

#include <set>

#include "claimforge/source.hpp"
#include "support/test_support.hpp"

using namespace claimforge;

namespace {

Query make_query(const std::string& h, const std::string& l1,
                 const std::string& l2) {
  Query q;
  q.topic_id = "t1";
  q.heavy_term = h;
  q.lesser_terms = {std::min(l1, l2), std::max(l1, l2)};
  q.rendered = h + " AND " + q.lesser_terms[0] + " AND " + q.lesser_terms[1];
  return q;
}

QueryPlan plan_of(std::vector<Query> queries) {
  QueryPlan p;
  p.topic_id = "t1";
  p.requested_count = static_cast<int>(queries.size());
  p.queries = std::move(queries);
  return p;
}

std::string corpus_line(const std::string& id, const std::string& text) {
  return cftest::json{{"id", id}, {"text", text}}.dump();
}

}  // namespace

TEST_CASE("rate limiter keeps any 60s window at or under the cap") {
  ManualClock clock;
  RateLimiter limiter(5, clock);
  for (int i = 0; i < 23; ++i) {
    limiter.acquire();
    clock.advance(700);
  }
  auto grants = limiter.grant_times();
  REQUIRE(grants.size() == 23);
  for (size_t i = 0; i < grants.size(); ++i) {
    int in_window = 0;
    for (size_t j = 0; j <= i; ++j) {
      if (grants[j] > grants[i] - 60'000) ++in_window;
    }
    CHECK(in_window <= 5);
  }
}

TEST_CASE("local corpus matches a query only when all three terms appear") {
  cftest::TempDir tmp("corpus");
  cftest::write_file(
      tmp.path() / "a.jsonl",
      corpus_line("r1", "the H1 term with L1 and L2 all present") + "\n" +
          corpus_line("r2", "only h1 and l1 here") + "\n" +
          corpus_line("r3", "H1 L2 L1 again, case differs") + "\n");
  LocalCorpusSource source(tmp.path(), "local");
  auto page = source.search(make_query("h1", "l1", "l2"), 10, "");
  REQUIRE(page.items.size() == 2);
  CHECK(page.items[0].id == "r1");
  CHECK(page.items[1].id == "r3");
  CHECK(page.next_token.empty());
}

TEST_CASE("local corpus match set equals a brute-force substring scan") {
  cftest::TempDir tmp("corpus-big");
  std::vector<std::string> vocab{"alpha", "beta",  "gamma", "delta",
                                 "epsil", "zeta",  "eta",   "theta"};
  std::vector<std::string> texts;
  std::string file_content;
  std::mt19937_64 eng(77);
  for (int i = 0; i < 1000; ++i) {
    std::string text = "post number " + std::to_string(i);
    for (const auto& w : vocab) {
      if (eng() % 3 == 0) text += " " + w;
    }
    texts.push_back(text);
    file_content += corpus_line("id" + std::to_string(i), text) + "\n";
  }
  cftest::write_file(tmp.path() / "posts.jsonl", file_content);

  auto q = make_query("alpha", "beta", "gamma");
  // Independent oracle: plain substring scan over the raw texts.
  std::set<std::string> oracle;
  for (int i = 0; i < 1000; ++i) {
    const std::string& t = texts[i];
    if (t.find("alpha") != std::string::npos &&
        t.find("beta") != std::string::npos &&
        t.find("gamma") != std::string::npos) {
      oracle.insert("id" + std::to_string(i));
    }
  }
  REQUIRE(!oracle.empty());

  LocalCorpusSource source(tmp.path(), "local");
  std::set<std::string> got;
  std::string token;
  for (;;) {
    auto page = source.search(q, 64, token);
    for (const auto& item : page.items) got.insert(item.id);
    if (page.next_token.empty()) break;
    token = page.next_token;
  }
  CHECK(got == oracle);
}

TEST_CASE("fetch_posts deduplicates identical bodies across queries") {
  cftest::TempDir tmp("corpus-dupe");
  cftest::write_file(
      tmp.path() / "a.jsonl",
      corpus_line("r1", "h1 l1 l2 and also l3 for the second query") + "\n");
  LocalCorpusSource source(tmp.path(), "local");
  SourceConfig cfg;
  cfg.retry = RetryPolicy{2, 1, 2.0};
  ManualClock clock;
  RateLimiter limiter(1000, clock);
  FetchReport report;
  auto plan = plan_of({make_query("h1", "l1", "l2"),
                       make_query("h1", "l1", "l3")});
  auto posts = fetch_posts({plan}, cfg, source, limiter, clock, report);
  REQUIRE(posts.size() == 1);
  CHECK(posts[0].query_ref == "h1 AND l1 AND l2");  // first query wins
  CHECK(report.deduplicated == 1);
}

TEST_CASE("caps and pagination: 120 matches, cap 50, page size 10") {
  std::vector<RawPost> corpus;
  for (int i = 0; i < 120; ++i) {
    corpus.push_back({"id" + std::to_string(i),
                      "match body " + std::to_string(i) + " h l1 l2", "", ""});
  }
  cftest::ScriptedSearchSource source(corpus);
  SourceConfig cfg;
  cfg.page_size = 10;
  cfg.max_posts_per_query = 50;
  cfg.retry = RetryPolicy{2, 1, 2.0};
  ManualClock clock;
  RateLimiter limiter(1000, clock);
  FetchReport report;
  auto posts = fetch_posts({plan_of({make_query("h", "l1", "l2")})}, cfg,
                           source, limiter, clock, report);
  CHECK(posts.size() == 50);
  // Counting oracle: ceil(50 / 10) pages at minimum.
  CHECK(report.requests >= 5);
  CHECK(source.call_count() == report.requests);
}

TEST_CASE("short posts are dropped at ingestion") {
  std::vector<RawPost> corpus{{"a", "too short", "", ""},
                              {"b", "this one is long enough", "", ""}};
  cftest::ScriptedSearchSource source(corpus);
  SourceConfig cfg;
  cfg.retry = RetryPolicy{2, 1, 2.0};
  ManualClock clock;
  RateLimiter limiter(1000, clock);
  FetchReport report;
  auto posts = fetch_posts({plan_of({make_query("x", "y", "z")})}, cfg, source,
                           limiter, clock, report);
  REQUIRE(posts.size() == 1);
  CHECK(posts[0].post_id == "b");
  CHECK(report.dropped_short == 1);
}

TEST_CASE("per-query transport failure is recorded and the run continues") {
  // Retry budget of 2: the first query burns both attempts, later queries
  // succeed.
  cftest::ScriptedSearchSource source(
      {{"a", "h l1 l2 body of sufficient length", "", ""}},
      /*fail_first_n=*/2);
  SourceConfig cfg;
  cfg.retry = RetryPolicy{2, 1, 2.0};
  ManualClock clock;
  RateLimiter limiter(1000, clock);
  FetchReport report;
  auto plan = plan_of({make_query("h", "l1", "l2"),
                       make_query("h", "l1", "l3")});
  auto posts = fetch_posts({plan}, cfg, source, limiter, clock, report);
  CHECK(posts.size() == 1);
  REQUIRE(report.failures.size() == 1);
  CHECK(report.failures[0].query == "h AND l1 AND l2");
}

TEST_CASE("fetch is reproducible with a deterministic source") {
  std::vector<RawPost> corpus;
  for (int i = 0; i < 30; ++i) {
    corpus.push_back({"id" + std::to_string(i),
                      "body " + std::to_string(i) + " with words", "",
                      std::to_string(1600000000 + i)});
  }
  SourceConfig cfg;
  cfg.retry = RetryPolicy{2, 1, 2.0};
  auto run = [&] {
    cftest::ScriptedSearchSource source(corpus);
    ManualClock clock;
    RateLimiter limiter(1000, clock);
    FetchReport report;
    return fetch_posts({plan_of({make_query("body", "with", "words")})}, cfg,
                       source, limiter, clock, report);
  };
  CHECK(run() == run());
}
