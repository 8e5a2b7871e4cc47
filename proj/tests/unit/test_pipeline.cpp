#include <doctest.h>

#include <set>

#include "claimforge/config.hpp"
#include "claimforge/emit.hpp"
#include "claimforge/pipeline.hpp"
#include "support/test_support.hpp"

using namespace claimforge;

namespace {

struct PipelineEnv {
  cftest::TempDir root{"pipe"};
  cftest::PipelineFixture fixture;
  RunConfig config;

  explicit PipelineEnv(int n_topics, uint64_t seed = 7, double tau = 0.95) {
    fixture = cftest::build_pipeline_fixture(root.path() / "corpus",
                                             root.path() / "mock", n_topics);
    auto doc = cftest::pipeline_fixture_config(
        fixture, root.path() / "corpus", root.path() / "mock",
        root.path() / "out", root.path() / "work", seed, tau);
    auto loaded = validate_config(ordered_json::parse(doc.dump()));
    REQUIRE(loaded.ok());
    config = loaded.config;
  }

  RunReport run(Stage target = Stage::Emit) {
    Pipeline p(config, make_providers(config), clock_);
    return p.run(target);
  }

 private:
  SystemClock clock_;
};

long total_calls(const RunReport& r) {
  long n = 0;
  for (const auto& [name, c] : r.provider_calls) n += c;
  return n;
}

}  // namespace

TEST_CASE("full pipeline over fixtures emits a valid deterministic dataset") {
  PipelineEnv env(2);
  auto report = env.run();
  CHECK(report.stages.size() == 7);
  for (const auto& s : report.stages) CHECK(!s.cache_hit);
  CHECK(report.provider_calls.at("llm") > 0);
  CHECK(report.provider_calls.at("source") > 0);
  CHECK(report.provider_calls.at("embedding") > 0);

  // Schema-valid output.
  auto violations = verify_dataset(env.config.out_dir);
  for (const auto& v : violations) MESSAGE(v);
  CHECK(violations.empty());

  // Both relation labels present in the emitted dataset.
  std::set<Relation> labels;
  size_t relation_count = 0;
  for (const char* split : kSplitNames) {
    for (const auto& r : read_relations_jsonl(
             std::filesystem::path(env.config.out_dir) / split /
             "relations.jsonl")) {
      labels.insert(r.relation);
      ++relation_count;
    }
  }
  CHECK(relation_count > 0);
  CHECK(labels == std::set<Relation>{Relation::Support, Relation::Undermine});

  // Reworded duplicates: the shared claim text appears under two posts but
  // lands in one cluster, so the cluster count is below the claim count.
  auto manifest = load_manifest(env.config.out_dir);
  CHECK(manifest.tau == 0.95);
  CHECK(manifest.llm.kind == "mock");
}

TEST_CASE("two consecutive runs produce byte-identical output trees") {
  PipelineEnv env(2);
  env.run();
  auto first = cftest::dir_digests(env.config.out_dir);

  // Fresh out dir, same work dir (cache persists).
  std::filesystem::remove_all(env.config.out_dir);
  env.run();
  auto second = cftest::dir_digests(env.config.out_dir);
  CHECK(first == second);

  // And a completely cold rerun (new work dir) is still identical.
  env.config.work_dir = (env.config.out_dir + ".work2");
  std::filesystem::remove_all(env.config.out_dir);
  env.run();
  CHECK(cftest::dir_digests(env.config.out_dir) == first);
}

TEST_CASE("immediate rerun is all cache hits with zero provider calls") {
  PipelineEnv env(2);
  auto first = env.run();
  CHECK(total_calls(first) > 0);

  auto second = env.run();
  for (const auto& s : second.stages) CHECK(s.cache_hit);
  CHECK(total_calls(second) == 0);
}

TEST_CASE("changing only tau recomputes exactly cluster, split and emit") {
  PipelineEnv env(2);
  env.run();

  env.config.tau = 0.9;
  auto report = env.run();
  std::map<std::string, bool> hit;
  for (const auto& s : report.stages) hit[s.name] = s.cache_hit;
  CHECK(hit.at("keywords"));
  CHECK(hit.at("queries"));
  CHECK(hit.at("fetch"));
  CHECK(hit.at("annotate"));
  CHECK(!hit.at("cluster"));
  CHECK(!hit.at("split"));
  CHECK(!hit.at("emit"));
  // Embeddings come from the warm disk cache: no provider calls at all.
  CHECK(report.provider_calls.at("llm") == 0);
  CHECK(report.provider_calls.at("source") == 0);
  CHECK(report.provider_calls.at("embedding") == 0);
}

TEST_CASE("cache-hit outputs equal a fresh recomputation") {
  PipelineEnv env(1);
  env.run();
  auto cached = cftest::dir_digests(env.config.out_dir);

  // Cold run in a separate work/out dir from the same fixtures.
  env.config.work_dir = env.config.work_dir + "-cold";
  env.config.out_dir = env.config.out_dir + "-cold";
  auto report = env.run();
  for (const auto& s : report.stages) CHECK(!s.cache_hit);
  CHECK(cftest::dir_digests(env.config.out_dir) == cached);
}

TEST_CASE("partial stage targets stop early") {
  PipelineEnv env(1);
  auto report = env.run(Stage::Fetch);
  CHECK(report.stages.size() == 3);
  CHECK(report.stages.back().name == "fetch");
  CHECK(report.provider_calls.at("embedding") == 0);
}

TEST_CASE("annotation accepts an externally supplied posts.jsonl") {
  PipelineEnv env(1);
  SystemClock clock;
  // Produce a canonical posts file with one normal pipeline run.
  Pipeline producer(env.config, make_providers(env.config), clock);
  producer.run(Stage::Fetch);
  auto posts = producer.posts();
  REQUIRE(!posts.empty());
  auto posts_path = std::filesystem::path(env.config.work_dir) /
                    "external_posts.jsonl";
  write_posts_jsonl(posts_path, posts);

  // A fresh config: no topics, no corpus, just the posts file.
  RunConfig external = env.config;
  external.topics.clear();
  external.external_posts = posts_path.string();
  external.source.corpus_dir.clear();
  external.work_dir = env.config.work_dir + "-ext";
  external.out_dir = env.config.out_dir + "-ext";
  {
    auto echo = validate_config(to_json(external));
    REQUIRE(echo.ok());
  }
  SystemClock clock;
  Pipeline p(external, make_providers(external), clock);
  auto report = p.run(Stage::Emit);

  CHECK(report.stages.front().name == "ingest");
  CHECK(report.stages.size() == 5);  // ingest, annotate, cluster, split, emit
  CHECK(report.provider_calls.at("source") == 0);
  CHECK(report.provider_calls.at("llm") > 0);
  auto violations = verify_dataset(external.out_dir);
  for (const auto& v : violations) MESSAGE(v);
  CHECK(violations.empty());
  auto manifest = load_manifest(external.out_dir);
  CHECK(manifest.source.kind == "posts_file");
}
