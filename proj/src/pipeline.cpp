#include "claimforge/pipeline.hpp"

#include <functional>

#include <nlohmann/json.hpp>

#include "claimforge/annotate.hpp"
#include "claimforge/digest.hpp"
#include "claimforge/errors.hpp"
#include "claimforge/prompts.hpp"
#include "claimforge/text.hpp"
#include "claimforge/validate.hpp"

namespace claimforge {

namespace fs = std::filesystem;

const char* to_string(Stage s) {
  switch (s) {
    case Stage::Keywords:
      return "keywords";
    case Stage::Queries:
      return "queries";
    case Stage::Fetch:
      return "fetch";
    case Stage::Annotate:
      return "annotate";
    case Stage::Cluster:
      return "cluster";
    case Stage::Split:
      return "split";
    case Stage::Emit:
      return "emit";
  }
  return "unknown";
}

ordered_json RunReport::to_json() const {
  ordered_json stage_list = ordered_json::array();
  for (const auto& s : stages) {
    stage_list.push_back(ordered_json{
        {"name", s.name}, {"key", s.key}, {"cache_hit", s.cache_hit}});
  }
  ordered_json calls = ordered_json::object();
  for (const auto& [name, n] : provider_calls) calls[name] = n;
  return ordered_json{{"stages", stage_list},
                      {"provider_calls", calls},
                      {"stage_stats", stage_stats}};
}

ProviderBundle make_providers(const RunConfig& cfg, Stage target) {
  ProviderBundle b;
  if (cfg.llm.kind == "mock") {
    if (cfg.llm.mock_dir.empty()) {
      throw ValidationError("llm.mock_dir (or --mock-dir) is required for "
                            "the mock provider");
    }
    b.llm = std::make_unique<MockChatProvider>(cfg.llm.mock_dir,
                                               cfg.llm.model);
  } else if (cfg.llm.kind == "http") {
    if (cfg.llm.endpoint.empty()) {
      throw ValidationError("llm.endpoint is required for the http provider");
    }
    b.llm = std::make_unique<HttpChatProvider>(cfg.llm.endpoint, cfg.llm.path,
                                               cfg.llm.model);
  } else {
    throw ValidationError("unknown llm provider kind: " + cfg.llm.kind);
  }

  if (cfg.embedding.kind == "hash") {
    b.embedding = std::make_unique<HashProjectionEmbedder>(
        cfg.embedding.dim, cfg.embedding.seed);
  } else if (cfg.embedding.kind == "http") {
    if (cfg.embedding.endpoint.empty() && target >= Stage::Cluster) {
      throw ValidationError(
          "embedding.endpoint is required for the http provider");
    }
    b.embedding = std::make_unique<HttpEmbeddingProvider>(
        cfg.embedding.endpoint, cfg.embedding.path, cfg.embedding.model,
        cfg.embedding.dim);
  } else {
    throw ValidationError("unknown embedding provider kind: " +
                          cfg.embedding.kind);
  }

  bool needs_source = target >= Stage::Fetch && cfg.external_posts.empty();
  if (cfg.source.kind == "local") {
    if (cfg.source.corpus_dir.empty() && needs_source) {
      throw ValidationError(
          "source.corpus_dir is required for the local source");
    }
    b.source = std::make_unique<LocalCorpusSource>(cfg.source.corpus_dir,
                                                   cfg.source.cfg.source_id);
  } else if (cfg.source.kind == "http") {
    if (cfg.source.endpoint.empty() && needs_source) {
      throw ValidationError("source.endpoint is required for the http source");
    }
    b.source = std::make_unique<HttpSearchSource>(
        cfg.source.endpoint, cfg.source.path, cfg.source.cfg.source_id);
  } else {
    throw ValidationError("unknown source kind: " + cfg.source.kind);
  }
  return b;
}

namespace {

ordered_json to_json(const QueryPlan& p) {
  ordered_json queries = ordered_json::array();
  for (const auto& q : p.queries) queries.push_back(to_json(q));
  return ordered_json{{"topic_id", p.topic_id},
                      {"requested_count", p.requested_count},
                      {"seed", p.seed},
                      {"truncated", p.truncated},
                      {"queries", queries}};
}

QueryPlan queryplan_from_json(const ordered_json& j) {
  QueryPlan p;
  p.topic_id = j.at("topic_id").get<std::string>();
  p.requested_count = j.at("requested_count").get<int>();
  p.seed = j.at("seed").get<uint64_t>();
  p.truncated = j.at("truncated").get<bool>();
  for (const auto& qj : j.at("queries")) {
    p.queries.push_back(query_from_json(qj));
  }
  return p;
}

ordered_json stats_json(const AnnotateStats& s) {
  return ordered_json{{"posts_processed", s.posts_processed},
                      {"posts_failed", s.posts_failed},
                      {"claims_extracted", s.claims_extracted},
                      {"claims_truncated", s.claims_truncated},
                      {"labels_assigned", s.labels_assigned},
                      {"labels_rejected", s.labels_rejected},
                      {"relation_calls", s.relation_calls},
                      {"relation_calls_failed", s.relation_calls_failed},
                      {"relation_steer_mismatch", s.relation_steer_mismatch},
                      {"relation_self_dropped", s.relation_self_dropped},
                      {"targets_registered", s.targets_registered}};
}

}  // namespace

Pipeline::Pipeline(RunConfig cfg, ProviderBundle providers, Clock& clock)
    : cfg_(std::move(cfg)),
      providers_(std::move(providers)),
      clock_(clock),
      work_(cfg_.work_dir),
      embed_cache_(fs::path(cfg_.work_dir) / "cache" / "embeddings") {}

fs::path Pipeline::stage_dir(Stage s, const std::string& key) const {
  return work_ / "cache" / to_string(s) / key;
}

bool Pipeline::run_stage(
    Stage s, const std::string& key, RunReport& report,
    const std::function<void()>& compute,
    const std::function<void(const fs::path&)>& save,
    const std::function<void(const fs::path&)>& load,
    const char* name_override) {
  const char* name = name_override != nullptr ? name_override : to_string(s);
  keys_[s] = key;
  fs::path dir = stage_dir(s, key);
  fs::path meta = dir / "stage.json";
  bool hit = fs::exists(meta);
  if (hit) {
    load(dir);
  } else {
    compute();
    fs::path tmp = dir;
    tmp += ".tmp";
    fs::remove_all(tmp);
    fs::create_directories(tmp);
    save(tmp);
    write_json_file_atomic(tmp / "stage.json",
                           ordered_json{{"stage", name}, {"key", key}});
    fs::remove_all(dir);  // stale partial entries
    fs::create_directories(dir.parent_path());
    fs::rename(tmp, dir);
  }
  report.stages.push_back({name, key, hit});
  return hit;
}

void Pipeline::stage_ingest(RunReport& report) {
  std::string key = sha256_hex128(frame_fields(
      {"ingest", file_digest(cfg_.external_posts),
       std::to_string(cfg_.source.cfg.min_tokens)}));
  run_stage(
      Stage::Fetch, key, report,
      [&] {
        posts_ = read_posts_jsonl(cfg_.external_posts);
        std::vector<std::string> violations;
        long dropped_short = 0;
        std::vector<Post> kept;
        for (auto& p : posts_) {
          p.text = normalize_text(p.text);
          if (token_count(p.text) <
              static_cast<size_t>(cfg_.source.cfg.min_tokens)) {
            ++dropped_short;
            continue;
          }
          for (const auto& v : validate_record(p)) {
            violations.push_back("post " + p.post_id + ": " + v);
          }
          kept.push_back(std::move(p));
        }
        if (!violations.empty()) {
          throw ValidationError("external posts file has invalid records",
                                violations);
        }
        posts_ = std::move(kept);
        canonical_sort(posts_);
        report.stage_stats["ingest"] = ordered_json{
            {"file", cfg_.external_posts},
            {"posts", static_cast<long>(posts_.size())},
            {"dropped_short", dropped_short}};
      },
      [&](const fs::path& dir) {
        write_posts_jsonl(dir / "posts.jsonl", posts_);
        write_json_file_atomic(dir / "ingest_report.json",
                               report.stage_stats["ingest"]);
      },
      [&](const fs::path& dir) {
        posts_ = read_posts_jsonl(dir / "posts.jsonl");
        report.stage_stats["ingest"] =
            read_json_file(dir / "ingest_report.json");
      },
      "ingest");
}

void Pipeline::stage_keywords(RunReport& report) {
  std::string topics_acc;
  for (const auto& t : cfg_.topics) {
    topics_acc += to_json(t).dump() + "\n";
  }
  std::string key = sha256_hex128(frame_fields(
      {"keywords", kPromptVersion, prompt_templates_digest(),
       providers_.llm->fingerprint(), std::to_string(cfg_.heavy_n),
       std::to_string(cfg_.lesser_n),
       std::to_string(cfg_.keyword_refill_attempts),
       std::to_string(cfg_.llm.temperature),
       std::to_string(cfg_.llm.max_output_tokens), topics_acc}));

  run_stage(
      Stage::Keywords, key, report,
      [&] {
        keyword_sets_.clear();
        for (const auto& topic : cfg_.topics) {
          keyword_sets_.push_back(generate_keywords(
              topic, cfg_.heavy_n, cfg_.lesser_n, *providers_.llm,
              cfg_.llm.retry, clock_, cfg_.keyword_refill_attempts));
        }
      },
      [&](const fs::path& dir) {
        ordered_json arr = ordered_json::array();
        for (const auto& ks : keyword_sets_) arr.push_back(to_json(ks));
        write_json_file_atomic(dir / "keywordsets.json", arr);
      },
      [&](const fs::path& dir) {
        keyword_sets_.clear();
        for (const auto& j : read_json_file(dir / "keywordsets.json")) {
          keyword_sets_.push_back(keywordset_from_json(j));
        }
      });
}

void Pipeline::stage_queries(RunReport& report) {
  std::string key = sha256_hex128(frame_fields(
      {"queries", keys_.at(Stage::Keywords),
       std::to_string(cfg_.query_count), std::to_string(cfg_.seed)}));

  run_stage(
      Stage::Queries, key, report,
      [&] {
        query_plans_.clear();
        for (const auto& ks : keyword_sets_) {
          uint64_t topic_seed =
              derive_seed(cfg_.seed, "queries:" + ks.topic_id);
          query_plans_.push_back(
              sample_queries(ks, cfg_.query_count, topic_seed));
        }
      },
      [&](const fs::path& dir) {
        ordered_json arr = ordered_json::array();
        for (const auto& p : query_plans_) arr.push_back(to_json(p));
        write_json_file_atomic(dir / "queryplans.json", arr);
      },
      [&](const fs::path& dir) {
        query_plans_.clear();
        for (const auto& j : read_json_file(dir / "queryplans.json")) {
          query_plans_.push_back(queryplan_from_json(j));
        }
      });
}

void Pipeline::stage_fetch(RunReport& report) {
  const SourceConfig& sc = cfg_.source.cfg;
  std::string key = sha256_hex128(frame_fields(
      {"fetch", keys_.at(Stage::Queries), providers_.source->fingerprint(),
       sc.source_id, std::to_string(sc.page_size),
       std::to_string(sc.max_posts_per_query),
       std::to_string(sc.requests_per_minute),
       std::to_string(sc.min_tokens)}));

  run_stage(
      Stage::Fetch, key, report,
      [&] {
        RateLimiter limiter(sc.requests_per_minute, clock_);
        FetchReport fetch_report;
        posts_ = fetch_posts(query_plans_, sc, *providers_.source, limiter,
                             clock_, fetch_report);
        canonical_sort(posts_);
        ordered_json failures = ordered_json::array();
        for (const auto& f : fetch_report.failures) {
          failures.push_back(
              ordered_json{{"query", f.query}, {"error", f.error}});
        }
        report.stage_stats["fetch"] =
            ordered_json{{"requests", fetch_report.requests},
                         {"raw_items", fetch_report.raw_items},
                         {"dropped_short", fetch_report.dropped_short},
                         {"deduplicated", fetch_report.deduplicated},
                         {"posts", static_cast<long>(posts_.size())},
                         {"failures", failures}};
      },
      [&](const fs::path& dir) {
        write_posts_jsonl(dir / "posts.jsonl", posts_);
        write_json_file_atomic(dir / "fetch_report.json",
                               report.stage_stats["fetch"]);
      },
      [&](const fs::path& dir) {
        posts_ = read_posts_jsonl(dir / "posts.jsonl");
        report.stage_stats["fetch"] = read_json_file(dir / "fetch_report.json");
      });
}

void Pipeline::stage_annotate(RunReport& report) {
  std::string labels_acc;
  for (const auto& l : cfg_.candidate_labels) labels_acc += l + "\n";
  std::string key = sha256_hex128(frame_fields(
      {"annotate", keys_.at(Stage::Fetch), kPromptVersion,
       prompt_templates_digest(), providers_.llm->fingerprint(), labels_acc,
       cfg_.allow_freeform ? "freeform" : "strict",
       std::to_string(cfg_.abort_failure_rate),
       std::to_string(cfg_.max_claim_chars),
       std::to_string(cfg_.llm.temperature),
       std::to_string(cfg_.llm.max_output_tokens)}));

  run_stage(
      Stage::Annotate, key, report,
      [&] {
        if (posts_.empty()) {
          throw StageError("annotate", "no posts to annotate; check the "
                                       "source and the query plan");
        }
        AnnotateOptions opt;
        opt.retry = cfg_.llm.retry;
        opt.temperature = cfg_.llm.temperature;
        opt.max_output_tokens = cfg_.llm.max_output_tokens;
        opt.abort_failure_rate = cfg_.abort_failure_rate;
        opt.max_claim_chars = cfg_.max_claim_chars;

        AnnotateStats stats;
        auto extracted =
            extract_claims(posts_, *providers_.llm, opt, clock_, stats);
        topic_tuples_ =
            label_topics(posts_, cfg_.candidate_labels, cfg_.allow_freeform,
                         *providers_.llm, opt, clock_, stats);
        relations_raw_.clear();
        claims_ = extracted;
        if (!extracted.empty()) {
          auto rel = generate_relations(extracted, *providers_.llm, opt,
                                        clock_, stats);
          relations_raw_ = std::move(rel.relations);
          claims_.insert(claims_.end(), rel.targets.begin(),
                         rel.targets.end());
        }
        canonical_sort(claims_);
        report.stage_stats["annotate"] = stats_json(stats);
      },
      [&](const fs::path& dir) {
        write_claims_jsonl(dir / "claims.jsonl", claims_);
        write_topics_jsonl(dir / "topics.jsonl", topic_tuples_);
        write_relations_jsonl(dir / "relations.jsonl", relations_raw_);
        write_json_file_atomic(dir / "annotate_report.json",
                               report.stage_stats["annotate"]);
      },
      [&](const fs::path& dir) {
        claims_ = read_claims_jsonl(dir / "claims.jsonl");
        topic_tuples_ = read_topics_jsonl(dir / "topics.jsonl");
        relations_raw_ = read_relations_jsonl(dir / "relations.jsonl");
        report.stage_stats["annotate"] =
            read_json_file(dir / "annotate_report.json");
      });
}

void Pipeline::stage_cluster(RunReport& report) {
  std::string key = sha256_hex128(frame_fields(
      {"cluster", keys_.at(Stage::Annotate),
       providers_.embedding->fingerprint(), std::to_string(cfg_.tau),
       "medoid"}));

  run_stage(
      Stage::Cluster, key, report,
      [&] {
        if (claims_.empty()) {
          throw StageError("cluster", "no claims to cluster");
        }
        std::vector<std::string> ids;
        std::vector<std::string> texts;
        ids.reserve(claims_.size());
        for (const auto& c : claims_) {
          ids.push_back(c.claim_id);
          texts.push_back(c.claim_text);
        }
        auto vectors = embed_all(texts, *providers_.embedding, &embed_cache_,
                                 cfg_.embedding.retry, clock_);
        ClusterConfig cc;
        cc.tau = cfg_.tau;
        assignment_ = cluster(ids, vectors, cc);
        RewriteStats stats;
        relations_ = rewrite_relations(relations_raw_, assignment_, stats);
        report.stage_stats["cluster"] = ordered_json{
            {"claims", static_cast<long>(claims_.size())},
            {"clusters", static_cast<long>(assignment_.cluster_count())},
            {"relations_in", static_cast<long>(relations_raw_.size())},
            {"relations_out", static_cast<long>(relations_.size())},
            {"self_dropped", stats.self_dropped},
            {"duplicates_dropped", stats.duplicates_dropped},
            {"conflict_pairs", stats.conflict_pairs},
            {"conflict_dropped", stats.conflict_dropped}};
      },
      [&](const fs::path& dir) {
        write_json_file_atomic(dir / "assignment.json", to_json(assignment_));
        write_relations_jsonl(dir / "relations.jsonl", relations_);
        write_json_file_atomic(dir / "cluster_report.json",
                               report.stage_stats["cluster"]);
      },
      [&](const fs::path& dir) {
        assignment_ = assignment_from_json(read_json_file(dir /
                                                          "assignment.json"));
        relations_ = read_relations_jsonl(dir / "relations.jsonl");
        report.stage_stats["cluster"] =
            read_json_file(dir / "cluster_report.json");
      });
}

void Pipeline::stage_split(RunReport& report) {
  std::string props = std::to_string(cfg_.proportions.p[0]) + "," +
                      std::to_string(cfg_.proportions.p[1]) + "," +
                      std::to_string(cfg_.proportions.p[2]);
  std::string key = sha256_hex128(frame_fields(
      {"split", keys_.at(Stage::Cluster), props, std::to_string(cfg_.seed)}));

  run_stage(
      Stage::Split, key, report,
      [&] {
        split_ = split_dataset(posts_, claims_, topic_tuples_, relations_,
                               assignment_, cfg_.proportions,
                               derive_seed(cfg_.seed, "split"));
        report.stage_stats["split"] = ordered_json{
            {"groups", static_cast<long>(split_.stats.group_count)},
            {"groups_per_split",
             {split_.stats.groups_per_split[0],
              split_.stats.groups_per_split[1],
              split_.stats.groups_per_split[2]}},
            {"cross_split_relations_dropped",
             split_.stats.cross_split_relations_dropped}};
      },
      [&](const fs::path& dir) {
        for (int s = 0; s < 3; ++s) {
          fs::path d = dir / kSplitNames[s];
          write_posts_jsonl(d / "posts.jsonl", split_.bundles[s].posts);
          write_claims_jsonl(d / "claims.jsonl", split_.bundles[s].claims);
          write_topics_jsonl(d / "topics.jsonl", split_.bundles[s].topics);
          write_relations_jsonl(d / "relations.jsonl",
                                split_.bundles[s].relations);
        }
        write_json_file_atomic(dir / "split_report.json",
                               report.stage_stats["split"]);
      },
      [&](const fs::path& dir) {
        for (int s = 0; s < 3; ++s) {
          fs::path d = dir / kSplitNames[s];
          split_.bundles[s].posts = read_posts_jsonl(d / "posts.jsonl");
          split_.bundles[s].claims = read_claims_jsonl(d / "claims.jsonl");
          split_.bundles[s].topics = read_topics_jsonl(d / "topics.jsonl");
          split_.bundles[s].relations =
              read_relations_jsonl(d / "relations.jsonl");
        }
        report.stage_stats["split"] = read_json_file(dir /
                                                     "split_report.json");
      });
}

void Pipeline::stage_emit(RunReport& report) {
  std::string key = sha256_hex128(
      frame_fields({"emit", keys_.at(Stage::Split), "schema-v1"}));

  ManifestInfo info;
  info.seed = cfg_.seed;
  info.llm = {providers_.llm->kind(), providers_.llm->model()};
  info.embedding = {providers_.embedding->kind(),
                    providers_.embedding->model()};
  info.source = cfg_.external_posts.empty()
                    ? ProviderInfo{cfg_.source.kind,
                                   providers_.source->source_id()}
                    : ProviderInfo{"posts_file", cfg_.external_posts};
  info.prompt_version = kPromptVersion;
  info.prompt_digest = prompt_templates_digest();
  info.topics = cfg_.topics;
  info.tau = cfg_.tau;
  info.proportions = cfg_.proportions.p;

  fs::path staging = work_ / "emit-staging";
  run_stage(
      Stage::Emit, key, report,
      [&] {
        fs::remove_all(staging);
        manifest_ = emit_dataset(split_, staging, info);
      },
      [&](const fs::path& dir) { fs::rename(staging, dir / "dataset"); },
      [&](const fs::path& dir) {
        manifest_ = load_manifest(dir / "dataset");
      });

  // Materialize the cached dataset into out_dir on every run.
  fs::path src = stage_dir(Stage::Emit, key) / "dataset";
  fs::path dst = cfg_.out_dir;
  for (const char* split_name : kSplitNames) {
    fs::remove_all(dst / split_name);
  }
  std::error_code ec;
  fs::remove(dst / "manifest.json", ec);
  fs::create_directories(dst);
  fs::copy(src, dst,
           fs::copy_options::recursive | fs::copy_options::overwrite_existing);
}

RunReport Pipeline::run(Stage target) {
  long llm0 = providers_.llm->call_count();
  long embed0 = providers_.embedding->call_count();
  long source0 = providers_.source->call_count();

  RunReport report;
  if (!cfg_.external_posts.empty()) {
    stage_ingest(report);
  } else {
    stage_keywords(report);
    if (target >= Stage::Queries) stage_queries(report);
    if (target >= Stage::Fetch) stage_fetch(report);
  }
  if (target >= Stage::Annotate) stage_annotate(report);
  if (target >= Stage::Cluster) stage_cluster(report);
  if (target >= Stage::Split) stage_split(report);
  if (target >= Stage::Emit) stage_emit(report);

  report.provider_calls["llm"] = providers_.llm->call_count() - llm0;
  report.provider_calls["embedding"] =
      providers_.embedding->call_count() - embed0;
  report.provider_calls["source"] = providers_.source->call_count() - source0;
  return report;
}

}  // namespace claimforge
