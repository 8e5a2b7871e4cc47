// claimforge: topic -> synthetically labeled claim dataset, plus metric
// evaluation of retrieval/classification outputs.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "claimforge/config.hpp"
#include "claimforge/emit.hpp"
#include "claimforge/errors.hpp"
#include "claimforge/eval.hpp"
#include "claimforge/pipeline.hpp"
#include "claimforge/text.hpp"

namespace cf = claimforge;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitStage = 2;

struct CommonFlags {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::string mock_dir;
  std::string out_dir;
  std::string work_dir;
  std::string posts_file;
  std::string topic;  // ad-hoc single topic (keywords command)
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "Config file (JSON)");
  cmd->add_option("--seed", f.seed, "Run seed (overrides config)");
  cmd->add_option("--mock-dir", f.mock_dir,
                  "Mock LLM fixture directory (overrides config)");
  cmd->add_option("--posts", f.posts_file,
                  "Annotate this posts.jsonl instead of fetching");
  cmd->add_option("--out", f.out_dir, "Dataset output directory");
  cmd->add_option("--work", f.work_dir, "Work directory (cache, reports)");
}

cf::RunConfig resolve_config(const CommonFlags& f) {
  cf::ordered_json doc = cf::ordered_json::object();
  if (!f.config_path.empty()) {
    doc = cf::read_json_file(f.config_path);
  }
  if (!f.topic.empty()) {
    doc["topics"] = cf::ordered_json::array({f.topic});
  }
  if (!f.posts_file.empty()) {
    doc["posts_file"] = f.posts_file;
  }
  cf::ConfigLoad loaded = cf::validate_config(doc);
  if (f.seed) loaded.config.seed = *f.seed;
  if (!f.mock_dir.empty()) {
    loaded.config.llm.kind = "mock";
    loaded.config.llm.mock_dir = f.mock_dir;
  }
  if (!f.out_dir.empty()) loaded.config.out_dir = f.out_dir;
  if (!f.work_dir.empty()) loaded.config.work_dir = f.work_dir;
  if (!loaded.ok()) {
    throw cf::ValidationError("invalid configuration", loaded.violations);
  }
  return loaded.config;
}

int run_to_stage(const CommonFlags& flags, cf::Stage target) {
  cf::RunConfig cfg = resolve_config(flags);
  cf::SystemClock clock;
  cf::Pipeline pipeline(cfg, cf::make_providers(cfg, target), clock);
  cf::RunReport report = pipeline.run(target);
  cf::write_json_file_atomic(
      std::filesystem::path(cfg.work_dir) / "run_report.json",
      report.to_json());

  for (const auto& s : report.stages) {
    std::cout << s.name << ": " << (s.cache_hit ? "cache hit" : "computed")
              << "\n";
  }
  std::cout << "provider calls: llm=" << report.provider_calls.at("llm")
            << " embedding=" << report.provider_calls.at("embedding")
            << " source=" << report.provider_calls.at("source") << "\n";

  if (target == cf::Stage::Keywords) {
    for (const auto& ks : pipeline.keyword_sets()) {
      std::cout << cf::to_json(ks).dump(2) << "\n";
    }
  }
  if (target == cf::Stage::Emit) {
    std::cout << "dataset written to " << cfg.out_dir << "\n";
  }
  return kExitOk;
}

int run_validate(const std::string& dataset_dir) {
  auto violations = cf::verify_dataset(dataset_dir);
  if (violations.empty()) {
    std::cout << "ok: " << dataset_dir << "\n";
    return kExitOk;
  }
  for (const auto& v : violations) std::cout << "violation: " << v << "\n";
  return kExitValidation;
}

struct EvalMapFlags {
  std::string queries, candidates, qrels, ranking, report_path;
  int k = 20;
  int dim = 64;
  uint64_t embed_seed = 1;
  std::string embed_endpoint, embed_path = "/v1/embeddings", embed_model;
};

int run_eval_map(const EvalMapFlags& f) {
  cf::Qrels qrels = cf::load_qrels(f.queries, f.candidates, f.qrels);
  cf::Ranking ranking;
  if (!f.ranking.empty()) {
    ranking = cf::load_ranking(f.ranking);
  } else {
    std::unique_ptr<cf::EmbeddingProvider> provider;
    if (!f.embed_endpoint.empty()) {
      provider = std::make_unique<cf::HttpEmbeddingProvider>(
          f.embed_endpoint, f.embed_path, f.embed_model, f.dim);
    } else {
      provider =
          std::make_unique<cf::HashProjectionEmbedder>(f.dim, f.embed_seed);
    }
    cf::SystemClock clock;
    cf::RetryPolicy retry;
    ranking = cf::rank_by_embedding(qrels, *provider, nullptr, retry, clock);
  }
  cf::MapReport report = cf::map_at_k(ranking, qrels, f.k);
  cf::ordered_json doc = cf::to_json(report);
  if (!f.report_path.empty()) cf::write_json_file_atomic(f.report_path, doc);
  std::cout << doc.dump(2) << "\n";
  return kExitOk;
}

struct EvalF1Flags {
  std::string pred, gold, labels = "Support,Undermine", report_path;
};

int run_eval_f1(const EvalF1Flags& f) {
  std::vector<std::string> labels;
  size_t start = 0;
  for (;;) {
    size_t comma = f.labels.find(',', start);
    labels.push_back(f.labels.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  cf::F1Report report =
      cf::macro_f1(cf::load_labeled(f.pred), cf::load_labeled(f.gold), labels);
  cf::ordered_json doc = cf::to_json(report);
  if (!f.report_path.empty()) cf::write_json_file_atomic(f.report_path, doc);
  std::cout << doc.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"claimforge: synthetic claim dataset pipeline and evaluation "
               "harness"};
  app.require_subcommand(1);

  CommonFlags flags;

  auto* keywords = app.add_subcommand(
      "keywords", "Generate the two keyword groups for a topic");
  keywords->add_option("topic", flags.topic, "Topic title (ad hoc run)");
  add_common(keywords, flags);

  auto* queries =
      app.add_subcommand("queries", "Build sampled AND-queries per topic");
  add_common(queries, flags);
  auto* fetch = app.add_subcommand("fetch", "Retrieve posts for the queries");
  add_common(fetch, flags);
  auto* annotate = app.add_subcommand(
      "annotate", "Run claim/topic/relation annotation over fetched posts");
  add_common(annotate, flags);
  auto* cluster = app.add_subcommand(
      "cluster", "Embed claims and merge reworded duplicates");
  add_common(cluster, flags);
  auto* split = app.add_subcommand(
      "split", "Partition into train/dev/test without leakage");
  add_common(split, flags);
  auto* emit =
      app.add_subcommand("emit", "Write the dataset files and manifest");
  add_common(emit, flags);
  auto* pipeline =
      app.add_subcommand("pipeline", "Run every stage end to end");
  add_common(pipeline, flags);

  std::string dataset_dir;
  auto* validate = app.add_subcommand(
      "validate", "Check a dataset directory against its manifest");
  validate->add_option("dataset_dir", dataset_dir, "Dataset directory")
      ->required();

  auto* eval = app.add_subcommand("eval", "Score rankings or predictions");
  eval->require_subcommand(1);
  EvalMapFlags map_flags;
  auto* eval_map = eval->add_subcommand("map", "MAP@K over qrels");
  eval_map->add_option("--queries", map_flags.queries, "Queries file")
      ->required();
  eval_map->add_option("--candidates", map_flags.candidates,
                       "Candidates file")
      ->required();
  eval_map->add_option("--qrels", map_flags.qrels, "Relevance pairs file")
      ->required();
  eval_map->add_option("--ranking", map_flags.ranking,
                       "Precomputed ranking file (otherwise rank by "
                       "embedding)");
  eval_map->add_option("--k", map_flags.k, "Cutoff K (default 20)");
  eval_map->add_option("--dim", map_flags.dim, "Embedding dimension");
  eval_map->add_option("--embed-seed", map_flags.embed_seed,
                       "Hash embedder seed");
  eval_map->add_option("--embed-endpoint", map_flags.embed_endpoint,
                       "HTTP embedding endpoint");
  eval_map->add_option("--embed-model", map_flags.embed_model,
                       "HTTP embedding model name");
  eval_map->add_option("--report", map_flags.report_path,
                       "Write the JSON report here");

  EvalF1Flags f1_flags;
  auto* eval_f1 =
      eval->add_subcommand("f1", "Macro F1 over a closed label set");
  eval_f1->add_option("--pred", f1_flags.pred, "Predictions file")->required();
  eval_f1->add_option("--gold", f1_flags.gold, "Gold labels file")->required();
  eval_f1->add_option("--labels", f1_flags.labels,
                      "Comma-separated label set");
  eval_f1->add_option("--report", f1_flags.report_path,
                      "Write the JSON report here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (keywords->parsed()) return run_to_stage(flags, cf::Stage::Keywords);
    if (queries->parsed()) return run_to_stage(flags, cf::Stage::Queries);
    if (fetch->parsed()) return run_to_stage(flags, cf::Stage::Fetch);
    if (annotate->parsed()) return run_to_stage(flags, cf::Stage::Annotate);
    if (cluster->parsed()) return run_to_stage(flags, cf::Stage::Cluster);
    if (split->parsed()) return run_to_stage(flags, cf::Stage::Split);
    if (emit->parsed() || pipeline->parsed()) {
      return run_to_stage(flags, cf::Stage::Emit);
    }
    if (validate->parsed()) return run_validate(dataset_dir);
    if (eval->parsed()) {
      if (eval_map->parsed()) return run_eval_map(map_flags);
      if (eval_f1->parsed()) return run_eval_f1(f1_flags);
    }
  } catch (const cf::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    for (const auto& v : e.violations()) std::cerr << "  - " << v << "\n";
    return kExitValidation;
  } catch (const cf::StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (!e.detail().empty()) std::cerr << "  detail: " << e.detail() << "\n";
    return kExitStage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStage;
  }
  return kExitOk;
}
