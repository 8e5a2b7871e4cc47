#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "claimforge/cluster.hpp"
#include "claimforge/config.hpp"
#include "claimforge/embed.hpp"
#include "claimforge/emit.hpp"
#include "claimforge/keywords.hpp"
#include "claimforge/llm.hpp"
#include "claimforge/source.hpp"
#include "claimforge/split.hpp"

namespace claimforge {

enum class Stage {
  Keywords = 0,
  Queries,
  Fetch,
  Annotate,
  Cluster,
  Split,
  Emit
};

const char* to_string(Stage s);

struct StageOutcome {
  std::string name;
  std::string key;  // content digest of (inputs, config slice, parents)
  bool cache_hit = false;
};

struct RunReport {
  std::vector<StageOutcome> stages;
  std::map<std::string, long> provider_calls;  // llm / embedding / source
  ordered_json stage_stats = ordered_json::object();

  ordered_json to_json() const;
};

struct ProviderBundle {
  std::unique_ptr<ChatProvider> llm;
  std::unique_ptr<EmbeddingProvider> embedding;
  std::unique_ptr<SearchSource> source;
};

// Builds providers from the config sections. Throws ValidationError for
// unknown kinds, and for missing provider inputs (mock fixture dir, corpus
// dir, endpoints) that any stage up to `target` will need.
ProviderBundle make_providers(const RunConfig& cfg,
                              Stage target = Stage::Emit);

// Staged execution with content-addressed checkpoints under
// work_dir/cache/<stage>/<key>/. A stage key digests its config slice, its
// direct inputs and its parents' keys, so any upstream change recomputes
// exactly the downstream stages. Reruns with unchanged inputs load every
// stage from cache and make zero provider calls.
class Pipeline {
 public:
  Pipeline(RunConfig cfg, ProviderBundle providers, Clock& clock);

  RunReport run(Stage target);

  // In-memory outputs of the most recent run (through the target stage).
  const std::vector<KeywordSet>& keyword_sets() const { return keyword_sets_; }
  const std::vector<QueryPlan>& query_plans() const { return query_plans_; }
  const std::vector<Post>& posts() const { return posts_; }
  const std::vector<ClaimTuple>& claims() const { return claims_; }
  const std::vector<TopicTuple>& topic_tuples() const { return topic_tuples_; }
  const ClusterAssignment& assignment() const { return assignment_; }
  const std::vector<RelationTuple>& relations() const { return relations_; }
  const DatasetManifest& manifest() const { return manifest_; }

 private:
  std::filesystem::path stage_dir(Stage s, const std::string& key) const;
  // Returns true on cache hit. `save` must write the stage outputs into the
  // directory it is given; `load` restores them from a prior run.
  bool run_stage(Stage s, const std::string& key, RunReport& report,
                 const std::function<void()>& compute,
                 const std::function<void(const std::filesystem::path&)>& save,
                 const std::function<void(const std::filesystem::path&)>& load,
                 const char* name_override = nullptr);

  // External posts.jsonl replacing the selection stages (annotation can run
  // over datasets the pipeline did not select itself).
  void stage_ingest(RunReport& report);
  void stage_keywords(RunReport& report);
  void stage_queries(RunReport& report);
  void stage_fetch(RunReport& report);
  void stage_annotate(RunReport& report);
  void stage_cluster(RunReport& report);
  void stage_split(RunReport& report);
  void stage_emit(RunReport& report);

  RunConfig cfg_;
  ProviderBundle providers_;
  Clock& clock_;
  std::filesystem::path work_;
  EmbeddingCache embed_cache_;

  std::map<Stage, std::string> keys_;

  std::vector<KeywordSet> keyword_sets_;
  std::vector<QueryPlan> query_plans_;
  std::vector<Post> posts_;
  std::vector<ClaimTuple> claims_;  // extracted + generated targets
  std::vector<TopicTuple> topic_tuples_;
  std::vector<RelationTuple> relations_raw_;
  ClusterAssignment assignment_;
  std::vector<RelationTuple> relations_;
  SplitResult split_;
  DatasetManifest manifest_;
};

}  // namespace claimforge
