#include "claimforge/emit.hpp"

#include <set>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "claimforge/digest.hpp"
#include "claimforge/errors.hpp"
#include "claimforge/records.hpp"
#include "claimforge/validate.hpp"

namespace claimforge {

namespace {

const char* kTupleFiles[4] = {"posts.jsonl", "claims.jsonl", "topics.jsonl",
                              "relations.jsonl"};

}  // namespace

DatasetManifest emit_dataset(const SplitResult& split,
                             const std::filesystem::path& out_dir,
                             const ManifestInfo& info) {
  DatasetManifest m;
  m.seed = info.seed;
  m.llm = info.llm;
  m.embedding = info.embedding;
  m.source = info.source;
  m.prompt_version = info.prompt_version;
  m.prompt_digest = info.prompt_digest;
  m.topics = info.topics;
  m.tau = info.tau;
  m.proportions = info.proportions;

  std::vector<std::filesystem::path> written;
  try {
    for (int s = 0; s < 3; ++s) {
      const SplitBundle& b = split.bundles[s];
      const std::string split_name = kSplitNames[s];
      std::filesystem::path dir = out_dir / split_name;

      SplitBundle sorted = b;
      canonical_sort(sorted.posts);
      canonical_sort(sorted.claims);
      canonical_sort(sorted.topics);
      canonical_sort(sorted.relations);

      write_posts_jsonl(dir / "posts.jsonl", sorted.posts);
      written.push_back(dir / "posts.jsonl");
      write_claims_jsonl(dir / "claims.jsonl", sorted.claims);
      written.push_back(dir / "claims.jsonl");
      write_topics_jsonl(dir / "topics.jsonl", sorted.topics);
      written.push_back(dir / "topics.jsonl");
      write_relations_jsonl(dir / "relations.jsonl", sorted.relations);
      written.push_back(dir / "relations.jsonl");

      m.counts[split_name]["posts"] = static_cast<long>(sorted.posts.size());
      m.counts[split_name]["claims"] = static_cast<long>(sorted.claims.size());
      m.counts[split_name]["topics"] = static_cast<long>(sorted.topics.size());
      m.counts[split_name]["relations"] =
          static_cast<long>(sorted.relations.size());

      for (const char* f : kTupleFiles) {
        m.files[split_name + std::string("/") + f] = file_digest(dir / f);
      }
    }
    write_json_file_atomic(out_dir / "manifest.json", to_json(m));
  } catch (...) {
    for (const auto& p : written) {
      std::error_code ec;
      std::filesystem::remove(p, ec);
    }
    throw;
  }
  return m;
}

DatasetManifest load_manifest(const std::filesystem::path& dataset_dir) {
  return manifest_from_json(read_json_file(dataset_dir / "manifest.json"));
}

std::vector<std::string> verify_dataset(
    const std::filesystem::path& dataset_dir) {
  std::vector<std::string> v;
  DatasetManifest m;
  try {
    m = load_manifest(dataset_dir);
  } catch (const std::exception& e) {
    return {std::string("manifest: ") + e.what()};
  }

  for (const auto& [rel_path, digest] : m.files) {
    auto path = dataset_dir / rel_path;
    if (!std::filesystem::exists(path)) {
      v.push_back("missing file: " + rel_path);
      continue;
    }
    if (file_digest(path) != digest) {
      v.push_back("digest mismatch: " + rel_path);
    }
  }

  std::unordered_set<std::string> post_ids_all;
  std::unordered_set<std::string> claim_ids_all;
  for (const char* split_name : kSplitNames) {
    std::filesystem::path dir = dataset_dir / split_name;
    DatasetTables t;
    try {
      t.posts = read_posts_jsonl(dir / "posts.jsonl");
      t.claims = read_claims_jsonl(dir / "claims.jsonl");
      t.topics = read_topics_jsonl(dir / "topics.jsonl");
      t.relations = read_relations_jsonl(dir / "relations.jsonl");
    } catch (const std::exception& e) {
      v.push_back(std::string(split_name) + ": " + e.what());
      continue;
    }

    auto expect = [&](const char* type, size_t actual) {
      auto it = m.counts.find(split_name);
      long want = it == m.counts.end() ? -1 : it->second.at(type);
      if (want != static_cast<long>(actual)) {
        v.push_back(std::string(split_name) + "/" + type + ": manifest says " +
                    std::to_string(want) + ", file has " +
                    std::to_string(actual));
      }
    };
    expect("posts", t.posts.size());
    expect("claims", t.claims.size());
    expect("topics", t.topics.size());
    expect("relations", t.relations.size());

    for (const auto& msg : validate_tables(t)) {
      v.push_back(std::string(split_name) + ": " + msg);
    }

    for (const auto& p : t.posts) {
      if (!post_ids_all.insert(p.post_id).second) {
        v.push_back("post spans splits: " + p.post_id);
      }
    }
    for (const auto& c : t.claims) {
      if (!claim_ids_all.insert(c.claim_id).second) {
        v.push_back("claim spans splits: " + c.claim_id);
      }
    }
  }
  return v;
}

}  // namespace claimforge
