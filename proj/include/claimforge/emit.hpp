#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "claimforge/split.hpp"
#include "claimforge/types.hpp"

namespace claimforge {

// Run facts the manifest records besides counts and digests.
struct ManifestInfo {
  uint64_t seed = 0;
  ProviderInfo llm;
  ProviderInfo embedding;
  ProviderInfo source;
  std::string prompt_version;
  std::string prompt_digest;
  std::vector<Topic> topics;
  double tau = 0.95;
  std::array<double, 3> proportions{0.8, 0.1, 0.1};
};

// Writes out_dir/{train,dev,test}/{posts,claims,topics,relations}.jsonl and
// out_dir/manifest.json. Records are emitted in canonical sort order; each
// file is written to a temp name and renamed; on failure every file written
// so far is removed. Returns the manifest (counts + digests included).
DatasetManifest emit_dataset(const SplitResult& split,
                             const std::filesystem::path& out_dir,
                             const ManifestInfo& info);

DatasetManifest load_manifest(const std::filesystem::path& dataset_dir);

// Full dataset check: manifest digests and counts, per-record invariants,
// per-split referential integrity, cross-split leakage, closed relation
// labels. Returns every violation found.
std::vector<std::string> verify_dataset(
    const std::filesystem::path& dataset_dir);

}  // namespace claimforge
