#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "claimforge/types.hpp"

namespace claimforge {

struct SplitProportions {
  std::array<double, 3> p{0.8, 0.1, 0.1};  // train, dev, test
};

struct SplitBundle {
  std::vector<Post> posts;
  std::vector<ClaimTuple> claims;
  std::vector<TopicTuple> topics;
  std::vector<RelationTuple> relations;
};

struct SplitStats {
  size_t group_count = 0;  // units actually apportioned
  std::array<size_t, 3> groups_per_split{0, 0, 0};
  long cross_split_relations_dropped = 0;
};

struct SplitResult {
  std::array<SplitBundle, 3> bundles;  // train, dev, test
  SplitStats stats;
};

// Leakage-free split. The unit of assignment is the cluster; clusters that
// share a post (one post's claims can sit in several clusters) are fused
// into one assignment group so no post_id, claim_id or cluster_id ever
// spans two splits. Relations follow their source's cluster; relations
// whose target lands in another split are dropped and counted. Posts with
// no claims are apportioned separately under the same proportions.
// Deterministic under seed. Throws ValidationError when proportions are
// invalid or there are fewer groups than splits with positive proportion.
SplitResult split_dataset(const std::vector<Post>& posts,
                          const std::vector<ClaimTuple>& claims,
                          const std::vector<TopicTuple>& topics,
                          const std::vector<RelationTuple>& relations,
                          const ClusterAssignment& assignment,
                          const SplitProportions& proportions, uint64_t seed);

// Largest-remainder apportionment of `total` items over the proportions.
std::array<size_t, 3> apportion(size_t total,
                                const std::array<double, 3>& proportions);

}  // namespace claimforge
