#include "claimforge/split.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "claimforge/errors.hpp"
#include "claimforge/records.hpp"
#include "claimforge/rng.hpp"

namespace claimforge {

std::array<size_t, 3> apportion(size_t total,
                                const std::array<double, 3>& proportions) {
  std::array<size_t, 3> counts{0, 0, 0};
  std::array<double, 3> remainders{0, 0, 0};
  size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    double quota = static_cast<double>(total) * proportions[i];
    counts[i] = static_cast<size_t>(std::floor(quota));
    remainders[i] = quota - std::floor(quota);
    assigned += counts[i];
  }
  // Leftover seats go to the largest remainders; ties to the earlier split.
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return remainders[a] > remainders[b]; });
  for (size_t k = 0; assigned < total; ++k) {
    ++counts[order[k % 3]];
    ++assigned;
  }
  return counts;
}

SplitResult split_dataset(const std::vector<Post>& posts,
                          const std::vector<ClaimTuple>& claims,
                          const std::vector<TopicTuple>& topics,
                          const std::vector<RelationTuple>& relations,
                          const ClusterAssignment& assignment,
                          const SplitProportions& proportions, uint64_t seed) {
  std::vector<std::string> violations;
  double sum = 0;
  for (double p : proportions.p) {
    if (p < 0) violations.push_back("split proportion is negative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    violations.push_back("proportions must sum to 1");
  }
  if (!violations.empty()) {
    throw ValidationError("invalid split proportions", violations);
  }
  for (const auto& c : claims) {
    if (assignment.cluster_of.find(c.claim_id) ==
        assignment.cluster_of.end()) {
      throw ValidationError("split: claim not in cluster assignment: " +
                            c.claim_id);
    }
  }

  const size_t n_clusters = assignment.cluster_count();

  // Fuse clusters that share a post into one assignment group.
  std::vector<size_t> group(n_clusters);
  std::iota(group.begin(), group.end(), size_t{0});
  std::function<size_t(size_t)> find = [&](size_t x) {
    while (group[x] != x) {
      group[x] = group[group[x]];
      x = group[x];
    }
    return x;
  };
  auto unite = [&](size_t a, size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) group[std::max(a, b)] = std::min(a, b);
  };
  std::unordered_map<std::string, size_t> first_cluster_of_post;
  for (const auto& c : claims) {
    if (c.post_id == kGeneratedPostId) continue;
    size_t cl = static_cast<size_t>(assignment.cluster_of.at(c.claim_id));
    auto [it, inserted] = first_cluster_of_post.try_emplace(c.post_id, cl);
    if (!inserted) unite(it->second, cl);
  }

  std::map<size_t, std::vector<size_t>> groups;  // root -> clusters
  for (size_t c = 0; c < n_clusters; ++c) groups[find(c)].push_back(c);

  int positive_splits = 0;
  for (double p : proportions.p) {
    if (p > 0) ++positive_splits;
  }
  if (groups.size() < static_cast<size_t>(positive_splits)) {
    throw ValidationError(
        "fewer assignment groups (" + std::to_string(groups.size()) +
        ") than splits with positive proportion (" +
        std::to_string(positive_splits) + ")");
  }

  // Deterministic seeded shuffle of the group list, then contiguous
  // assignment per largest-remainder counts.
  std::vector<size_t> roots;
  roots.reserve(groups.size());
  for (const auto& [root, _] : groups) roots.push_back(root);
  Rng rng(seed);
  rng.shuffle(roots);

  SplitResult result;
  result.stats.group_count = groups.size();
  auto counts = apportion(roots.size(), proportions.p);
  result.stats.groups_per_split = counts;

  std::vector<int> split_of_cluster(n_clusters, -1);
  size_t cursor = 0;
  for (int s = 0; s < 3; ++s) {
    for (size_t k = 0; k < counts[s]; ++k, ++cursor) {
      for (size_t cl : groups.at(roots[cursor])) {
        split_of_cluster[cl] = s;
      }
    }
  }

  auto split_of_claim = [&](const std::string& claim_id) {
    return split_of_cluster[static_cast<size_t>(
        assignment.cluster_of.at(claim_id))];
  };

  // Posts with claims follow their group; claimless posts are apportioned
  // separately under the same proportions.
  std::unordered_map<std::string, int> split_of_post;
  for (const auto& c : claims) {
    if (c.post_id == kGeneratedPostId) continue;
    split_of_post[c.post_id] = split_of_claim(c.claim_id);
  }
  std::vector<const Post*> claimless;
  for (const auto& p : posts) {
    if (split_of_post.find(p.post_id) == split_of_post.end()) {
      claimless.push_back(&p);
    }
  }
  std::sort(claimless.begin(), claimless.end(),
            [](const Post* a, const Post* b) { return a->post_id < b->post_id; });
  {
    std::vector<size_t> idx(claimless.size());
    std::iota(idx.begin(), idx.end(), size_t{0});
    rng.shuffle(idx);
    auto extra = apportion(claimless.size(), proportions.p);
    size_t at = 0;
    for (int s = 0; s < 3; ++s) {
      for (size_t k = 0; k < extra[s]; ++k, ++at) {
        split_of_post[claimless[idx[at]]->post_id] = s;
      }
    }
  }

  for (const auto& p : posts) {
    result.bundles[static_cast<size_t>(split_of_post.at(p.post_id))]
        .posts.push_back(p);
  }
  for (const auto& c : claims) {
    result.bundles[static_cast<size_t>(split_of_claim(c.claim_id))]
        .claims.push_back(c);
  }
  for (const auto& t : topics) {
    auto it = split_of_post.find(t.post_id);
    if (it == split_of_post.end()) {
      throw ValidationError("split: topic tuple references unknown post " +
                            t.post_id);
    }
    result.bundles[static_cast<size_t>(it->second)].topics.push_back(t);
  }
  for (const auto& r : relations) {
    int s = split_of_claim(r.source_claim_id);
    int t = split_of_claim(r.target_claim_id);
    if (s != t) {
      ++result.stats.cross_split_relations_dropped;
      continue;
    }
    result.bundles[static_cast<size_t>(s)].relations.push_back(r);
  }

  for (auto& b : result.bundles) {
    canonical_sort(b.posts);
    canonical_sort(b.claims);
    canonical_sort(b.topics);
    canonical_sort(b.relations);
  }
  return result;
}

}  // namespace claimforge
