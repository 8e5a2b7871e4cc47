#pragma once

#include <string>
#include <vector>

#include "claimforge/embed.hpp"
#include "claimforge/types.hpp"

namespace claimforge {

struct ClusterConfig {
  double tau = 0.95;  // similarity threshold; cosine over unit vectors
  std::string representative_rule = "medoid";
};

// Partition as connected components of the graph with an edge wherever
// cosine(u, v) > tau (strictly). Cluster ids are dense, assigned by
// smallest member index; representatives are medoids with ties broken by
// lexicographic claim id. Throws ValidationError on empty input, duplicate
// ids or a dimension mismatch.
ClusterAssignment cluster(const std::vector<std::string>& claim_ids,
                          const std::vector<EmbeddingVector>& embeddings,
                          const ClusterConfig& cfg);

// Medoid: the member maximizing summed cosine similarity to the rest of its
// cluster. Members are summed in claim-id order so the choice does not
// depend on input order.
std::string pick_representative(const std::vector<std::string>& member_ids,
                                const std::vector<EmbeddingVector>& members);

struct RewriteStats {
  long self_dropped = 0;
  long duplicates_dropped = 0;
  long conflict_pairs = 0;
  long conflict_dropped = 0;
};

// Replaces both ends of every relation by their cluster representatives.
// Relations that become self-relations are dropped; exact duplicates are
// collapsed; a (source, target) pair carrying both labels after rewriting
// is contradictory evidence, so both sides are dropped and counted.
std::vector<RelationTuple> rewrite_relations(
    const std::vector<RelationTuple>& relations,
    const ClusterAssignment& assignment, RewriteStats& stats);

}  // namespace claimforge
