#pragma once

#include <string>
#include <vector>

#include "claimforge/types.hpp"

namespace claimforge {

// Per-record invariant checks. Violations are data, not errors: every
// problem is reported, not just the first. Empty result means ok.
std::vector<std::string> validate_record(const Topic& t);
std::vector<std::string> validate_record(const KeywordSet& ks);
std::vector<std::string> validate_record(const Query& q,
                                         const KeywordSet* ks = nullptr);
std::vector<std::string> validate_record(const Post& p);
std::vector<std::string> validate_record(const ClaimTuple& c);
std::vector<std::string> validate_record(const TopicTuple& t);
std::vector<std::string> validate_record(const RelationTuple& r);

// Cross-table checks over one completed bundle: id uniqueness, referential
// integrity (the "generated" sentinel post id is exempt), claim id
// consistency with claim_id_of.
struct DatasetTables {
  std::vector<Post> posts;
  std::vector<ClaimTuple> claims;
  std::vector<TopicTuple> topics;
  std::vector<RelationTuple> relations;
};
std::vector<std::string> validate_tables(const DatasetTables& t);

}  // namespace claimforge
