#include "claimforge/types.hpp"

#include "claimforge/text.hpp"

namespace claimforge {

const char* to_string(Relation r) {
  return r == Relation::Support ? "Support" : "Undermine";
}

std::optional<Relation> relation_from_string(const std::string& s) {
  std::string folded = casefold(s);
  if (folded == "support") return Relation::Support;
  if (folded == "undermine") return Relation::Undermine;
  return std::nullopt;
}

}  // namespace claimforge
