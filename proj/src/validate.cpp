#include "claimforge/validate.hpp"

#include <set>
#include <unordered_map>
#include <unordered_set>

#include "claimforge/digest.hpp"
#include "claimforge/text.hpp"

namespace claimforge {

namespace {

bool blank(const std::string& s) { return normalize_text(s).empty(); }

void check(std::vector<std::string>& out, bool ok, const std::string& msg) {
  if (!ok) out.push_back(msg);
}

}  // namespace

std::vector<std::string> validate_record(const Topic& t) {
  std::vector<std::string> v;
  check(v, !t.topic_id.empty(), "topic_id is empty");
  check(v, !blank(t.title), "title is empty");
  return v;
}

std::vector<std::string> validate_record(const KeywordSet& ks) {
  std::vector<std::string> v;
  check(v, !ks.topic_id.empty(), "topic_id is empty");
  check(v, !ks.heavy.empty(), "heavy group is empty");
  check(v, ks.lesser.size() >= 2, "lesser group has fewer than 2 terms");
  std::set<std::string> heavy_folded;
  for (const auto& k : ks.heavy) {
    check(v, !blank(k), "empty heavy keyword");
    std::string f = casefold(normalize_text(k));
    check(v, heavy_folded.insert(f).second, "duplicate heavy keyword: " + k);
  }
  std::set<std::string> lesser_folded;
  for (const auto& k : ks.lesser) {
    check(v, !blank(k), "empty lesser keyword");
    std::string f = casefold(normalize_text(k));
    check(v, lesser_folded.insert(f).second, "duplicate lesser keyword: " + k);
    check(v, heavy_folded.count(f) == 0,
          "keyword in both groups: " + k);
  }
  return v;
}

std::vector<std::string> validate_record(const Query& q,
                                         const KeywordSet* ks) {
  std::vector<std::string> v;
  check(v, !q.heavy_term.empty(), "heavy_term is empty");
  check(v, !q.lesser_terms[0].empty() && !q.lesser_terms[1].empty(),
        "lesser term is empty");
  check(v, q.lesser_terms[0] != q.lesser_terms[1],
        "lesser terms are not distinct");
  check(v, q.lesser_terms[0] <= q.lesser_terms[1],
        "lesser pair not in canonical order");
  std::string expect = q.heavy_term + " AND " + q.lesser_terms[0] + " AND " +
                       q.lesser_terms[1];
  check(v, q.rendered == expect, "rendered form mismatch: " + q.rendered);
  size_t seps = 0;
  for (size_t pos = 0; (pos = q.rendered.find(" AND ", pos)) !=
                       std::string::npos;
       pos += 5) {
    ++seps;
  }
  check(v, seps == 2, "rendered query must contain exactly two \" AND \"");
  if (ks != nullptr) {
    auto in = [](const std::vector<std::string>& xs, const std::string& x) {
      for (const auto& e : xs) {
        if (e == x) return true;
      }
      return false;
    };
    check(v, in(ks->heavy, q.heavy_term),
          "heavy_term not in keyword set: " + q.heavy_term);
    check(v, in(ks->lesser, q.lesser_terms[0]),
          "lesser term not in keyword set: " + q.lesser_terms[0]);
    check(v, in(ks->lesser, q.lesser_terms[1]),
          "lesser term not in keyword set: " + q.lesser_terms[1]);
  }
  return v;
}

std::vector<std::string> validate_record(const Post& p) {
  std::vector<std::string> v;
  check(v, !p.post_id.empty(), "post_id is empty");
  check(v, !p.source_id.empty(), "source_id is empty");
  check(v, !blank(p.text), "text is empty");
  check(v, p.text == normalize_text(p.text), "text is not normalized");
  check(v, !p.fetched_at.empty(), "fetched_at is empty");
  check(v, !p.topic_id.empty(), "topic_id is empty");
  return v;
}

std::vector<std::string> validate_record(const ClaimTuple& c) {
  std::vector<std::string> v;
  check(v, !c.claim_id.empty(), "claim_id is empty");
  check(v, !c.post_id.empty(), "post_id is empty");
  check(v, !blank(c.claim_text), "claim_text is empty");
  if (!c.post_id.empty() && !c.claim_text.empty()) {
    check(v, c.claim_id == claim_id_of(c.post_id, c.claim_text),
          "claim_id does not match claim_id_of(post_id, claim_text)");
  }
  return v;
}

std::vector<std::string> validate_record(const TopicTuple& t) {
  std::vector<std::string> v;
  check(v, !t.post_id.empty(), "post_id is empty");
  check(v, !blank(t.topic_label), "topic_label is empty");
  return v;
}

std::vector<std::string> validate_record(const RelationTuple& r) {
  std::vector<std::string> v;
  check(v, !r.source_claim_id.empty(), "source_claim_id is empty");
  check(v, !r.target_claim_id.empty(), "target_claim_id is empty");
  check(v, r.source_claim_id != r.target_claim_id,
        "self-relation: source equals target");
  // Relation is a closed enum by construction; raw labels are rejected at
  // parse time (see relation_from_json / parse_structured).
  return v;
}

std::vector<std::string> validate_tables(const DatasetTables& t) {
  std::vector<std::string> v;

  std::unordered_set<std::string> post_ids;
  std::unordered_set<std::string> content_hashes;
  for (const auto& p : t.posts) {
    for (const auto& m : validate_record(p)) {
      v.push_back("post " + p.post_id + ": " + m);
    }
    check(v, post_ids.insert(p.post_id).second,
          "duplicate post_id: " + p.post_id);
    check(v, content_hashes.insert(content_post_id(p.text)).second,
          "duplicate post content: " + p.post_id);
  }

  std::unordered_set<std::string> claim_ids;
  for (const auto& c : t.claims) {
    for (const auto& m : validate_record(c)) {
      v.push_back("claim " + c.claim_id + ": " + m);
    }
    check(v, claim_ids.insert(c.claim_id).second,
          "duplicate claim_id: " + c.claim_id);
    check(v,
          c.post_id == kGeneratedPostId || post_ids.count(c.post_id) > 0,
          "claim " + c.claim_id + ": dangling post_id " + c.post_id);
  }

  std::set<std::pair<std::string, std::string>> topic_pairs;
  for (const auto& tt : t.topics) {
    for (const auto& m : validate_record(tt)) {
      v.push_back("topic tuple (" + tt.post_id + ", " + tt.topic_label +
                  "): " + m);
    }
    check(v, post_ids.count(tt.post_id) > 0,
          "topic tuple: dangling post_id " + tt.post_id);
    check(v, topic_pairs.insert({tt.post_id, tt.topic_label}).second,
          "duplicate topic tuple (" + tt.post_id + ", " + tt.topic_label +
              ")");
  }

  for (const auto& r : t.relations) {
    for (const auto& m : validate_record(r)) {
      v.push_back("relation (" + r.source_claim_id + " -> " +
                  r.target_claim_id + "): " + m);
    }
    check(v, claim_ids.count(r.source_claim_id) > 0,
          "relation: dangling source claim " + r.source_claim_id);
    check(v, claim_ids.count(r.target_claim_id) > 0,
          "relation: dangling target claim " + r.target_claim_id);
  }

  return v;
}

}  // namespace claimforge
