#include "claimforge/records.hpp"

#include <algorithm>
#include <fstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "claimforge/errors.hpp"

namespace claimforge {

namespace {

const ordered_json& require(const ordered_json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end()) {
    throw ValidationError(std::string("missing field: ") + field);
  }
  return *it;
}

std::string require_string(const ordered_json& j, const char* field) {
  const auto& v = require(j, field);
  if (!v.is_string()) {
    throw ValidationError(std::string("field is not a string: ") + field);
  }
  return v.get<std::string>();
}

std::vector<std::string> require_string_array(const ordered_json& j,
                                              const char* field) {
  const auto& v = require(j, field);
  if (!v.is_array()) {
    throw ValidationError(std::string("field is not an array: ") + field);
  }
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_string()) {
      throw ValidationError(std::string("non-string entry in: ") + field);
    }
    out.push_back(e.get<std::string>());
  }
  return out;
}

}  // namespace

ordered_json to_json(const Topic& t) {
  return ordered_json{{"topic_id", t.topic_id},
                      {"title", t.title},
                      {"description", t.description}};
}

ordered_json to_json(const KeywordSet& ks) {
  return ordered_json{
      {"topic_id", ks.topic_id}, {"heavy", ks.heavy}, {"lesser", ks.lesser}};
}

ordered_json to_json(const Query& q) {
  return ordered_json{{"topic_id", q.topic_id},
                      {"heavy_term", q.heavy_term},
                      {"lesser_terms", q.lesser_terms},
                      {"rendered", q.rendered}};
}

ordered_json to_json(const Post& p) {
  ordered_json j{{"post_id", p.post_id},
                 {"source_id", p.source_id},
                 {"text", p.text}};
  j["url"] = p.url.has_value() ? ordered_json(*p.url) : ordered_json(nullptr);
  j["fetched_at"] = p.fetched_at;
  j["query_ref"] = p.query_ref;
  j["topic_id"] = p.topic_id;
  return j;
}

ordered_json to_json(const ClaimTuple& c) {
  return ordered_json{{"claim_id", c.claim_id},
                      {"post_id", c.post_id},
                      {"claim_text", c.claim_text}};
}

ordered_json to_json(const TopicTuple& t) {
  return ordered_json{{"post_id", t.post_id}, {"topic_label", t.topic_label}};
}

ordered_json to_json(const RelationTuple& r) {
  return ordered_json{{"source_claim_id", r.source_claim_id},
                      {"target_claim_id", r.target_claim_id},
                      {"relation", to_string(r.relation)}};
}

ordered_json to_json(const ClusterAssignment& a) {
  ordered_json clusters = ordered_json::object();
  for (const auto& [claim_id, cluster_id] : a.cluster_of) {
    clusters[claim_id] = cluster_id;
  }
  return ordered_json{{"cluster_of", clusters},
                      {"representatives", a.representatives}};
}

ordered_json to_json(const DatasetManifest& m) {
  ordered_json topics = ordered_json::array();
  for (const auto& t : m.topics) topics.push_back(to_json(t));
  ordered_json counts = ordered_json::object();
  for (const auto& [split, per_type] : m.counts) {
    ordered_json row = ordered_json::object();
    for (const auto& [type, n] : per_type) row[type] = n;
    counts[split] = row;
  }
  ordered_json files = ordered_json::object();
  for (const auto& [path, digest] : m.files) files[path] = digest;
  return ordered_json{
      {"schema_version", m.schema_version},
      {"seed", m.seed},
      {"providers",
       ordered_json{
           {"llm", {{"kind", m.llm.kind}, {"model", m.llm.model}}},
           {"embedding",
            {{"kind", m.embedding.kind}, {"model", m.embedding.model}}},
           {"source", {{"kind", m.source.kind}, {"model", m.source.model}}}}},
      {"prompt_version", m.prompt_version},
      {"prompt_digest", m.prompt_digest},
      {"topics", topics},
      {"tau", m.tau},
      {"similarity", m.similarity},
      {"query_sampling", m.query_sampling},
      {"relation_steering", m.relation_steering},
      {"proportions",
       ordered_json{{"train", m.proportions[0]},
                    {"dev", m.proportions[1]},
                    {"test", m.proportions[2]}}},
      {"counts", counts},
      {"files", files}};
}

Topic topic_from_json(const ordered_json& j) {
  Topic t;
  t.topic_id = require_string(j, "topic_id");
  t.title = require_string(j, "title");
  if (j.contains("description") && j["description"].is_string()) {
    t.description = j["description"].get<std::string>();
  }
  return t;
}

KeywordSet keywordset_from_json(const ordered_json& j) {
  KeywordSet ks;
  ks.topic_id = require_string(j, "topic_id");
  ks.heavy = require_string_array(j, "heavy");
  ks.lesser = require_string_array(j, "lesser");
  return ks;
}

Query query_from_json(const ordered_json& j) {
  Query q;
  q.topic_id = require_string(j, "topic_id");
  q.heavy_term = require_string(j, "heavy_term");
  auto lesser = require_string_array(j, "lesser_terms");
  if (lesser.size() != 2) {
    throw ValidationError("lesser_terms must have exactly 2 entries");
  }
  q.lesser_terms = {lesser[0], lesser[1]};
  q.rendered = require_string(j, "rendered");
  return q;
}

Post post_from_json(const ordered_json& j) {
  Post p;
  p.post_id = require_string(j, "post_id");
  p.source_id = require_string(j, "source_id");
  p.text = require_string(j, "text");
  const auto& url = require(j, "url");
  if (url.is_string()) {
    p.url = url.get<std::string>();
  } else if (!url.is_null()) {
    throw ValidationError("field is not a string or null: url");
  }
  p.fetched_at = require_string(j, "fetched_at");
  p.query_ref = require_string(j, "query_ref");
  p.topic_id = require_string(j, "topic_id");
  return p;
}

ClaimTuple claim_from_json(const ordered_json& j) {
  ClaimTuple c;
  c.claim_id = require_string(j, "claim_id");
  c.post_id = require_string(j, "post_id");
  c.claim_text = require_string(j, "claim_text");
  return c;
}

TopicTuple topictuple_from_json(const ordered_json& j) {
  TopicTuple t;
  t.post_id = require_string(j, "post_id");
  t.topic_label = require_string(j, "topic_label");
  return t;
}

RelationTuple relation_from_json(const ordered_json& j) {
  RelationTuple r;
  r.source_claim_id = require_string(j, "source_claim_id");
  r.target_claim_id = require_string(j, "target_claim_id");
  std::string label = require_string(j, "relation");
  auto rel = relation_from_string(label);
  if (!rel) {
    throw ValidationError("unknown relation label: " + label);
  }
  r.relation = *rel;
  return r;
}

ClusterAssignment assignment_from_json(const ordered_json& j) {
  ClusterAssignment a;
  const auto& clusters = require(j, "cluster_of");
  if (!clusters.is_object()) {
    throw ValidationError("cluster_of must be an object");
  }
  for (auto it = clusters.begin(); it != clusters.end(); ++it) {
    if (!it.value().is_number_integer()) {
      throw ValidationError("cluster id must be an integer");
    }
    a.cluster_of[it.key()] = it.value().get<int>();
  }
  a.representatives = require_string_array(j, "representatives");
  return a;
}

DatasetManifest manifest_from_json(const ordered_json& j) {
  DatasetManifest m;
  m.schema_version = require(j, "schema_version").get<int>();
  m.seed = require(j, "seed").get<uint64_t>();
  const auto& prov = require(j, "providers");
  m.llm = {require_string(prov.at("llm"), "kind"),
           require_string(prov.at("llm"), "model")};
  m.embedding = {require_string(prov.at("embedding"), "kind"),
                 require_string(prov.at("embedding"), "model")};
  m.source = {require_string(prov.at("source"), "kind"),
              require_string(prov.at("source"), "model")};
  m.prompt_version = require_string(j, "prompt_version");
  m.prompt_digest = require_string(j, "prompt_digest");
  for (const auto& t : require(j, "topics")) {
    m.topics.push_back(topic_from_json(t));
  }
  m.tau = require(j, "tau").get<double>();
  m.similarity = require_string(j, "similarity");
  m.query_sampling = require_string(j, "query_sampling");
  m.relation_steering = require_string(j, "relation_steering");
  const auto& props = require(j, "proportions");
  m.proportions = {props.at("train").get<double>(),
                   props.at("dev").get<double>(),
                   props.at("test").get<double>()};
  const auto& counts = require(j, "counts");
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    for (auto jt = it.value().begin(); jt != it.value().end(); ++jt) {
      m.counts[it.key()][jt.key()] = jt.value().get<long>();
    }
  }
  const auto& files = require(j, "files");
  for (auto it = files.begin(); it != files.end(); ++it) {
    m.files[it.key()] = it.value().get<std::string>();
  }
  return m;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw StageError("io", "cannot read file: " + path.string());
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

void write_lines_atomic(const std::filesystem::path& path,
                        const std::vector<std::string>& lines) {
  if (!path.parent_path().empty()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw StageError("io", "cannot write file: " + tmp.string());
    }
    for (const auto& l : lines) out << l << '\n';
    if (!out.good()) {
      throw StageError("io", "write failed: " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

namespace {

template <typename T, typename Parse>
std::vector<T> read_records(const std::filesystem::path& path, Parse parse) {
  std::vector<T> out;
  size_t line_no = 0;
  for (const auto& line : read_lines(path)) {
    ++line_no;
    ordered_json j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                            ": invalid JSON");
    }
    try {
      out.push_back(parse(j));
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                            ": " + e.what());
    }
  }
  return out;
}

template <typename T>
void write_records(const std::filesystem::path& path,
                   const std::vector<T>& v) {
  std::vector<std::string> lines;
  lines.reserve(v.size());
  for (const auto& r : v) lines.push_back(to_jsonl_line(r));
  write_lines_atomic(path, lines);
}

}  // namespace

std::vector<Post> read_posts_jsonl(const std::filesystem::path& path) {
  return read_records<Post>(path, post_from_json);
}
std::vector<ClaimTuple> read_claims_jsonl(const std::filesystem::path& path) {
  return read_records<ClaimTuple>(path, claim_from_json);
}
std::vector<TopicTuple> read_topics_jsonl(const std::filesystem::path& path) {
  return read_records<TopicTuple>(path, topictuple_from_json);
}
std::vector<RelationTuple> read_relations_jsonl(
    const std::filesystem::path& path) {
  return read_records<RelationTuple>(path, relation_from_json);
}

void write_posts_jsonl(const std::filesystem::path& path,
                       const std::vector<Post>& v) {
  write_records(path, v);
}
void write_claims_jsonl(const std::filesystem::path& path,
                        const std::vector<ClaimTuple>& v) {
  write_records(path, v);
}
void write_topics_jsonl(const std::filesystem::path& path,
                        const std::vector<TopicTuple>& v) {
  write_records(path, v);
}
void write_relations_jsonl(const std::filesystem::path& path,
                           const std::vector<RelationTuple>& v) {
  write_records(path, v);
}

void canonical_sort(std::vector<Post>& v) {
  std::sort(v.begin(), v.end(), [](const Post& a, const Post& b) {
    return a.post_id < b.post_id;
  });
}
void canonical_sort(std::vector<ClaimTuple>& v) {
  std::sort(v.begin(), v.end(), [](const ClaimTuple& a, const ClaimTuple& b) {
    return a.claim_id < b.claim_id;
  });
}
void canonical_sort(std::vector<TopicTuple>& v) {
  std::sort(v.begin(), v.end(), [](const TopicTuple& a, const TopicTuple& b) {
    return std::tie(a.post_id, a.topic_label) <
           std::tie(b.post_id, b.topic_label);
  });
}
void canonical_sort(std::vector<RelationTuple>& v) {
  std::sort(v.begin(), v.end(),
            [](const RelationTuple& a, const RelationTuple& b) {
              return std::tie(a.source_claim_id, a.target_claim_id,
                              a.relation) < std::tie(b.source_claim_id,
                                                     b.target_claim_id,
                                                     b.relation);
            });
}

ordered_json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw StageError("io", "cannot read file: " + path.string());
  }
  ordered_json j = ordered_json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    throw ValidationError("invalid JSON document: " + path.string());
  }
  return j;
}

void write_json_file_atomic(const std::filesystem::path& path,
                            const ordered_json& doc) {
  if (!path.parent_path().empty()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw StageError("io", "cannot write file: " + tmp.string());
    }
    out << doc.dump(2) << '\n';
    if (!out.good()) {
      throw StageError("io", "write failed: " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace claimforge
