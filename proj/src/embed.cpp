#include "claimforge/embed.hpp"

#include <cmath>
#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "claimforge/digest.hpp"
#include "claimforge/errors.hpp"
#include "claimforge/records.hpp"

namespace claimforge {

namespace {

uint64_t splitmix64(uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void renormalize(EmbeddingVector& v, const std::string& context) {
  double norm2 = 0;
  for (double x : v.values) norm2 += x * x;
  if (norm2 <= 0 || !std::isfinite(norm2)) {
    throw StageError("embed", "provider returned a degenerate vector for " +
                                  context);
  }
  double inv = 1.0 / std::sqrt(norm2);
  for (double& x : v.values) x *= inv;
}

}  // namespace

HashProjectionEmbedder::HashProjectionEmbedder(int dim, uint64_t seed)
    : dim_(dim), seed_(seed) {}

std::string HashProjectionEmbedder::model() const {
  return "hash-projection-d" + std::to_string(dim_) + "-s" +
         std::to_string(seed_);
}

std::string HashProjectionEmbedder::fingerprint() const {
  return sha256_hex128("hash-embed:" + model());
}

std::vector<EmbeddingVector> HashProjectionEmbedder::embed_batch(
    const std::vector<std::string>& texts) {
  note_call();
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    uint64_t state = derive_seed(seed_, sha256_hex(text));
    EmbeddingVector v;
    v.values.resize(dim_);
    for (int i = 0; i < dim_; ++i) {
      // Uniform in [-1, 1); unit-normalized below. Avoids libm
      // transcendentals so the projection is bit-stable everywhere.
      v.values[i] =
          static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-52 - 1.0;
    }
    renormalize(v, "hash projection");
    out.push_back(std::move(v));
  }
  return out;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(std::string base_url,
                                             std::string path,
                                             std::string model, int dim,
                                             std::string api_key_env)
    : base_url_(std::move(base_url)),
      path_(std::move(path)),
      model_(std::move(model)),
      dim_(dim) {
  if (const char* key = std::getenv(api_key_env.c_str())) {
    api_key_ = key;
  }
}

std::string HttpEmbeddingProvider::fingerprint() const {
  return sha256_hex128("http-embed:" + base_url_ + path_ + ":" + model_);
}

std::vector<EmbeddingVector> HttpEmbeddingProvider::embed_batch(
    const std::vector<std::string>& texts) {
  note_call();
  nlohmann::json body{{"model", model_}, {"input", texts}};
  httplib::Client cli(base_url_);
  cli.set_connection_timeout(30);
  cli.set_read_timeout(120);
  httplib::Headers headers;
  if (!api_key_.empty()) {
    headers.insert({"Authorization", "Bearer " + api_key_});
  }
  auto res = cli.Post(path_, headers, body.dump(), "application/json");
  if (!res) {
    throw TransportError("embedding request failed: " +
                         httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw TransportError("embedding endpoint returned status " +
                         std::to_string(res->status));
  }
  nlohmann::json j = nlohmann::json::parse(res->body, nullptr, false);
  if (j.is_discarded() || !j.contains("vectors") || !j["vectors"].is_array() ||
      j["vectors"].size() != texts.size()) {
    throw TransportError("embedding response is not {vectors: [...]} of the "
                         "right length");
  }
  std::vector<EmbeddingVector> out;
  for (const auto& row : j["vectors"]) {
    if (!row.is_array()) {
      throw TransportError("embedding vector is not an array");
    }
    EmbeddingVector v;
    for (const auto& x : row) v.values.push_back(x.get<double>());
    out.push_back(std::move(v));
  }
  return out;
}

EmbeddingCache::EmbeddingCache(std::filesystem::path dir) : dir_(dir) {
  std::filesystem::create_directories(*dir_);
}

std::optional<EmbeddingVector> EmbeddingCache::get(const std::string& key) {
  auto it = mem_.find(key);
  if (it != mem_.end()) return it->second;
  if (dir_) {
    auto path = *dir_ / (key + ".json");
    if (std::filesystem::exists(path)) {
      auto j = read_json_file(path);
      EmbeddingVector v;
      v.values = j.at("values").get<std::vector<double>>();
      mem_[key] = v;
      return v;
    }
  }
  return std::nullopt;
}

void EmbeddingCache::put(const std::string& key, const EmbeddingVector& v) {
  mem_[key] = v;
  if (dir_) {
    write_json_file_atomic(*dir_ / (key + ".json"),
                           ordered_json{{"values", v.values}});
  }
}

std::vector<EmbeddingVector> embed_all(const std::vector<std::string>& texts,
                                       EmbeddingProvider& provider,
                                       EmbeddingCache* cache,
                                       const RetryPolicy& retry, Clock& clock,
                                       size_t batch_size) {
  if (texts.empty()) {
    throw ValidationError("embed_all: no texts");
  }
  std::vector<std::string> keys(texts.size());
  std::vector<EmbeddingVector> out(texts.size());
  std::vector<size_t> missing;
  for (size_t i = 0; i < texts.size(); ++i) {
    if (texts[i].empty()) {
      throw ValidationError("embed_all: empty text at index " +
                            std::to_string(i));
    }
    keys[i] = sha256_hex128(
        frame_fields({"embed", provider.fingerprint(), texts[i]}));
    if (cache != nullptr) {
      if (auto hit = cache->get(keys[i])) {
        out[i] = std::move(*hit);
        continue;
      }
    }
    missing.push_back(i);
  }

  for (size_t start = 0; start < missing.size(); start += batch_size) {
    size_t end = std::min(missing.size(), start + batch_size);
    std::vector<std::string> batch;
    for (size_t k = start; k < end; ++k) batch.push_back(texts[missing[k]]);

    std::string last_error;
    int64_t delay = retry.base_delay_ms;
    std::vector<EmbeddingVector> vecs;
    bool done = false;
    for (int attempt = 1; attempt <= retry.max_attempts && !done; ++attempt) {
      try {
        vecs = provider.embed_batch(batch);
        done = true;
      } catch (const TransportError& e) {
        last_error = e.what();
        if (attempt < retry.max_attempts) {
          clock.sleep_ms(delay);
          delay = static_cast<int64_t>(delay * retry.multiplier);
        }
      }
    }
    if (!done) {
      throw StageError("embed", "provider failed after retries", last_error);
    }
    if (vecs.size() != batch.size()) {
      throw StageError("embed", "provider returned wrong batch size");
    }
    for (size_t k = start; k < end; ++k) {
      EmbeddingVector v = std::move(vecs[k - start]);
      if (static_cast<int>(v.dim()) != provider.dim()) {
        throw StageError("embed",
                         "vector dimension " + std::to_string(v.dim()) +
                             " does not match provider dim " +
                             std::to_string(provider.dim()));
      }
      renormalize(v, "text #" + std::to_string(missing[k]));
      if (cache != nullptr) cache->put(keys[missing[k]], v);
      out[missing[k]] = std::move(v);
    }
  }
  return out;
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  double dot = 0;
  size_t n = std::min(a.values.size(), b.values.size());
  for (size_t i = 0; i < n; ++i) dot += a.values[i] * b.values[i];
  return dot;
}

}  // namespace claimforge
