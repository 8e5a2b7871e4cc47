#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "claimforge/clock.hpp"
#include "claimforge/llm.hpp"  // RetryPolicy
#include "claimforge/types.hpp"

namespace claimforge {

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string kind() const = 0;
  virtual std::string model() const = 0;
  virtual std::string fingerprint() const = 0;
  virtual int dim() const = 0;
  // One vector per text, order-aligned. Throws TransportError on failure.
  virtual std::vector<EmbeddingVector> embed_batch(
      const std::vector<std::string>& texts) = 0;

  long call_count() const { return calls_.load(); }

 protected:
  void note_call() { calls_.fetch_add(1); }

 private:
  std::atomic<long> calls_{0};
};

// Deterministic seeded-hash projection to dim d, unit-normalized. No
// network; the default test/offline embedder. Identical text always maps
// to the identical vector on every platform.
class HashProjectionEmbedder : public EmbeddingProvider {
 public:
  HashProjectionEmbedder(int dim, uint64_t seed);
  std::string kind() const override { return "hash"; }
  std::string model() const override;
  std::string fingerprint() const override;
  int dim() const override { return dim_; }
  std::vector<EmbeddingVector> embed_batch(
      const std::vector<std::string>& texts) override;

 private:
  int dim_;
  uint64_t seed_;
};

// POST {model, input: [texts]} -> {vectors: [[...], ...]}.
class HttpEmbeddingProvider : public EmbeddingProvider {
 public:
  HttpEmbeddingProvider(std::string base_url, std::string path,
                        std::string model, int dim,
                        std::string api_key_env = "CLAIMFORGE_EMBED_API_KEY");
  std::string kind() const override { return "http"; }
  std::string model() const override { return model_; }
  std::string fingerprint() const override;
  int dim() const override { return dim_; }
  std::vector<EmbeddingVector> embed_batch(
      const std::vector<std::string>& texts) override;

 private:
  std::string base_url_;
  std::string path_;
  std::string model_;
  int dim_;
  std::string api_key_;
};

// Content-digest cache: in-memory map plus an optional directory of
// "<digest>.json" files shared across runs. Keys include the provider
// fingerprint so switching providers never serves stale vectors.
class EmbeddingCache {
 public:
  EmbeddingCache() = default;
  explicit EmbeddingCache(std::filesystem::path dir);
  std::optional<EmbeddingVector> get(const std::string& key);
  void put(const std::string& key, const EmbeddingVector& v);

 private:
  std::optional<std::filesystem::path> dir_;
  std::map<std::string, EmbeddingVector> mem_;
};

// One unit-norm vector per text, order-aligned, cache-first. Vectors are
// re-normalized at ingestion; a zero vector or a dimension mismatch is a
// stage error. Provider batches are retried per RetryPolicy.
std::vector<EmbeddingVector> embed_all(const std::vector<std::string>& texts,
                                       EmbeddingProvider& provider,
                                       EmbeddingCache* cache,
                                       const RetryPolicy& retry, Clock& clock,
                                       size_t batch_size = 64);

double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

}  // namespace claimforge
