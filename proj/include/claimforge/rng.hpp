#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace claimforge {

// Deterministic RNG. mt19937_64's output sequence is fixed by the standard
// and the bounded draw below is hand-rolled, so results are identical across
// platforms and standard libraries (std::uniform_int_distribution is not).
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next() { return eng_(); }

  // Uniform in [0, n) via rejection sampling; n must be > 0.
  uint64_t bounded(uint64_t n);

  // Uniform double in [0, 1) with 53 bits of precision.
  double unit();

  // In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(bounded(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 eng_;
};

// Uniform n-subset of {0, ..., size-1}, returned sorted ascending.
std::vector<size_t> sample_without_replacement(size_t size, size_t n, Rng& rng);

}  // namespace claimforge
