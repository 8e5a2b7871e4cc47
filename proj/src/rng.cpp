#include "claimforge/rng.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace claimforge {

uint64_t Rng::bounded(uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::bounded(0)");
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    x = eng_();
  } while (x >= limit);
  return x % n;
}

double Rng::unit() {
  return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

std::vector<size_t> sample_without_replacement(size_t size, size_t n,
                                               Rng& rng) {
  if (n > size) n = size;
  std::vector<size_t> idx(size);
  std::iota(idx.begin(), idx.end(), size_t{0});
  // Partial Fisher-Yates: the first n slots end up a uniform n-subset.
  for (size_t i = 0; i < n; ++i) {
    size_t j = i + static_cast<size_t>(rng.bounded(size - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace claimforge
