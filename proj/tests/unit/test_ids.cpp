#include <doctest.h>

#include <set>
#include <string>

#include "claimforge/digest.hpp"
#include "claimforge/errors.hpp"
#include "claimforge/rng.hpp"

using namespace claimforge;

TEST_CASE("sha256_hex known vector") {
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex128("abc") == "ba7816bf8f01cfea414140de5dae2223");
}

TEST_CASE("claim_id_of is deterministic and input-sensitive") {
  CHECK(claim_id_of("p1", "X causes Y") == claim_id_of("p1", "X causes Y"));
  CHECK(claim_id_of("p1", "X causes Y") != claim_id_of("p2", "X causes Y"));
  CHECK(claim_id_of("p1", "X causes Y") != claim_id_of("p1", "X causes Z"));
}

TEST_CASE("claim_id_of rejects empty input") {
  CHECK_THROWS_AS(claim_id_of("", "claim"), ValidationError);
  CHECK_THROWS_AS(claim_id_of("p1", ""), ValidationError);
}

TEST_CASE("field framing prevents boundary collisions") {
  CHECK(claim_id_of("ab", "c") != claim_id_of("a", "bc"));
  CHECK(frame_fields({"ab", "c"}) != frame_fields({"a", "bc"}));
}

TEST_CASE("collision scan over 10k random pairs") {
  Rng rng(20240601);
  auto random_word = [&] {
    std::string s;
    size_t len = 3 + rng.bounded(12);
    for (size_t i = 0; i < len; ++i) {
      s += static_cast<char>('a' + rng.bounded(26));
    }
    return s;
  };
  std::set<std::pair<std::string, std::string>> pairs;
  while (pairs.size() < 10000) {
    pairs.insert({random_word() + std::to_string(rng.bounded(100000)),
                  random_word() + " " + random_word()});
  }
  std::set<std::string> ids;
  for (const auto& [post, claim] : pairs) {
    ids.insert(claim_id_of(post, claim));
  }
  CHECK(ids.size() == pairs.size());
}

TEST_CASE("derive_seed differs by tag and is stable") {
  CHECK(derive_seed(1, "a") == derive_seed(1, "a"));
  CHECK(derive_seed(1, "a") != derive_seed(1, "b"));
  CHECK(derive_seed(1, "a") != derive_seed(2, "a"));
}

TEST_CASE("Rng bounded and shuffle are deterministic") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.bounded(1000) == b.bounded(1000));
  }
  std::vector<int> v1{1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<int> v2 = v1;
  Rng c(7), d(7);
  c.shuffle(v1);
  d.shuffle(v2);
  CHECK(v1 == v2);
}

TEST_CASE("sample_without_replacement is a sorted subset") {
  Rng rng(3);
  auto s = sample_without_replacement(10, 4, rng);
  CHECK(s.size() == 4);
  for (size_t i = 1; i < s.size(); ++i) CHECK(s[i - 1] < s[i]);
  for (size_t x : s) CHECK(x < 10);

  Rng rng2(3);
  auto all = sample_without_replacement(5, 99, rng2);
  CHECK(all == std::vector<size_t>{0, 1, 2, 3, 4});
}
