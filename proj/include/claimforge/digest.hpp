#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace claimforge {

// Hex-encoded SHA-256 of `data` (64 chars, lowercase).
std::string sha256_hex(std::string_view data);

// First 128 bits of SHA-256, hex-encoded (32 chars). Record ids use this.
std::string sha256_hex128(std::string_view data);

// Length-prefixed framing of fields so that concatenated inputs can never
// collide across field boundaries.
std::string frame_fields(const std::vector<std::string_view>& fields);

// Deterministic content-derived claim id. Throws ValidationError on empty
// input. Same (post_id, claim_text) yields the same id on every platform.
std::string claim_id_of(const std::string& post_id,
                        const std::string& claim_text);

// Content-derived post id for sources that supply no native id.
std::string content_post_id(const std::string& normalized_text);

// "sha256:<hex>" digest of a file's bytes. Throws StageError if unreadable.
std::string file_digest(const std::filesystem::path& path);

// First 8 bytes of SHA-256 over (seed, tag) as an unsigned integer; used to
// derive independent per-stage / per-topic RNG seeds from the run seed.
uint64_t derive_seed(uint64_t seed, std::string_view tag);

}  // namespace claimforge
