#include "claimforge/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstring>
#include <fstream>

#include "claimforge/errors.hpp"

namespace claimforge {

namespace {

std::array<unsigned char, 32> sha256_raw(std::string_view data) {
  std::array<unsigned char, 32> md{};
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr);
  return md;
}

std::string to_hex(const unsigned char* bytes, size_t n) {
  static const char* digits = "0123456789abcdef";
  std::string out(n * 2, '0');
  for (size_t i = 0; i < n; ++i) {
    out[2 * i] = digits[bytes[i] >> 4];
    out[2 * i + 1] = digits[bytes[i] & 0xf];
  }
  return out;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  auto md = sha256_raw(data);
  return to_hex(md.data(), md.size());
}

std::string sha256_hex128(std::string_view data) {
  auto md = sha256_raw(data);
  return to_hex(md.data(), 16);
}

std::string frame_fields(const std::vector<std::string_view>& fields) {
  std::string out;
  for (const auto& f : fields) {
    uint64_t n = f.size();
    char len[8];
    for (int i = 0; i < 8; ++i) len[i] = static_cast<char>((n >> (8 * i)) & 0xff);
    out.append(len, 8);
    out.append(f.data(), f.size());
  }
  return out;
}

std::string claim_id_of(const std::string& post_id,
                        const std::string& claim_text) {
  if (post_id.empty() || claim_text.empty()) {
    throw ValidationError("claim_id_of: empty input",
                          {post_id.empty() ? "post_id is empty"
                                           : "claim_text is empty"});
  }
  return sha256_hex128(frame_fields({"claim", post_id, claim_text}));
}

std::string content_post_id(const std::string& normalized_text) {
  return sha256_hex128(frame_fields({"post", normalized_text}));
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw StageError("digest", "cannot read file: " + path.string());
  }
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx, buf, static_cast<size_t>(in.gcount()));
  }
  unsigned char md[32];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  return "sha256:" + to_hex(md, len);
}

uint64_t derive_seed(uint64_t seed, std::string_view tag) {
  char le[8];
  for (int i = 0; i < 8; ++i) le[i] = static_cast<char>((seed >> (8 * i)) & 0xff);
  auto md = sha256_raw(frame_fields({std::string_view(le, 8), tag}));
  uint64_t out = 0;
  for (int i = 0; i < 8; ++i) out |= static_cast<uint64_t>(md[i]) << (8 * i);
  return out;
}

}  // namespace claimforge
