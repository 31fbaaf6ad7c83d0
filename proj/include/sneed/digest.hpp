#pragma once

#include <openssl/evp.h>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sneed/errors.hpp"

namespace sneed {

enum class DigestKind : uint8_t {
  Sha256,  // default
  Sha1,
  Md5,
};

inline const char* digest_name(DigestKind kind) {
  switch (kind) {
    case DigestKind::Sha256: return "sha256";
    case DigestKind::Sha1: return "sha1";
    case DigestKind::Md5: return "md5";
  }
  throw ConfigError("unknown digest kind");
}

inline DigestKind digest_from_name(const std::string& name) {
  if (name == "sha256") return DigestKind::Sha256;
  if (name == "sha1") return DigestKind::Sha1;
  if (name == "md5") return DigestKind::Md5;
  throw ConfigError("unknown digest name: " + name);
}

inline std::size_t digest_size(DigestKind kind) {
  switch (kind) {
    case DigestKind::Sha256: return 32;
    case DigestKind::Sha1: return 20;
    case DigestKind::Md5: return 16;
  }
  throw ConfigError("unknown digest kind");
}

/// One-shot hash of the concatenation of the given byte spans.
inline std::vector<uint8_t> compute_digest(
    DigestKind kind, std::initializer_list<std::span<const uint8_t>> parts) {
  const EVP_MD* md = nullptr;
  switch (kind) {
    case DigestKind::Sha256: md = EVP_sha256(); break;
    case DigestKind::Sha1: md = EVP_sha1(); break;
    case DigestKind::Md5: md = EVP_md5(); break;
  }
  if (md == nullptr) throw ConfigError("digest algorithm unavailable");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw SneedError("digest context allocation failed");
  std::vector<uint8_t> out(EVP_MD_size(md));
  unsigned out_len = 0;
  bool ok = EVP_DigestInit_ex(ctx, md, nullptr) == 1;
  for (const auto& part : parts)
    ok = ok && EVP_DigestUpdate(ctx, part.data(), part.size()) == 1;
  ok = ok && EVP_DigestFinal_ex(ctx, out.data(), &out_len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok || out_len != out.size()) throw SneedError("digest computation failed");
  return out;
}

inline std::vector<uint8_t> compute_digest(DigestKind kind,
                                           std::span<const uint8_t> data) {
  return compute_digest(kind, {data});
}

inline std::string hex_encode(std::span<const uint8_t> data) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (uint8_t b : data) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xF]);
  }
  return out;
}

inline std::vector<uint8_t> hex_decode(const std::string& text) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (text.size() % 2 != 0) throw ConfigError("hex string with odd length");
  std::vector<uint8_t> out;
  out.reserve(text.size() / 2);
  for (std::size_t i = 0; i < text.size(); i += 2) {
    const int hi = nibble(text[i]);
    const int lo = nibble(text[i + 1]);
    if (hi < 0 || lo < 0) throw ConfigError("invalid hex digit");
    out.push_back(static_cast<uint8_t>((hi << 4) | lo));
  }
  return out;
}

}  // namespace sneed
