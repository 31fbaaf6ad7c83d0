#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sneed/digest.hpp"
#include "sneed/errors.hpp"

namespace sneed {

enum class PacketKind : uint8_t {
  Plain = 0,
  Encoded = 1,
  Encrypted = 2,
  EncodedEncrypted = 3,
};

inline constexpr std::array<uint8_t, 4> kPacketMagic = {'S', 'N', 'E', 'D'};
inline constexpr uint8_t kPacketVersion = 0x01;

/// Wire layout, all integers big-endian:
///   magic "SNED" | version | kind | sender_id:4 | cycle:4 | round:2 |
///   payload_true_len:2 | payload_len:2 | payload | digest_len:1 | digest
/// round is 1-based; payload_true_len is the byte count before any padding
/// the sender applied, never larger than payload_len.
struct Packet {
  PacketKind kind = PacketKind::Plain;
  uint32_t sender_id = 0;
  uint32_t cycle = 0;
  uint16_t round = 1;
  uint16_t payload_true_len = 0;
  std::vector<uint8_t> payload;
  std::vector<uint8_t> digest;

  bool operator==(const Packet& o) const = default;
};

namespace detail {

inline void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

inline void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v >> 24));
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

inline std::array<uint8_t, 4> be32(uint32_t v) {
  return {static_cast<uint8_t>(v >> 24), static_cast<uint8_t>(v >> 16),
          static_cast<uint8_t>(v >> 8), static_cast<uint8_t>(v)};
}

inline std::array<uint8_t, 2> be16(uint16_t v) {
  return {static_cast<uint8_t>(v >> 8), static_cast<uint8_t>(v)};
}

}  // namespace detail

/// Digest input is the header identity plus the payload as transmitted:
/// sender_id:4 | cycle:4 | round:2 | payload, all big-endian.
inline std::vector<uint8_t> packet_digest(DigestKind kind, uint32_t sender_id,
                                          uint32_t cycle, uint16_t round,
                                          std::span<const uint8_t> payload) {
  const auto sid = detail::be32(sender_id);
  const auto cyc = detail::be32(cycle);
  const auto rnd = detail::be16(round);
  return compute_digest(kind, {std::span<const uint8_t>(sid),
                               std::span<const uint8_t>(cyc),
                               std::span<const uint8_t>(rnd), payload});
}

inline void validate_packet(const Packet& p) {
  if (static_cast<uint8_t>(p.kind) > 3)
    throw MalformedPacketError(MalformedPacketError::Kind::BadKind,
                               "unknown packet kind");
  if (p.round == 0)
    throw MalformedPacketError(MalformedPacketError::Kind::FieldRange,
                               "round numbers start at 1");
  if (p.payload.size() > 0xFFFF)
    throw MalformedPacketError(MalformedPacketError::Kind::FieldRange,
                               "payload longer than 65535 bytes");
  if (p.payload_true_len > p.payload.size())
    throw MalformedPacketError(MalformedPacketError::Kind::LengthMismatch,
                               "true length exceeds payload length");
  if (p.digest.size() > 0xFF)
    throw MalformedPacketError(MalformedPacketError::Kind::FieldRange,
                               "digest longer than 255 bytes");
}

/// Construct a packet with a freshly computed digest over its identity.
inline Packet build_packet(PacketKind kind, uint32_t sender_id, uint32_t cycle,
                           uint16_t round, std::vector<uint8_t> payload,
                           uint16_t payload_true_len, DigestKind digest_kind) {
  Packet p;
  p.kind = kind;
  p.sender_id = sender_id;
  p.cycle = cycle;
  p.round = round;
  p.payload_true_len = payload_true_len;
  p.payload = std::move(payload);
  validate_packet(p);
  p.digest = packet_digest(digest_kind, sender_id, cycle, round, p.payload);
  return p;
}

inline std::vector<uint8_t> serialize(const Packet& p) {
  validate_packet(p);
  std::vector<uint8_t> out;
  out.reserve(21 + p.payload.size() + p.digest.size());
  for (uint8_t b : kPacketMagic) out.push_back(b);
  out.push_back(kPacketVersion);
  out.push_back(static_cast<uint8_t>(p.kind));
  detail::put_u32(out, p.sender_id);
  detail::put_u32(out, p.cycle);
  detail::put_u16(out, p.round);
  detail::put_u16(out, p.payload_true_len);
  detail::put_u16(out, static_cast<uint16_t>(p.payload.size()));
  out.insert(out.end(), p.payload.begin(), p.payload.end());
  out.push_back(static_cast<uint8_t>(p.digest.size()));
  out.insert(out.end(), p.digest.begin(), p.digest.end());
  return out;
}

/// Parse one packet starting at `offset`; advances `offset` past it.
/// Throws MalformedPacketError; never reads past the buffer.
inline Packet parse_packet_prefix(std::span<const uint8_t> data,
                                  std::size_t& offset) {
  using Kind = MalformedPacketError::Kind;
  auto need = [&](std::size_t count, const char* what) {
    if (data.size() - offset < count)
      throw MalformedPacketError(Kind::Truncated,
                                 std::string("packet truncated in ") + what);
  };
  auto u8 = [&]() { return data[offset++]; };
  auto u16 = [&]() {
    const uint16_t v = static_cast<uint16_t>(data[offset] << 8) | data[offset + 1];
    offset += 2;
    return v;
  };
  auto u32 = [&]() {
    const uint32_t v = (static_cast<uint32_t>(data[offset]) << 24) |
                       (static_cast<uint32_t>(data[offset + 1]) << 16) |
                       (static_cast<uint32_t>(data[offset + 2]) << 8) |
                       data[offset + 3];
    offset += 4;
    return v;
  };

  need(4, "magic");
  for (uint8_t expect : kPacketMagic)
    if (u8() != expect)
      throw MalformedPacketError(Kind::BadMagic, "bad packet magic");
  need(2, "version and kind");
  const uint8_t version = u8();
  if (version != kPacketVersion)
    throw MalformedPacketError(Kind::BadVersion,
                               "unsupported version " + std::to_string(version));
  const uint8_t kind_byte = u8();
  if (kind_byte > 3)
    throw MalformedPacketError(Kind::BadKind,
                               "unknown kind " + std::to_string(kind_byte));

  Packet p;
  p.kind = static_cast<PacketKind>(kind_byte);
  need(14, "header");
  p.sender_id = u32();
  p.cycle = u32();
  p.round = u16();
  if (p.round == 0)
    throw MalformedPacketError(Kind::FieldRange, "round numbers start at 1");
  p.payload_true_len = u16();
  const uint16_t payload_len = u16();
  if (p.payload_true_len > payload_len)
    throw MalformedPacketError(Kind::LengthMismatch,
                               "true length exceeds payload length");
  need(payload_len, "payload");
  p.payload.assign(data.begin() + offset, data.begin() + offset + payload_len);
  offset += payload_len;
  need(1, "digest length");
  const uint8_t digest_len = u8();
  need(digest_len, "digest");
  p.digest.assign(data.begin() + offset, data.begin() + offset + digest_len);
  offset += digest_len;
  return p;
}

/// Strict parse: the buffer must hold exactly one packet.
inline Packet parse_packet(std::span<const uint8_t> data) {
  std::size_t offset = 0;
  Packet p = parse_packet_prefix(data, offset);
  if (offset != data.size())
    throw MalformedPacketError(MalformedPacketError::Kind::TrailingBytes,
                               std::to_string(data.size() - offset) +
                                   " bytes after packet end");
  return p;
}

/// True when the carried digest matches a recomputation; a packet without
/// a digest cannot be verified and is rejected as malformed.
inline bool verify_integrity(const Packet& p, DigestKind kind) {
  if (p.digest.empty())
    throw MalformedPacketError(MalformedPacketError::Kind::MissingDigest,
                               "packet carries no digest");
  if (p.digest.size() != digest_size(kind)) return false;
  return p.digest ==
         packet_digest(kind, p.sender_id, p.cycle, p.round, p.payload);
}

}  // namespace sneed
