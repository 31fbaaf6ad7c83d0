#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sneed/block.hpp"
#include "sneed/code.hpp"
#include "sneed/digest.hpp"
#include "sneed/errors.hpp"
#include "sneed/packet.hpp"
#include "sneed/report.hpp"

namespace sneed {

/// File sharding splits the input into stripes of k chunks, encodes every
/// stripe across n shard files (one packet per stripe per shard), and
/// records the code and per-shard digests in manifest.json. Only fields
/// whose symbols absorb arbitrary file bytes work here: GF(2)
/// (byte-parallel XOR) and GF(2^8).
struct ShardManifest {
  int schema_version = 1;
  std::string scheme;  // hamming | vandermonde | generator
  unsigned n = 0;
  unsigned k = 0;
  std::optional<unsigned> d;
  unsigned field_m = 0;
  uint32_t field_poly = 0;
  uint16_t field_generator = 0;
  std::vector<std::string> generator_rows;  // hex symbols, space-separated
  uint64_t chunk_bytes = 0;
  uint64_t original_len = 0;
  uint64_t stripes = 0;
  DigestKind digest = DigestKind::Sha256;
  std::vector<std::string> shard_files;
  std::vector<std::string> shard_digests;  // hex over each whole shard file
};

inline constexpr const char* kManifestName = "manifest.json";

namespace detail {

inline std::string to_hex_string(uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%llx", static_cast<unsigned long long>(v));
  return buf;
}

inline void require_shardable_field(const FieldSpec& f) {
  if (f.m() != 1 && f.m() != 8)
    throw ConfigError("file sharding needs GF(2) or GF(2^8) symbols; GF(2^" +
                      std::to_string(f.m()) +
                      ") cannot absorb arbitrary file bytes");
}

inline uint64_t stripe_data_bytes(const ShardManifest& m, uint64_t stripe) {
  const uint64_t per_stripe = m.chunk_bytes * m.k;
  const uint64_t start = (stripe - 1) * per_stripe;
  return std::min<uint64_t>(per_stripe, m.original_len - start);
}

/// Chunk length within one stripe: nominal, except the final stripe
/// shrinks to just cover what remains.
inline uint64_t stripe_chunk_bytes(const ShardManifest& m, uint64_t stripe) {
  return (stripe_data_bytes(m, stripe) + m.k - 1) / m.k;
}

inline std::vector<uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed on " + path.string());
  return bytes;
}

inline void write_file_bytes(const std::filesystem::path& path,
                             std::span<const uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed on " + path.string());
}

}  // namespace detail

inline nlohmann::ordered_json manifest_to_json(const ShardManifest& m) {
  nlohmann::ordered_json j;
  j["schema_version"] = m.schema_version;
  j["scheme"] = m.scheme;
  j["n"] = m.n;
  j["k"] = m.k;
  if (m.d)
    j["d"] = *m.d;
  else
    j["d"] = nullptr;
  nlohmann::ordered_json field;
  field["m"] = m.field_m;
  field["poly_hex"] = detail::to_hex_string(m.field_poly);
  field["generator"] = m.field_generator;
  j["field"] = std::move(field);
  j["generator_rows"] = m.generator_rows;
  j["chunk_bytes"] = m.chunk_bytes;
  j["original_len"] = m.original_len;
  j["stripes"] = m.stripes;
  j["digest"] = digest_name(m.digest);
  nlohmann::ordered_json shards = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < m.shard_files.size(); ++i) {
    nlohmann::ordered_json row;
    row["file"] = m.shard_files[i];
    row["digest_hex"] = m.shard_digests[i];
    shards.push_back(std::move(row));
  }
  j["shards"] = std::move(shards);
  return j;
}

inline ShardManifest manifest_from_json(const nlohmann::json& j) {
  ShardManifest m;
  try {
    m.schema_version = j.at("schema_version").get<int>();
    if (m.schema_version != 1)
      throw ConfigError("unsupported manifest schema_version");
    m.scheme = j.at("scheme").get<std::string>();
    m.n = j.at("n").get<unsigned>();
    m.k = j.at("k").get<unsigned>();
    if (!j.at("d").is_null()) m.d = j.at("d").get<unsigned>();
    m.field_m = j.at("field").at("m").get<unsigned>();
    m.field_poly = static_cast<uint32_t>(
        std::stoul(j.at("field").at("poly_hex").get<std::string>(), nullptr, 16));
    m.field_generator = j.at("field").at("generator").get<uint16_t>();
    m.generator_rows = j.at("generator_rows").get<std::vector<std::string>>();
    m.chunk_bytes = j.at("chunk_bytes").get<uint64_t>();
    m.original_len = j.at("original_len").get<uint64_t>();
    m.stripes = j.at("stripes").get<uint64_t>();
    m.digest = digest_from_name(j.at("digest").get<std::string>());
    for (const auto& row : j.at("shards")) {
      m.shard_files.push_back(row.at("file").get<std::string>());
      m.shard_digests.push_back(row.at("digest_hex").get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad manifest: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw ConfigError("bad manifest: unparseable polynomial");
  }
  if (m.k < 1 || m.k > m.n) throw ConfigError("bad manifest: need 1 <= k <= n");
  if (m.generator_rows.size() != m.k)
    throw ConfigError("bad manifest: generator row count != k");
  if (m.shard_files.size() != m.n || m.shard_digests.size() != m.n)
    throw ConfigError("bad manifest: shard list length != n");
  if (m.chunk_bytes < 1 || m.chunk_bytes > 0xFFFF)
    throw ConfigError("bad manifest: chunk_bytes outside [1, 65535]");
  return m;
}

inline SneedCode code_from_manifest(const ShardManifest& m) {
  const FieldSpec spec(m.field_m, m.field_poly, m.field_generator);
  detail::require_shardable_field(spec);
  FieldMatrix g(m.k, m.n, spec);
  for (unsigned i = 0; i < m.k; ++i) {
    std::istringstream row(m.generator_rows[i]);
    for (unsigned c = 0; c < m.n; ++c) {
      std::string cell;
      if (!(row >> cell))
        throw ConfigError("bad manifest: short generator row");
      try {
        const unsigned long v = std::stoul(cell, nullptr, 16);
        if (v >= spec.order()) throw std::out_of_range(cell);
        g.set_raw(i, c, static_cast<uint16_t>(v));
      } catch (const std::exception&) {
        throw ConfigError("bad manifest: generator symbol '" + cell + "'");
      }
    }
  }
  return SneedCode(std::move(g), m.d, m.scheme);
}

/// Split, encode, and write shard_1.snd .. shard_n.snd plus manifest.json.
inline ShardManifest shard_encode_file(const std::filesystem::path& input,
                                       const std::filesystem::path& out_dir,
                                       const SneedCode& code,
                                       const std::string& scheme,
                                       uint64_t chunk_bytes,
                                       DigestKind digest) {
  detail::require_shardable_field(code.spec());
  if (chunk_bytes < 1 || chunk_bytes > 0xFFFF)
    throw ConfigError("chunk size must lie in [1, 65535] bytes");
  const auto data = detail::read_file_bytes(input);

  ShardManifest m;
  m.scheme = scheme;
  m.n = code.n();
  m.k = code.k();
  m.d = code.d();
  m.field_m = code.spec().m();
  m.field_poly = code.spec().primitive_poly();
  m.field_generator = code.spec().generator();
  for (unsigned i = 0; i < m.k; ++i) {
    std::string row;
    for (unsigned c = 0; c < m.n; ++c) {
      if (c) row += ' ';
      row += detail::to_hex_string(code.generator().raw(i, c));
    }
    m.generator_rows.push_back(std::move(row));
  }
  m.chunk_bytes = chunk_bytes;
  m.original_len = data.size();
  const uint64_t per_stripe = chunk_bytes * m.k;
  m.stripes = (data.size() + per_stripe - 1) / per_stripe;
  m.digest = digest;

  std::filesystem::create_directories(out_dir);
  std::vector<std::vector<uint8_t>> streams(m.n);
  for (uint64_t s = 1; s <= m.stripes; ++s) {
    const uint64_t chunk = detail::stripe_chunk_bytes(m, s);
    const uint64_t start = (s - 1) * per_stripe;
    std::vector<std::vector<uint8_t>> messages(m.k);
    for (unsigned i = 0; i < m.k; ++i) {
      messages[i].assign(chunk, 0);
      const uint64_t from = start + i * chunk;
      for (uint64_t b = 0; b < chunk && from + b < data.size(); ++b)
        messages[i][b] = data[from + b];
    }
    auto payloads = encode_block(code, messages);
    for (unsigned j = 0; j < m.n; ++j) {
      const Packet p = build_packet(
          PacketKind::Encoded, j + 1, static_cast<uint32_t>(s), 1,
          std::move(payloads[j]), static_cast<uint16_t>(chunk), digest);
      const auto bytes = serialize(p);
      streams[j].insert(streams[j].end(), bytes.begin(), bytes.end());
    }
  }

  for (unsigned j = 0; j < m.n; ++j) {
    const std::string name = "shard_" + std::to_string(j + 1) + ".snd";
    detail::write_file_bytes(out_dir / name, streams[j]);
    m.shard_files.push_back(name);
    m.shard_digests.push_back(hex_encode(compute_digest(digest, streams[j])));
  }
  const std::string manifest_text = manifest_to_json(m).dump(2) + "\n";
  detail::write_file_bytes(
      out_dir / kManifestName,
      {reinterpret_cast<const uint8_t*>(manifest_text.data()),
       manifest_text.size()});
  return m;
}

enum class ShardState : uint8_t { Ok, Missing, Corrupt };

struct ShardStatus {
  unsigned index = 0;  // 1-based channel
  std::string file;
  ShardState state = ShardState::Ok;
  std::string reason;
};

struct ShardScan {
  ShardManifest manifest;
  std::vector<ShardStatus> statuses;
  // payloads[channel][stripe-1]; filled only for Ok shards
  std::vector<std::vector<std::vector<uint8_t>>> payloads;
  std::vector<std::size_t> erased;  // 0-based channels
  bool decodable = false;
};

/// Load the manifest and validate every shard: file digest, packet stream
/// shape, per-packet digests and stamps. Any deviation demotes the whole
/// shard to an erasure.
inline ShardScan scan_shards(const std::filesystem::path& dir) {
  const auto manifest_path = dir / kManifestName;
  if (!std::filesystem::exists(manifest_path))
    throw InsufficientShardsError("no " + std::string(kManifestName) + " in " +
                                  dir.string());
  ShardScan scan;
  scan.manifest = manifest_from_json(load_json_file(manifest_path.string()));
  const ShardManifest& m = scan.manifest;
  scan.payloads.resize(m.n);

  for (unsigned j = 0; j < m.n; ++j) {
    ShardStatus st;
    st.index = j + 1;
    st.file = m.shard_files[j];
    const auto path = dir / m.shard_files[j];
    if (!std::filesystem::exists(path)) {
      st.state = ShardState::Missing;
      st.reason = "file not found";
      scan.erased.push_back(j);
      scan.statuses.push_back(std::move(st));
      continue;
    }
    try {
      const auto bytes = detail::read_file_bytes(path);
      if (hex_encode(compute_digest(m.digest, bytes)) != m.shard_digests[j])
        throw SneedError("shard file digest mismatch");
      std::size_t offset = 0;
      std::vector<std::vector<uint8_t>> per_stripe;
      for (uint64_t s = 1; s <= m.stripes; ++s) {
        Packet p = parse_packet_prefix(bytes, offset);
        const uint64_t chunk = detail::stripe_chunk_bytes(m, s);
        if (p.kind != PacketKind::Encoded || p.sender_id != j + 1 ||
            p.cycle != s || p.round != 1 || p.payload.size() != chunk ||
            p.payload_true_len != chunk)
          throw SneedError("packet stamp mismatch at stripe " +
                           std::to_string(s));
        if (!verify_integrity(p, m.digest))
          throw SneedError("packet digest mismatch at stripe " +
                           std::to_string(s));
        per_stripe.push_back(std::move(p.payload));
      }
      if (offset != bytes.size())
        throw SneedError("trailing bytes after final packet");
      scan.payloads[j] = std::move(per_stripe);
    } catch (const SneedError& e) {
      st.state = ShardState::Corrupt;
      st.reason = e.what();
      scan.erased.push_back(j);
      scan.statuses.push_back(std::move(st));
      continue;
    }
    scan.statuses.push_back(std::move(st));
  }

  const std::size_t survivors = m.n - scan.erased.size();
  if (survivors >= m.k) {
    try {
      const ErasureDecoder probe(code_from_manifest(m),
                                 ErasurePattern::of(scan.erased));
      (void)probe;
      scan.decodable = true;
    } catch (const UnrecoverablePatternError&) {
      scan.decodable = false;
    }
  }
  return scan;
}

struct ShardDecodeResult {
  std::vector<std::size_t> erased;  // 0-based channels treated as lost
  uint64_t bytes_written = 0;
};

/// Reconstruct the original file from the surviving shards.
inline ShardDecodeResult shard_decode(const std::filesystem::path& dir,
                                      const std::filesystem::path& output) {
  ShardScan scan = scan_shards(dir);
  const ShardManifest& m = scan.manifest;
  if (m.n - scan.erased.size() < m.k) {
    std::string detail_msg;
    for (const auto& st : scan.statuses)
      if (st.state != ShardState::Ok)
        detail_msg += " " + st.file + " (" + st.reason + ")";
    throw InsufficientShardsError(
        "only " + std::to_string(m.n - scan.erased.size()) + " of " +
        std::to_string(m.n) + " shards usable, need " + std::to_string(m.k) +
        ";" + detail_msg);
  }

  std::vector<uint8_t> out;
  out.reserve(m.original_len);
  if (m.stripes > 0) {
    const SneedCode code = code_from_manifest(m);
    const ErasureDecoder decoder(code, ErasurePattern::of(scan.erased));
    std::vector<std::vector<uint8_t>> channel_payloads(m.n);
    for (uint64_t s = 1; s <= m.stripes; ++s) {
      for (std::size_t j : decoder.survivors_used())
        channel_payloads[j] = std::move(scan.payloads[j][s - 1]);
      const auto chunks = decoder.decode(channel_payloads);
      const uint64_t data = detail::stripe_data_bytes(m, s);
      const uint64_t chunk = detail::stripe_chunk_bytes(m, s);
      for (uint64_t b = 0; b < data; ++b) out.push_back(chunks[b / chunk][b % chunk]);
    }
  }
  detail::write_file_bytes(output, out);
  return {scan.erased, out.size()};
}

}  // namespace sneed
