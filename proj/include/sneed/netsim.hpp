#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "sneed/block.hpp"
#include "sneed/code.hpp"
#include "sneed/errors.hpp"
#include "sneed/packet.hpp"
#include "sneed/report.hpp"
#include "sneed/rotation.hpp"

namespace sneed {

enum class SchemeKind : uint8_t { Rotation, BinaryCode, Vandermonde, Custom };
enum class AdversaryKind : uint8_t { None, Passive, ActiveModify, ActiveFabricate };
enum class PlacementKind : uint8_t { Random, Exhaustive };

inline const char* scheme_name(SchemeKind s) {
  switch (s) {
    case SchemeKind::Rotation: return "rotation";
    case SchemeKind::BinaryCode: return "binary";
    case SchemeKind::Vandermonde: return "vandermonde";
    case SchemeKind::Custom: return "generator";
  }
  return "unknown";
}

inline const char* adversary_name(AdversaryKind a) {
  switch (a) {
    case AdversaryKind::None: return "none";
    case AdversaryKind::Passive: return "passive";
    case AdversaryKind::ActiveModify: return "modify";
    case AdversaryKind::ActiveFabricate: return "fabricate";
  }
  return "unknown";
}

struct SimConfig {
  SchemeKind scheme = SchemeKind::Rotation;
  unsigned n = 4;
  unsigned t = 1;
  unsigned field_m = 4;  // Vandermonde symbol field degree
  std::optional<SneedCode> custom_code;
  AdversaryKind adversary = AdversaryKind::None;
  PlacementKind placement = PlacementKind::Random;
  uint64_t cycles = 100;
  uint64_t seed = 0;
  uint64_t message_len = 16;  // bytes (symbols for fields beyond GF(2^8))
  DigestKind digest = DigestKind::Sha256;
  bool audit = true;
};

namespace detail {

inline uint64_t rng_below(std::mt19937_64& rng, uint64_t bound) {
  // Plain modulo keeps the draw sequence identical everywhere; the tiny
  // bias is irrelevant for simulation placement.
  return rng() % bound;
}

inline std::vector<uint8_t> random_bytes(std::mt19937_64& rng, std::size_t len) {
  std::vector<uint8_t> out(len);
  for (auto& b : out) b = static_cast<uint8_t>(rng() & 0xFF);
  return out;
}

/// Channels attacked this cycle, 1-based and sorted.
inline std::vector<unsigned> draw_channels(std::mt19937_64& rng, unsigned n,
                                           unsigned t) {
  std::vector<unsigned> all(n);
  for (unsigned i = 0; i < n; ++i) all[i] = i + 1;
  for (unsigned i = 0; i < t; ++i) {
    const auto j = i + rng_below(rng, n - i);
    std::swap(all[i], all[j]);
  }
  std::vector<unsigned> out(all.begin(), all.begin() + t);
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<std::vector<unsigned>> all_channel_sets(unsigned n,
                                                           unsigned t) {
  std::vector<std::vector<unsigned>> sets;
  std::vector<unsigned> idx(t);
  if (t == 0) return {{}};
  for (unsigned i = 0; i < t; ++i) idx[i] = i + 1;
  while (true) {
    sets.push_back(idx);
    if (sets.size() > 1000000)
      throw ConfigError("exhaustive placement space too large");
    unsigned i = t;
    while (i > 0 && idx[i - 1] == n - t + (i - 1) + 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (unsigned j = i; j < t; ++j) idx[j] = idx[j - 1] + 1;
  }
  return sets;
}

}  // namespace detail

/// Mutate the attacked channels' packets in place. Modify flips one
/// transmitted bit and leaves the stale digest behind; Fabricate swaps in
/// a well-formed packet whose digest verifies but whose cycle stamp is
/// stale. Passive and None touch nothing.
inline void apply_active_attack(std::vector<Packet>& packets,
                                const std::vector<unsigned>& channels,
                                AdversaryKind mode, std::mt19937_64& rng,
                                DigestKind digest) {
  if (mode != AdversaryKind::ActiveModify &&
      mode != AdversaryKind::ActiveFabricate)
    return;
  for (unsigned ch : channels) {
    if (ch < 1 || ch > packets.size())
      throw ConfigError("attacked channel out of range");
    Packet& p = packets[ch - 1];
    if (mode == AdversaryKind::ActiveModify) {
      auto& target = p.payload.empty() ? p.digest : p.payload;
      if (target.empty()) continue;
      const std::size_t bit = detail::rng_below(rng, target.size() * 8);
      target[bit / 8] ^= static_cast<uint8_t>(1u << (bit % 8));
    } else {
      Packet fake;
      fake.kind = p.kind;
      fake.sender_id = p.sender_id;
      fake.cycle = p.cycle > 0 ? p.cycle - 1 : 0;
      fake.round = p.round;
      fake.payload = detail::random_bytes(rng, p.payload.size());
      fake.payload_true_len = static_cast<uint16_t>(fake.payload.size());
      fake.digest = packet_digest(digest, fake.sender_id, fake.cycle,
                                  fake.round, fake.payload);
      p = std::move(fake);
    }
  }
}

/// What the eavesdropper saw in one cycle, scheme-independent.
struct AuditCycle {
  uint64_t cycle = 0;
  std::vector<std::vector<uint8_t>> plaintexts;
  std::vector<std::vector<std::vector<uint8_t>>> channel_symbols;  // [ch][slot]
  std::vector<std::vector<std::vector<uint8_t>>> channel_secrets;  // [ch][*]
  std::vector<bool> protected_channel;  // never carries plain packets
};

/// Byte-equality sweep over one cycle's transcript: every transmitted
/// symbol against every plaintext, and against every other channel's
/// ciphertext. Equality with a plaintext on a protected channel is the
/// security violation the schemes must never produce.
inline std::vector<LeakageFinding> eavesdrop_audit(const AuditCycle& cycle,
                                                   uint64_t& checks) {
  std::vector<LeakageFinding> findings;
  for (std::size_t ch = 0; ch < cycle.channel_symbols.size(); ++ch) {
    for (std::size_t slot = 0; slot < cycle.channel_symbols[ch].size(); ++slot) {
      const auto& sym = cycle.channel_symbols[ch][slot];
      if (sym.empty()) continue;
      for (std::size_t p = 0; p < cycle.plaintexts.size(); ++p) {
        ++checks;
        if (sym == cycle.plaintexts[p]) {
          LeakageFinding f;
          f.cycle = cycle.cycle;
          f.channel = static_cast<unsigned>(ch + 1);
          f.slot = static_cast<unsigned>(slot + 1);
          f.kind = "plaintext-match";
          f.matched_index = static_cast<unsigned>(p + 1);
          f.violation = ch < cycle.protected_channel.size() &&
                        cycle.protected_channel[ch];
          findings.push_back(std::move(f));
        }
      }
      for (std::size_t other = 0; other < cycle.channel_secrets.size(); ++other) {
        if (other == ch) continue;
        for (const auto& secret : cycle.channel_secrets[other]) {
          if (secret.empty()) continue;
          ++checks;
          if (sym == secret) {
            LeakageFinding f;
            f.cycle = cycle.cycle;
            f.channel = static_cast<unsigned>(ch + 1);
            f.slot = static_cast<unsigned>(slot + 1);
            f.kind = "cross-ciphertext-match";
            f.matched_index = static_cast<unsigned>(other + 1);
            f.violation = false;
            findings.push_back(std::move(f));
          }
        }
      }
    }
  }
  return findings;
}

namespace detail {

inline void validate_sim_config(const SimConfig& config) {
  if (config.cycles < 1) throw ConfigError("need at least one cycle");
  if (config.message_len < 1) throw ConfigError("need message_len >= 1");
  if (config.t > config.n)
    throw ConfigError("cannot attack more channels than exist");
  switch (config.scheme) {
    case SchemeKind::Rotation:
      if (config.n < 2) throw ConfigError("rotation needs n >= 2");
      if (config.t > 1)
        throw ConfigError(
            "rotation protects a single attacked path; t must be 0 or 1");
      break;
    case SchemeKind::BinaryCode:
      catalog_lookup(config.n);  // throws for untabulated n
      break;
    case SchemeKind::Vandermonde:
      if (config.field_m < 1 || config.field_m > 16)
        throw ConfigError("field degree must be in [1,16]");
      if (config.t >= config.n)
        throw ConfigError("need t < n so that k >= 1");
      break;
    case SchemeKind::Custom:
      if (!config.custom_code)
        throw ConfigError("generator scheme needs a loaded code");
      if (config.n != config.custom_code->n())
        throw ConfigError("n does not match the loaded generator");
      break;
  }
}

inline std::vector<unsigned> placement_for_cycle(
    const SimConfig& config, std::mt19937_64& rng,
    const std::vector<std::vector<unsigned>>& exhaustive_sets, uint64_t cycle_ix) {
  if (config.adversary != AdversaryKind::ActiveModify &&
      config.adversary != AdversaryKind::ActiveFabricate)
    return {};
  if (config.t == 0) return {};
  if (config.placement == PlacementKind::Exhaustive)
    return exhaustive_sets[cycle_ix % exhaustive_sets.size()];
  return draw_channels(rng, config.n, config.t);
}

inline void run_rotation_sim(const SimConfig& config, SimulationReport& report,
                             std::mt19937_64& rng) {
  const unsigned n = config.n;
  SessionConfig session;
  session.n = n;
  session.digest = config.digest;
  session.cipher = CipherKind::XorKeystream;
  for (unsigned i = 0; i < n; ++i)
    session.keys.push_back(random_bytes(rng, 32));

  std::vector<std::vector<unsigned>> exhaustive_sets;
  if (config.placement == PlacementKind::Exhaustive)
    exhaustive_sets = all_channel_sets(n, config.t);

  SequenceGuard guard;
  for (uint64_t c = 0; c < config.cycles; ++c) {
    const uint32_t delta = static_cast<uint32_t>(c + 1);
    // Draw order is fixed: messages, then placement, then per-attack
    // parameters in channel order. Changing it would shift every report.
    std::vector<std::vector<std::vector<uint8_t>>> messages(n);
    for (unsigned i = 0; i < n; ++i)
      for (unsigned l = 0; l + 1 < n; ++l)
        messages[i].push_back(random_bytes(rng, config.message_len));

    const auto attacked =
        placement_for_cycle(config, rng, exhaustive_sets, c);
    std::vector<AttackSpec> attacks;
    for (unsigned ch : attacked) {
      AttackSpec a;
      a.channel = ch;
      a.round = static_cast<unsigned>(1 + rng_below(rng, n));
      if (config.adversary == AdversaryKind::ActiveModify) {
        a.mutation = AttackMutation::FlipBit;
        a.bit_index = rng_below(rng, config.message_len * 8);
      } else {
        a.mutation = AttackMutation::Fabricate;
        a.fabricated_payload = random_bytes(rng, config.message_len);
      }
      attacks.push_back(std::move(a));
    }

    CycleResult result = run_cycle(session, messages, attacks, delta, guard);

    report.channel_uses += static_cast<uint64_t>(n) * n;
    report.data_symbols += static_cast<uint64_t>(n) * (n - 1);
    report.messages_sent += static_cast<uint64_t>(n) * (n - 1);
    uint64_t delivered = 0;
    for (unsigned i = 0; i < n; ++i)
      for (unsigned l = 0; l + 1 < n; ++l)
        if (result.delivered[i][l] && *result.delivered[i][l] == messages[i][l])
          ++delivered;
    report.messages_delivered += delivered;
    report.messages_failed += static_cast<uint64_t>(n) * (n - 1) - delivered;
    report.messages_recovered += result.recovered_symbols;

    CycleRecord record;
    record.cycle = delta;
    record.attacked = attacked;
    record.failures = result.failed_symbols;
    record.recoveries = result.recovered_symbols;
    for (const auto& e : result.events) {
      if (e.kind == EventKind::TamperDetected) {
        ++record.detections;
        ++report.detections;
      } else if (e.kind == EventKind::FabricationRejected) {
        ++record.detections;
        ++report.fabrications_rejected;
      }
      report.events.push_back(e);
    }
    report.cycle_log.push_back(std::move(record));

    if (config.audit) {
      AuditCycle audit;
      audit.cycle = delta;
      for (unsigned i = 0; i < n; ++i)
        for (unsigned l = 0; l + 1 < n; ++l)
          audit.plaintexts.push_back(messages[i][l]);
      audit.channel_symbols.resize(n);
      for (unsigned i = 0; i < n; ++i)
        for (unsigned r = 0; r < n; ++r)
          audit.channel_symbols[i].push_back(
              result.transcript[i][r].payload);
      audit.channel_secrets = result.ciphertexts;
      audit.protected_channel.assign(n, true);
      auto findings = eavesdrop_audit(audit, report.leakage_checks);
      report.leakage.insert(report.leakage.end(),
                            std::make_move_iterator(findings.begin()),
                            std::make_move_iterator(findings.end()));
    }
  }
}

inline std::vector<uint8_t> random_symbol_string(std::mt19937_64& rng,
                                                 const FieldSpec& f,
                                                 uint64_t count) {
  // GF(2) and GF(2^8) strings use whole bytes; narrower fields draw one
  // in-range symbol per byte; wider fields pack two bytes per symbol.
  if (f.m() == 1 || f.m() == 8)
    return random_bytes(rng, count);
  std::vector<uint8_t> out;
  out.reserve(count * packed_symbol_width(f.m()));
  for (uint64_t s = 0; s < count; ++s)
    pack_symbol(out, static_cast<uint16_t>(rng_below(rng, f.order())), f.m());
  return out;
}

inline void run_code_sim(const SimConfig& config, const SneedCode& code,
                         SimulationReport& report, std::mt19937_64& rng) {
  const unsigned n = code.n();
  const unsigned k = code.k();

  std::vector<std::vector<unsigned>> exhaustive_sets;
  if (config.placement == PlacementKind::Exhaustive)
    exhaustive_sets = all_channel_sets(n, config.t);

  SequenceGuard guard;
  for (uint64_t c = 0; c < config.cycles; ++c) {
    const uint32_t delta = static_cast<uint32_t>(c + 1);
    std::vector<std::vector<uint8_t>> messages(k);
    for (unsigned i = 0; i < k; ++i)
      messages[i] = random_symbol_string(rng, code.spec(), config.message_len);

    auto payloads = encode_block(code, messages);
    std::vector<Packet> packets;
    packets.reserve(n);
    for (unsigned j = 0; j < n; ++j) {
      const uint16_t len = static_cast<uint16_t>(payloads[j].size());
      packets.push_back(build_packet(PacketKind::Encoded, j + 1, delta, 1,
                                     std::move(payloads[j]), len,
                                     config.digest));
    }

    const auto attacked =
        placement_for_cycle(config, rng, exhaustive_sets, c);
    apply_active_attack(packets, attacked, config.adversary, rng,
                        config.digest);

    CycleRecord record;
    record.cycle = delta;
    record.attacked = attacked;

    std::vector<std::size_t> erased;
    for (unsigned j = 0; j < n; ++j) {
      const Packet& p = packets[j];
      bool intact = false;
      try {
        intact = verify_integrity(p, config.digest);
      } catch (const MalformedPacketError&) {
        intact = false;
      }
      if (!intact) {
        erased.push_back(j);
        ++record.detections;
        ++report.detections;
        report.events.push_back(
            {EventKind::TamperDetected, delta, 1, j + 1, {}});
        continue;
      }
      if (p.cycle != delta || p.round != 1 ||
          !guard.accept(p.sender_id, p.cycle, p.round)) {
        erased.push_back(j);
        ++record.detections;
        ++report.fabrications_rejected;
        report.events.push_back(
            {EventKind::FabricationRejected, delta, 1, j + 1, {}});
      }
    }

    report.channel_uses += n;
    report.data_symbols += k;
    report.messages_sent += k;

    std::vector<std::vector<uint8_t>> wire(n);
    for (unsigned j = 0; j < n; ++j) wire[j] = packets[j].payload;

    try {
      const auto decoded =
          decode_block(code, wire, ErasurePattern::of(erased));
      uint64_t delivered = 0;
      for (unsigned i = 0; i < k; ++i)
        if (decoded[i] == messages[i]) ++delivered;
      report.messages_delivered += delivered;
      report.messages_failed += k - delivered;
      if (!erased.empty() && delivered == k) {
        report.messages_recovered += k;
        record.recoveries = k;
        report.events.push_back({EventKind::SymbolRecovered, delta, 1,
                                 static_cast<unsigned>(erased.front() + 1),
                                 {1}});
      }
      record.failures = static_cast<unsigned>(k - delivered);
    } catch (const UnrecoverablePatternError&) {
      report.messages_failed += k;
      record.failures = k;
      for (std::size_t j : erased)
        report.events.push_back({EventKind::RoundUnrecoverable, delta, 1,
                                 static_cast<unsigned>(j + 1), {}});
    }
    report.cycle_log.push_back(std::move(record));

    if (config.audit) {
      AuditCycle audit;
      audit.cycle = delta;
      audit.plaintexts = messages;
      audit.channel_symbols.resize(n);
      for (unsigned j = 0; j < n; ++j)
        audit.channel_symbols[j].push_back(packets[j].payload);
      audit.protected_channel.assign(n, true);
      auto findings = eavesdrop_audit(audit, report.leakage_checks);
      report.leakage.insert(report.leakage.end(),
                            std::make_move_iterator(findings.begin()),
                            std::make_move_iterator(findings.end()));
    }
  }
}

}  // namespace detail

inline SimulationReport run_simulation(const SimConfig& config) {
  detail::validate_sim_config(config);
  SimulationReport report;
  report.scheme = scheme_name(config.scheme);
  report.n = config.n;
  report.t = config.t;
  report.adversary = adversary_name(config.adversary);
  report.placement =
      config.placement == PlacementKind::Random ? "random" : "exhaustive";
  report.digest = digest_name(config.digest);
  report.cycles = config.cycles;
  report.seed = config.seed;
  report.message_len = config.message_len;

  std::mt19937_64 rng(config.seed);
  if (config.scheme == SchemeKind::Rotation) {
    report.k = config.n - 1;
    report.field_m = 0;
    report.label = "rotation";
    detail::run_rotation_sim(config, report, rng);
    return report;
  }

  std::optional<SneedCode> code;
  switch (config.scheme) {
    case SchemeKind::BinaryCode:
      code = build_code_from_catalog(catalog_lookup(config.n));
      break;
    case SchemeKind::Vandermonde:
      code = build_vandermonde_code(config.n, config.t,
                                    FieldSpec::gf2m(config.field_m));
      break;
    default:
      code = *config.custom_code;
      break;
  }
  report.k = code->k();
  report.field_m = code->spec().m();
  report.label = code->label();
  detail::run_code_sim(config, *code, report, rng);
  return report;
}

}  // namespace sneed
