#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sneed/digest.hpp"
#include "sneed/errors.hpp"
#include "sneed/packet.hpp"

namespace sneed {

enum class CipherKind : uint8_t {
  XorKeystream,  // reference: length-preserving keystream XOR
};

/// One protection session: n sender/receiver pairs on n disjoint channels,
/// one shared symmetric key per pair.
struct SessionConfig {
  unsigned n = 0;
  std::vector<std::vector<uint8_t>> keys;  // keys[i-1] belongs to pair i
  CipherKind cipher = CipherKind::XorKeystream;
  DigestKind digest = DigestKind::Sha256;
};

inline void validate_session(const SessionConfig& config) {
  if (config.n < 2) throw ConfigError("rotation needs n >= 2 channels");
  if (config.keys.size() != config.n)
    throw ConfigError("expected one key per channel, got " +
                      std::to_string(config.keys.size()) + " for n = " +
                      std::to_string(config.n));
  for (unsigned i = 0; i < config.n; ++i)
    if (config.keys[i].empty())
      throw MissingKeyError("empty key for channel " + std::to_string(i + 1));
}

enum class SlotKind : uint8_t { Data, Parity };

/// What sender i transmits in round r of a cycle.
struct RoundSlot {
  unsigned sender = 0;  // 1-based
  unsigned round = 0;   // 1-based
  SlotKind kind = SlotKind::Data;
  unsigned message_index = 0;  // 1..n-1, meaningful for Data slots
};

/// The rotation schedule: sender i spends round i on the parity symbol and
/// walks its n-1 messages through the remaining rounds in order, so each
/// round has exactly one parity sender (sender r) and n-1 data senders.
inline RoundSlot schedule_symbol(unsigned i, unsigned r, unsigned n) {
  if (i < 1 || i > n || r < 1 || r > n)
    throw ConfigError("sender and round indices must lie in 1..n");
  RoundSlot slot;
  slot.sender = i;
  slot.round = r;
  if (r == i) {
    slot.kind = SlotKind::Parity;
  } else {
    slot.kind = SlotKind::Data;
    slot.message_index = r < i ? r : r - 1;
  }
  return slot;
}

/// Ciphertext x_i^l: message l of sender i after the shared-key transform.
struct CipherText {
  unsigned sender = 0;
  unsigned index = 0;
  std::vector<uint8_t> bytes;
};

namespace detail {

inline constexpr uint8_t kKeystreamContext[] = {'s', 'n', 'e', 'e', 'd', '.',
                                                'k', 's', '.', 'v', '1'};

/// Deterministic keystream: SHA-256 blocks over (key, context, cycle,
/// index, block counter). Not tied to the session's packet digest choice.
inline std::vector<uint8_t> keystream(std::span<const uint8_t> key,
                                      uint32_t cycle, uint16_t index,
                                      std::size_t length) {
  std::vector<uint8_t> out;
  out.reserve(length);
  const auto cyc = be32(cycle);
  const auto idx = be16(index);
  for (uint32_t counter = 0; out.size() < length; ++counter) {
    const auto ctr = be32(counter);
    const auto block = compute_digest(
        DigestKind::Sha256,
        {key, std::span<const uint8_t>(kKeystreamContext),
         std::span<const uint8_t>(cyc), std::span<const uint8_t>(idx),
         std::span<const uint8_t>(ctr)});
    const std::size_t take = std::min(block.size(), length - out.size());
    out.insert(out.end(), block.begin(), block.begin() + take);
  }
  return out;
}

}  // namespace detail

/// Length-preserving encryption of message index l for cycle delta. The
/// keystream depends on (key, delta, l) so equal plaintexts differ across
/// slots but repeat runs are byte-identical.
inline CipherText encrypt_message(std::span<const uint8_t> key, unsigned sender,
                                  std::span<const uint8_t> plaintext,
                                  uint32_t cycle, unsigned index) {
  if (key.empty()) throw MissingKeyError("no key for sender " +
                                         std::to_string(sender));
  CipherText x;
  x.sender = sender;
  x.index = index;
  const auto ks =
      detail::keystream(key, cycle, static_cast<uint16_t>(index), plaintext.size());
  x.bytes.resize(plaintext.size());
  for (std::size_t b = 0; b < plaintext.size(); ++b)
    x.bytes[b] = plaintext[b] ^ ks[b];
  return x;
}

inline std::vector<uint8_t> decrypt_message(std::span<const uint8_t> key,
                                            std::span<const uint8_t> ciphertext,
                                            uint32_t cycle, unsigned index) {
  if (key.empty()) throw MissingKeyError("no key for decryption");
  const auto ks =
      detail::keystream(key, cycle, static_cast<uint16_t>(index), ciphertext.size());
  std::vector<uint8_t> m(ciphertext.size());
  for (std::size_t b = 0; b < ciphertext.size(); ++b)
    m[b] = ciphertext[b] ^ ks[b];
  return m;
}

/// y_r: XOR of the n-1 data ciphertexts of round r, each right-padded with
/// zeros to the longest input.
inline std::vector<uint8_t> compute_parity(
    const std::vector<std::span<const uint8_t>>& others, unsigned n) {
  if (others.size() + 1 != n)
    throw DimensionError("parity needs exactly n-1 inputs, got " +
                         std::to_string(others.size()));
  std::size_t len = 0;
  for (const auto& x : others) len = std::max(len, x.size());
  std::vector<uint8_t> y(len, 0);
  for (const auto& x : others)
    for (std::size_t b = 0; b < x.size(); ++b) y[b] ^= x[b];
  return y;
}

/// Reconstruct the one damaged data symbol of a round: parity XOR all
/// surviving data symbols. A missing parity means nothing was lost, which
/// the nullopt return expresses.
inline std::optional<std::vector<uint8_t>> recover_symbol(
    std::optional<std::span<const uint8_t>> parity,
    const std::vector<std::span<const uint8_t>>& survivors) {
  if (!parity) return std::nullopt;
  std::vector<uint8_t> x(parity->begin(), parity->end());
  for (const auto& s : survivors) {
    if (s.size() != x.size())
      throw DimensionError("survivor length differs from parity length");
    for (std::size_t b = 0; b < s.size(); ++b) x[b] ^= s[b];
  }
  return x;
}

/// Per-sender replay protection: accepts only strictly increasing
/// (cycle, round) pairs.
class SequenceGuard {
public:
  bool accept(uint32_t sender_id, uint32_t cycle, uint16_t round) {
    const auto seq = std::make_pair(cycle, round);
    auto it = last_.find(sender_id);
    if (it != last_.end() && seq <= it->second) return false;
    last_[sender_id] = seq;
    return true;
  }

private:
  std::map<uint32_t, std::pair<uint32_t, uint16_t>> last_;
};

enum class AttackMutation : uint8_t { FlipBit, Fabricate };

/// One active attack inside a cycle: the adversary owns `channel` and acts
/// in `round`. FlipBit flips one transmitted bit (payload, or digest when
/// the payload is empty); Fabricate substitutes a well-formed packet with a
/// valid digest but a stale sequence number and attacker-chosen payload.
struct AttackSpec {
  unsigned channel = 0;  // 1-based
  unsigned round = 0;    // 1-based
  AttackMutation mutation = AttackMutation::FlipBit;
  std::size_t bit_index = 0;
  std::vector<uint8_t> fabricated_payload;
};

enum class EventKind : uint8_t {
  TamperDetected,        // digest mismatch
  FabricationRejected,   // sequence check failed
  SymbolRecovered,       // damaged data symbol rebuilt from parity
  ParitySlotDamaged,     // parity hit; no data at risk
  RoundUnrecoverable,    // more than one damaged data symbol
};

inline const char* event_kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::TamperDetected: return "tamper_detected";
    case EventKind::FabricationRejected: return "fabrication_rejected";
    case EventKind::SymbolRecovered: return "symbol_recovered";
    case EventKind::ParitySlotDamaged: return "parity_slot_damaged";
    case EventKind::RoundUnrecoverable: return "round_unrecoverable";
  }
  return "unknown";
}

struct Event {
  EventKind kind;
  uint32_t cycle = 0;
  unsigned round = 0;
  unsigned channel = 0;
  std::vector<unsigned> source_rounds;  // rounds whose symbols recovery used
};

/// Everything one cycle produced: per-sender plaintexts as reassembled by
/// the receiving side (nullopt where unrecoverable), the post-attack wire
/// transcript, sender-side ciphertexts, and the event log.
struct CycleResult {
  std::vector<std::vector<std::optional<std::vector<uint8_t>>>> delivered;
  std::vector<std::vector<Packet>> transcript;  // [channel][round]
  std::vector<std::vector<std::vector<uint8_t>>> ciphertexts;  // [sender][index]
  std::vector<Event> events;
  unsigned recovered_symbols = 0;
  unsigned failed_symbols = 0;
  unsigned detections = 0;
};

/// Run one full cycle: n rounds across n channels, sender i devoting round
/// i to the parity of the other senders' round traffic. Attacks are applied
/// to the wire transcript; the receiving side (one trusted domain) checks
/// digests, then sequence numbers, then repairs at most one damaged data
/// symbol per round from the round parity.
inline CycleResult run_cycle(const SessionConfig& config,
                             const std::vector<std::vector<std::vector<uint8_t>>>& messages,
                             const std::vector<AttackSpec>& attacks,
                             uint32_t cycle, SequenceGuard& guard) {
  validate_session(config);
  const unsigned n = config.n;
  if (messages.size() != n)
    throw DimensionError("need messages for all n senders");
  for (const auto& per_sender : messages)
    if (per_sender.size() != n - 1)
      throw DimensionError("each sender supplies exactly n-1 messages");
  for (const auto& a : attacks) {
    if (a.channel < 1 || a.channel > n || a.round < 1 || a.round > n)
      throw ConfigError("attack position outside the cycle");
  }

  CycleResult result;
  result.delivered.assign(n, std::vector<std::optional<std::vector<uint8_t>>>(n - 1));
  result.transcript.assign(n, std::vector<Packet>(n));
  result.ciphertexts.assign(n, {});

  // Sender side: every message encrypted once per cycle.
  for (unsigned i = 1; i <= n; ++i) {
    auto& per_sender = result.ciphertexts[i - 1];
    per_sender.reserve(n - 1);
    for (unsigned l = 1; l <= n - 1; ++l)
      per_sender.push_back(
          encrypt_message(config.keys[i - 1], i, messages[i - 1][l - 1], cycle, l)
              .bytes);
  }

  // Receiver-side bookkeeping per round.
  for (unsigned r = 1; r <= n; ++r) {
    // Assemble the round's data payloads, then the parity over them.
    std::vector<std::span<const uint8_t>> data_payloads;
    std::size_t round_len = 0;
    for (unsigned i = 1; i <= n; ++i) {
      const RoundSlot slot = schedule_symbol(i, r, n);
      if (slot.kind == SlotKind::Data) {
        const auto& x = result.ciphertexts[i - 1][slot.message_index - 1];
        data_payloads.emplace_back(x);
        round_len = std::max(round_len, x.size());
      }
    }
    const std::vector<uint8_t> parity = compute_parity(data_payloads, n);

    for (unsigned i = 1; i <= n; ++i) {
      const RoundSlot slot = schedule_symbol(i, r, n);
      std::vector<uint8_t> payload;
      uint16_t true_len = 0;
      PacketKind kind;
      if (slot.kind == SlotKind::Parity) {
        payload = parity;
        true_len = static_cast<uint16_t>(parity.size());
        kind = PacketKind::EncodedEncrypted;
      } else {
        payload = result.ciphertexts[i - 1][slot.message_index - 1];
        true_len = static_cast<uint16_t>(payload.size());
        kind = PacketKind::Encrypted;
      }
      payload.resize(round_len, 0);
      result.transcript[i - 1][r - 1] =
          build_packet(kind, i, cycle, static_cast<uint16_t>(r),
                       std::move(payload), true_len, config.digest);
    }

    // Wire: the attacker mutates its channel's packet for this round.
    for (const auto& a : attacks) {
      if (a.round != r) continue;
      Packet& p = result.transcript[a.channel - 1][r - 1];
      if (a.mutation == AttackMutation::FlipBit) {
        auto& target = p.payload.empty() ? p.digest : p.payload;
        if (!target.empty()) {
          const std::size_t bit = a.bit_index % (target.size() * 8);
          target[bit / 8] ^= static_cast<uint8_t>(1u << (bit % 8));
        }
      } else {
        Packet fake;
        fake.kind = p.kind;
        fake.sender_id = a.channel;
        fake.cycle = cycle > 0 ? cycle - 1 : 0;  // stale cycle stamp
        fake.round = static_cast<uint16_t>(r);
        fake.payload = a.fabricated_payload;
        fake.payload_true_len = static_cast<uint16_t>(fake.payload.size());
        fake.digest = packet_digest(config.digest, fake.sender_id, fake.cycle,
                                    fake.round, fake.payload);
        p = std::move(fake);
      }
    }

    // Receivers: digest check, then sequence check, then repair.
    std::vector<bool> damaged(n + 1, false);
    for (unsigned i = 1; i <= n; ++i) {
      const Packet& p = result.transcript[i - 1][r - 1];
      bool intact = false;
      try {
        intact = verify_integrity(p, config.digest);
      } catch (const MalformedPacketError&) {
        intact = false;
      }
      if (!intact) {
        damaged[i] = true;
        ++result.detections;
        result.events.push_back(
            {EventKind::TamperDetected, cycle, r, i, {}});
        continue;
      }
      if (p.cycle != cycle || p.round != r ||
          !guard.accept(p.sender_id, p.cycle, p.round)) {
        damaged[i] = true;
        ++result.detections;
        result.events.push_back(
            {EventKind::FabricationRejected, cycle, r, i, {}});
      }
    }

    // Collect damage: the parity slot of round r belongs to sender r.
    std::vector<unsigned> damaged_data;
    for (unsigned i = 1; i <= n; ++i)
      if (damaged[i]) {
        if (i == r)
          result.events.push_back({EventKind::ParitySlotDamaged, cycle, r, i, {}});
        else
          damaged_data.push_back(i);
      }

    auto deliver = [&](unsigned i, std::vector<uint8_t> x, uint16_t true_len) {
      const RoundSlot slot = schedule_symbol(i, r, n);
      x.resize(std::min<std::size_t>(true_len, x.size()));
      result.delivered[i - 1][slot.message_index - 1] = decrypt_message(
          config.keys[i - 1], x, cycle, slot.message_index);
    };

    if (damaged_data.empty()) {
      for (unsigned i = 1; i <= n; ++i) {
        if (i == r) continue;
        const Packet& p = result.transcript[i - 1][r - 1];
        deliver(i, p.payload, p.payload_true_len);
      }
    } else if (damaged_data.size() == 1 && !damaged[r]) {
      const unsigned missing = damaged_data.front();
      std::vector<std::span<const uint8_t>> survivors;
      for (unsigned i = 1; i <= n; ++i) {
        if (i == r || i == missing) continue;
        const Packet& p = result.transcript[i - 1][r - 1];
        survivors.emplace_back(p.payload);
        deliver(i, p.payload, p.payload_true_len);
      }
      const Packet& parity_packet = result.transcript[r - 1][r - 1];
      auto rebuilt = recover_symbol(
          std::optional<std::span<const uint8_t>>(parity_packet.payload),
          survivors);
      // Bit-flip attacks leave the header intact, so the damaged packet's
      // declared length still applies; a substituted packet's does not.
      const Packet& damaged_packet = result.transcript[missing - 1][r - 1];
      const uint16_t true_len =
          damaged_packet.payload.size() == rebuilt->size()
              ? std::min<uint16_t>(damaged_packet.payload_true_len,
                                   static_cast<uint16_t>(rebuilt->size()))
              : static_cast<uint16_t>(rebuilt->size());
      deliver(missing, std::move(*rebuilt), true_len);
      ++result.recovered_symbols;
      result.events.push_back({EventKind::SymbolRecovered, cycle, r, missing, {r}});
    } else {
      // Two damaged data symbols, or data damage with the parity also gone.
      for (unsigned i = 1; i <= n; ++i) {
        if (i == r || damaged[i]) continue;
        const Packet& p = result.transcript[i - 1][r - 1];
        deliver(i, p.payload, p.payload_true_len);
      }
      for (unsigned i : damaged_data) {
        ++result.failed_symbols;
        result.events.push_back({EventKind::RoundUnrecoverable, cycle, r, i, {}});
      }
    }
  }
  return result;
}

}  // namespace sneed
