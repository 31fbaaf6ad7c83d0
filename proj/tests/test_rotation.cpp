#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sneed/packet.hpp"
#include "sneed/rotation.hpp"

using sneed::AttackMutation;
using sneed::AttackSpec;
using sneed::CycleResult;
using sneed::EventKind;
using sneed::SequenceGuard;
using sneed::SessionConfig;
using sneed::SlotKind;

namespace {

SessionConfig make_session(unsigned n) {
  SessionConfig config;
  config.n = n;
  for (unsigned i = 1; i <= n; ++i)
    config.keys.push_back({static_cast<uint8_t>(0x40 + i),
                           static_cast<uint8_t>(0xA0 ^ i), 0x33,
                           static_cast<uint8_t>(i * 7)});
  return config;
}

// messages[i-1][l-1]: deterministic bytes, distinct across (i, l, position).
std::vector<std::vector<std::vector<uint8_t>>> make_messages(unsigned n,
                                                             std::size_t len) {
  std::vector<std::vector<std::vector<uint8_t>>> m(n);
  for (unsigned i = 1; i <= n; ++i)
    for (unsigned l = 1; l <= n - 1; ++l) {
      std::vector<uint8_t> msg(len);
      for (std::size_t b = 0; b < len; ++b)
        msg[b] = static_cast<uint8_t>(i * 31 + l * 17 + b);
      m[i - 1].push_back(std::move(msg));
    }
  return m;
}

bool all_delivered_match(
    const CycleResult& result,
    const std::vector<std::vector<std::vector<uint8_t>>>& messages) {
  for (std::size_t i = 0; i < messages.size(); ++i)
    for (std::size_t l = 0; l < messages[i].size(); ++l) {
      const auto& got = result.delivered[i][l];
      if (!got || *got != messages[i][l]) return false;
    }
  return true;
}

unsigned count_events(const CycleResult& result, EventKind kind) {
  unsigned c = 0;
  for (const auto& e : result.events)
    if (e.kind == kind) ++c;
  return c;
}

}  // namespace

TEST_CASE("schedule puts one parity sender per round and walks every message") {
  for (unsigned n = 2; n <= 8; ++n) {
    for (unsigned r = 1; r <= n; ++r) {
      unsigned parity_count = 0;
      for (unsigned i = 1; i <= n; ++i) {
        const auto slot = sneed::schedule_symbol(i, r, n);
        REQUIRE(slot.sender == i);
        REQUIRE(slot.round == r);
        if (slot.kind == SlotKind::Parity) {
          ++parity_count;
          REQUIRE(i == r);
        } else {
          REQUIRE(slot.message_index >= 1);
          REQUIRE(slot.message_index <= n - 1);
        }
      }
      REQUIRE(parity_count == 1);
    }
    // Over a cycle each sender hits message indices 1..n-1 exactly once.
    for (unsigned i = 1; i <= n; ++i) {
      std::vector<unsigned> seen;
      for (unsigned r = 1; r <= n; ++r) {
        const auto slot = sneed::schedule_symbol(i, r, n);
        if (slot.kind == SlotKind::Data) seen.push_back(slot.message_index);
      }
      std::sort(seen.begin(), seen.end());
      REQUIRE(seen.size() == n - 1);
      for (unsigned l = 1; l <= n - 1; ++l) REQUIRE(seen[l - 1] == l);
    }
  }
  CHECK_THROWS_AS(sneed::schedule_symbol(0, 1, 4), sneed::ConfigError);
  CHECK_THROWS_AS(sneed::schedule_symbol(1, 5, 4), sneed::ConfigError);
  CHECK_THROWS_AS(sneed::schedule_symbol(5, 1, 4), sneed::ConfigError);
}

TEST_CASE("keystream cipher round-trips and separates slots") {
  const std::vector<uint8_t> key{0x01, 0x02, 0x03};
  std::mt19937 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<uint8_t> msg(rng() % 100);
    for (auto& b : msg) b = static_cast<uint8_t>(rng());
    const auto x = sneed::encrypt_message(key, 1, msg, 7, 2);
    REQUIRE(x.bytes.size() == msg.size());
    REQUIRE(sneed::decrypt_message(key, x.bytes, 7, 2) == msg);
  }

  // 40 bytes forces more than one keystream block.
  const std::vector<uint8_t> msg(40, 0xAB);
  const auto a = sneed::encrypt_message(key, 1, msg, 7, 1);
  REQUIRE(sneed::encrypt_message(key, 1, msg, 7, 1).bytes == a.bytes);
  CHECK(sneed::encrypt_message(key, 1, msg, 7, 2).bytes != a.bytes);
  CHECK(sneed::encrypt_message(key, 1, msg, 8, 1).bytes != a.bytes);
  const std::vector<uint8_t> other_key{0x01, 0x02, 0x04};
  CHECK(sneed::encrypt_message(other_key, 1, msg, 7, 1).bytes != a.bytes);

  CHECK_THROWS_AS(sneed::encrypt_message({}, 1, msg, 7, 1),
                  sneed::MissingKeyError);
  CHECK_THROWS_AS(sneed::decrypt_message({}, msg, 7, 1),
                  sneed::MissingKeyError);
}

TEST_CASE("round parity rebuilds any single missing symbol") {
  // Uneven lengths: parity is as long as the longest input.
  const std::vector<std::vector<uint8_t>> xs{
      {0x01, 0x02, 0x03}, {0x10}, {0xF0, 0x0F, 0xAA, 0x55}};
  std::vector<std::span<const uint8_t>> spans(xs.begin(), xs.end());
  const auto parity = sneed::compute_parity(spans, 4);
  const std::vector<uint8_t> expected{0xE1, 0x0D, 0xA9, 0x55};
  REQUIRE(parity == expected);

  for (std::size_t missing = 0; missing < xs.size(); ++missing) {
    std::vector<std::vector<uint8_t>> padded;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      if (j == missing) continue;
      padded.push_back(xs[j]);
      padded.back().resize(parity.size(), 0);
    }
    std::vector<std::span<const uint8_t>> survivors(padded.begin(),
                                                    padded.end());
    const auto rebuilt = sneed::recover_symbol(
        std::optional<std::span<const uint8_t>>(parity), survivors);
    REQUIRE(rebuilt.has_value());
    std::vector<uint8_t> want = xs[missing];
    want.resize(parity.size(), 0);
    REQUIRE(*rebuilt == want);
  }

  REQUIRE_FALSE(sneed::recover_symbol(std::nullopt, {}).has_value());
  CHECK_THROWS_AS(sneed::compute_parity(spans, 5), sneed::DimensionError);
  const std::vector<std::span<const uint8_t>> short_survivor{
      std::span<const uint8_t>(xs[1])};
  CHECK_THROWS_AS(
      sneed::recover_symbol(std::optional<std::span<const uint8_t>>(parity),
                            short_survivor),
      sneed::DimensionError);
}

TEST_CASE("sequence guard accepts only strictly increasing pairs") {
  SequenceGuard guard;
  REQUIRE(guard.accept(1, 5, 1));
  REQUIRE(guard.accept(1, 5, 2));
  REQUIRE_FALSE(guard.accept(1, 5, 2));  // duplicate
  REQUIRE_FALSE(guard.accept(1, 5, 1));  // round regression
  REQUIRE_FALSE(guard.accept(1, 4, 9));  // stale cycle outranks any round
  REQUIRE(guard.accept(1, 6, 1));        // next cycle restarts rounds
  REQUIRE(guard.accept(2, 1, 1));        // senders tracked independently
  REQUIRE_FALSE(guard.accept(2, 1, 1));
}

TEST_CASE("clean cycle delivers everything and emits valid packets") {
  const unsigned n = 4;
  const auto config = make_session(n);
  const auto messages = make_messages(n, 16);
  SequenceGuard guard;
  const auto result = sneed::run_cycle(config, messages, {}, 1, guard);

  REQUIRE(result.detections == 0);
  REQUIRE(result.recovered_symbols == 0);
  REQUIRE(result.failed_symbols == 0);
  REQUIRE(result.events.empty());
  REQUIRE(all_delivered_match(result, messages));

  REQUIRE(result.transcript.size() == n);
  for (unsigned r = 1; r <= n; ++r) {
    for (unsigned i = 1; i <= n; ++i) {
      const auto& p = result.transcript[i - 1][r - 1];
      REQUIRE(p.sender_id == i);
      REQUIRE(p.cycle == 1);
      REQUIRE(p.round == r);
      REQUIRE(sneed::verify_integrity(p, config.digest));
      REQUIRE(p.kind == (i == r ? sneed::PacketKind::EncodedEncrypted
                                : sneed::PacketKind::Encrypted));
    }
    // Parity XOR all data payloads of the round is zero.
    std::vector<uint8_t> acc = result.transcript[r - 1][r - 1].payload;
    for (unsigned i = 1; i <= n; ++i) {
      if (i == r) continue;
      const auto& payload = result.transcript[i - 1][r - 1].payload;
      REQUIRE(payload.size() == acc.size());
      for (std::size_t b = 0; b < payload.size(); ++b) acc[b] ^= payload[b];
    }
    REQUIRE(std::all_of(acc.begin(), acc.end(),
                        [](uint8_t b) { return b == 0; }));
  }

  // The guard carries across cycles; replaying one delivers nothing.
  const auto second = sneed::run_cycle(config, messages, {}, 2, guard);
  REQUIRE(all_delivered_match(second, messages));
  const auto replay = sneed::run_cycle(config, messages, {}, 2, guard);
  REQUIRE(replay.detections == n * n);
  REQUIRE(count_events(replay, EventKind::FabricationRejected) == n * n);
  for (const auto& per_sender : replay.delivered)
    for (const auto& m : per_sender) REQUIRE_FALSE(m.has_value());
}

TEST_CASE("uneven message lengths survive round padding") {
  const unsigned n = 3;
  const auto config = make_session(n);
  std::vector<std::vector<std::vector<uint8_t>>> messages(n);
  std::mt19937 rng(4242);
  for (unsigned i = 0; i < n; ++i)
    for (unsigned l = 0; l + 1 < n; ++l) {
      std::vector<uint8_t> msg(rng() % 24);
      for (auto& b : msg) b = static_cast<uint8_t>(rng());
      messages[i].push_back(std::move(msg));
    }
  SequenceGuard guard;
  const auto result = sneed::run_cycle(config, messages, {}, 9, guard);
  REQUIRE(result.detections == 0);
  REQUIRE(all_delivered_match(result, messages));
}

TEST_CASE("bit flip on a data slot is detected and repaired") {
  const unsigned n = 4;
  const auto config = make_session(n);
  const auto messages = make_messages(n, 16);
  SequenceGuard guard;
  AttackSpec attack;
  attack.channel = 2;  // sender 2 carries data in round 3
  attack.round = 3;
  attack.bit_index = 5;
  const auto result = sneed::run_cycle(config, messages, {attack}, 1, guard);

  REQUIRE(result.detections == 1);
  REQUIRE(result.recovered_symbols == 1);
  REQUIRE(result.failed_symbols == 0);
  REQUIRE(count_events(result, EventKind::TamperDetected) == 1);
  REQUIRE(count_events(result, EventKind::SymbolRecovered) == 1);
  REQUIRE(all_delivered_match(result, messages));
  // The transcript keeps the damaged form of the attacked packet.
  REQUIRE_FALSE(sneed::verify_integrity(result.transcript[1][2],
                                        config.digest));
  for (const auto& e : result.events)
    if (e.kind == EventKind::SymbolRecovered) {
      REQUIRE(e.channel == 2);
      REQUIRE(e.round == 3);
      REQUIRE(e.source_rounds == std::vector<unsigned>{3});
    }
}

TEST_CASE("every attacked slot position is survivable") {
  const unsigned n = 3;
  const auto config = make_session(n);
  const auto messages = make_messages(n, 2);
  for (unsigned ch = 1; ch <= n; ++ch)
    for (unsigned r = 1; r <= n; ++r)
      for (std::size_t bit : {std::size_t{0}, std::size_t{9}, std::size_t{15}}) {
        SequenceGuard guard;
        AttackSpec attack;
        attack.channel = ch;
        attack.round = r;
        attack.bit_index = bit;
        const auto result =
            sneed::run_cycle(config, messages, {attack}, 1, guard);
        REQUIRE(result.detections == 1);
        REQUIRE(result.failed_symbols == 0);
        REQUIRE(all_delivered_match(result, messages));
        if (ch == r) {
          REQUIRE(result.recovered_symbols == 0);
          REQUIRE(count_events(result, EventKind::ParitySlotDamaged) == 1);
        } else {
          REQUIRE(result.recovered_symbols == 1);
        }
      }
}

TEST_CASE("repair trims the rebuilt symbol to its declared length") {
  const unsigned n = 3;
  const auto config = make_session(n);
  // Sender 2's round-1 payload is shorter than the round's longest.
  std::vector<std::vector<std::vector<uint8_t>>> messages(n);
  messages[0] = {{0x01, 0x02, 0x03, 0x04}, {0x05, 0x06, 0x07, 0x08}};
  messages[1] = {{0xAA}, {0xBB, 0xBC}};
  messages[2] = {{0x10, 0x11, 0x12}, {0x20, 0x21, 0x22, 0x23}};
  SequenceGuard guard;
  AttackSpec attack;
  attack.channel = 2;
  attack.round = 1;
  attack.bit_index = 2;
  const auto result = sneed::run_cycle(config, messages, {attack}, 3, guard);
  REQUIRE(result.recovered_symbols == 1);
  REQUIRE(all_delivered_match(result, messages));
  REQUIRE(result.delivered[1][0]->size() == 1);
}

TEST_CASE("fabrication fails the sequence check, not the digest check") {
  const unsigned n = 4;
  const auto config = make_session(n);
  const auto messages = make_messages(n, 16);
  SequenceGuard guard;
  AttackSpec attack;
  attack.channel = 3;
  attack.round = 1;
  attack.mutation = AttackMutation::Fabricate;
  attack.fabricated_payload = {0x66, 0x66, 0x66};
  const auto result = sneed::run_cycle(config, messages, {attack}, 5, guard);

  REQUIRE(result.detections == 1);
  REQUIRE(count_events(result, EventKind::TamperDetected) == 0);
  REQUIRE(count_events(result, EventKind::FabricationRejected) == 1);
  REQUIRE(result.recovered_symbols == 1);
  REQUIRE(all_delivered_match(result, messages));
  // The substitute carries a valid digest over a stale cycle stamp.
  const auto& fake = result.transcript[2][0];
  REQUIRE(fake.cycle == 4);
  REQUIRE(sneed::verify_integrity(fake, config.digest));
  REQUIRE(fake.payload == attack.fabricated_payload);
}

TEST_CASE("two damaged data symbols exceed the parity budget") {
  const unsigned n = 4;
  const auto config = make_session(n);
  const auto messages = make_messages(n, 8);
  SequenceGuard guard;
  AttackSpec a1, a2;
  a1.channel = 1;
  a1.round = 2;
  a2.channel = 3;
  a2.round = 2;
  a2.bit_index = 1;
  const auto result = sneed::run_cycle(config, messages, {a1, a2}, 1, guard);

  REQUIRE(result.detections == 2);
  REQUIRE(result.recovered_symbols == 0);
  REQUIRE(result.failed_symbols == 2);
  REQUIRE(count_events(result, EventKind::RoundUnrecoverable) == 2);
  // Exactly the two attacked slots are lost.
  unsigned missing = 0;
  for (unsigned i = 1; i <= n; ++i)
    for (unsigned l = 1; l <= n - 1; ++l) {
      const auto& got = result.delivered[i - 1][l - 1];
      if (!got) {
        ++missing;
        REQUIRE((i == 1 || i == 3));
        REQUIRE(l == sneed::schedule_symbol(i, 2, n).message_index);
      } else {
        REQUIRE(*got == messages[i - 1][l - 1]);
      }
    }
  REQUIRE(missing == 2);

  // Parity and one data symbol damaged together: nothing to rebuild from.
  SequenceGuard guard2;
  AttackSpec p, d;
  p.channel = 2;
  p.round = 2;
  p.bit_index = 3;
  d.channel = 4;
  d.round = 2;
  d.bit_index = 3;
  const auto r2 = sneed::run_cycle(config, messages, {p, d}, 1, guard2);
  REQUIRE(r2.detections == 2);
  REQUIRE(r2.failed_symbols == 1);
  REQUIRE(count_events(r2, EventKind::ParitySlotDamaged) == 1);
  REQUIRE(count_events(r2, EventKind::RoundUnrecoverable) == 1);
}

TEST_CASE("two channels is the smallest working session") {
  const auto config = make_session(2);
  const auto messages = make_messages(2, 5);
  SequenceGuard guard;
  const auto clean = sneed::run_cycle(config, messages, {}, 1, guard);
  REQUIRE(all_delivered_match(clean, messages));

  // One data sender per round: recovery runs with zero survivors.
  SequenceGuard guard2;
  AttackSpec attack;
  attack.channel = 2;
  attack.round = 1;
  attack.bit_index = 11;
  const auto result = sneed::run_cycle(config, messages, {attack}, 1, guard2);
  REQUIRE(result.recovered_symbols == 1);
  REQUIRE(all_delivered_match(result, messages));
}

TEST_CASE("cycle rejects malformed sessions and inputs") {
  const auto config = make_session(3);
  auto messages = make_messages(3, 4);
  SequenceGuard guard;

  AttackSpec outside;
  outside.channel = 4;
  outside.round = 1;
  CHECK_THROWS_AS(sneed::run_cycle(config, messages, {outside}, 1, guard),
                  sneed::ConfigError);

  messages[0].pop_back();
  CHECK_THROWS_AS(sneed::run_cycle(config, messages, {}, 1, guard),
                  sneed::DimensionError);
  CHECK_THROWS_AS(sneed::run_cycle(config, make_messages(4, 4), {}, 1, guard),
                  sneed::DimensionError);

  SessionConfig short_keys = config;
  short_keys.keys.pop_back();
  CHECK_THROWS_AS(
      sneed::run_cycle(short_keys, make_messages(3, 4), {}, 1, guard),
      sneed::ConfigError);
  SessionConfig empty_key = config;
  empty_key.keys[1].clear();
  CHECK_THROWS_AS(
      sneed::run_cycle(empty_key, make_messages(3, 4), {}, 1, guard),
      sneed::MissingKeyError);
  SessionConfig tiny;
  tiny.n = 1;
  tiny.keys = {{0x01}};
  CHECK_THROWS_AS(sneed::validate_session(tiny), sneed::ConfigError);
}

TEST_CASE("event kinds have stable names") {
  CHECK(std::string(sneed::event_kind_name(EventKind::TamperDetected)) ==
        "tamper_detected");
  CHECK(std::string(sneed::event_kind_name(EventKind::FabricationRejected)) ==
        "fabrication_rejected");
  CHECK(std::string(sneed::event_kind_name(EventKind::SymbolRecovered)) ==
        "symbol_recovered");
  CHECK(std::string(sneed::event_kind_name(EventKind::ParitySlotDamaged)) ==
        "parity_slot_damaged");
  CHECK(std::string(sneed::event_kind_name(EventKind::RoundUnrecoverable)) ==
        "round_unrecoverable");
}
