#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "sneed/code.hpp"

using sneed::ErasurePattern;
using sneed::FieldMatrix;
using sneed::FieldSpec;
using sneed::SneedCode;

TEST_CASE("worked xor example encodes and survives one lost lock path") {
  const SneedCode code = sneed::build_example_xor_code();
  REQUIRE(code.n() == 4);
  REQUIRE(code.k() == 3);

  const std::vector<uint16_t> message{1, 0, 1};
  const auto y = sneed::encode_raw(code, message);
  CHECK(y == std::vector<uint16_t>{1, 1, 0, 0});

  // channel 2 lost; the other three symbols pin the message down
  const auto recovered =
      sneed::decode_erasures_raw(code, y, ErasurePattern::of({1}));
  CHECK(recovered == message);

  // no column carries a bare message symbol
  for (unsigned j = 0; j < 4; ++j) {
    unsigned weight = 0;
    for (unsigned i = 0; i < 3; ++i) weight += code.generator().raw(i, j);
    CHECK(weight >= 2);
  }
}

TEST_CASE("xor example hides a weight-1 codeword") {
  const SneedCode code = sneed::build_example_xor_code();
  // (1,1,1) encodes to (0,0,0,1): the code's true distance is 1, so losing
  // the last channel is fatal even though single lock-path loss is fine.
  const auto y = sneed::encode_raw(code, std::vector<uint16_t>{1, 1, 1});
  CHECK(y == std::vector<uint16_t>{0, 0, 0, 1});
  CHECK(sneed::min_distance(code) == 1);
  CHECK(sneed::min_distance_bounded(code) == 1);
  CHECK_THROWS_AS(sneed::decode_erasures_raw(code, y, ErasurePattern::of({3})),
                  sneed::UnrecoverablePatternError);
}

TEST_CASE("hamming generator interleaves checks at power-of-two positions") {
  const SneedCode code = sneed::build_hamming_code(3);
  REQUIRE(code.n() == 7);
  REQUIRE(code.k() == 4);
  const auto expected = FieldMatrix::from_rows(FieldSpec::gf2(),
                                               {{1, 1, 1, 0, 0, 0, 0},
                                                {1, 0, 0, 1, 1, 0, 0},
                                                {0, 1, 0, 1, 0, 1, 0},
                                                {1, 1, 0, 1, 0, 0, 1}});
  CHECK(code.generator() == expected);
  CHECK(sneed::min_distance(code) == 3);
  CHECK(sneed::min_distance_bounded(code) == 3);
}

TEST_CASE("parity check matrix annihilates exactly the codewords") {
  const SneedCode code = sneed::build_hamming_code(3);
  const auto h = sneed::parity_check_matrix(code);
  REQUIRE(h.rows() == 3);
  REQUIRE(h.cols() == 7);
  const FieldSpec f2 = FieldSpec::gf2();
  for (uint16_t msg = 0; msg < 16; ++msg) {
    std::vector<uint16_t> m(4);
    for (unsigned i = 0; i < 4; ++i) m[i] = (msg >> i) & 1u;
    const auto y = sneed::encode_raw(code, m);
    for (std::size_t r = 0; r < 3; ++r) {
      uint16_t acc = 0;
      for (std::size_t j = 0; j < 7; ++j)
        acc = f2.add(acc, f2.mul(h.raw(r, j), y[j]));
      REQUIRE(acc == 0);
    }
  }
  // a unit vector is not a codeword, and the syndrome says so
  uint16_t acc = 0;
  for (std::size_t r = 0; r < 3; ++r) acc |= h.raw(r, 0);
  CHECK(acc != 0);
}

TEST_CASE("erasure decode recovers within capability and flags beyond it") {
  const SneedCode code = sneed::build_hamming_code(3);
  std::mt19937 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<uint16_t> m(4);
    for (auto& s : m) s = rng() & 1u;
    auto y = sneed::encode_raw(code, m);
    const std::size_t a = rng() % 7;
    std::size_t b = rng() % 7;
    while (b == a) b = rng() % 7;
    y[a] ^= 1u;  // garbage at erased positions must be ignored
    CHECK(sneed::decode_erasures_raw(code, y, ErasurePattern::of({a, b})) == m);
  }

  const auto y = sneed::encode_raw(code, std::vector<uint16_t>{1, 0, 0, 1});
  try {
    sneed::decode_erasures_raw(code, y, ErasurePattern::of({0, 1, 2}));
    FAIL("three erasures on a distance-3 code must not decode");
  } catch (const sneed::UnrecoverablePatternError& e) {
    CHECK(e.capability_exceeded());
  }
}

TEST_CASE("corrupted survivor symbols fail the consistency check") {
  const SneedCode code = sneed::build_hamming_code(3);
  auto y = sneed::encode_raw(code, std::vector<uint16_t>{1, 1, 0, 1});
  y[6] ^= 1u;  // modified, not erased: no pattern covers it
  CHECK_THROWS_AS(sneed::decode_erasures_raw(code, y, ErasurePattern::of({0})),
                  sneed::SneedError);
}

TEST_CASE("enumeration guard hands large codes to the bounded search") {
  const SneedCode code = sneed::build_hamming_code(5);  // [31,26,3]
  CHECK_THROWS_AS(sneed::min_distance(code), sneed::EnumerationTooLargeError);
  CHECK(sneed::min_distance_bounded(code) == 3);
}

TEST_CASE("vandermonde code recovers any t known losses") {
  const FieldSpec f = FieldSpec::gf2m(4);
  const SneedCode code = sneed::build_vandermonde_code(6, 2, f);
  REQUIRE(code.k() == 4);
  REQUIRE(code.d() == 3);
  CHECK(sneed::normalized_capacity(code) == sneed::Ratio(2, 3));

  std::mt19937 rng(17);
  for (std::size_t a = 0; a < 6; ++a)
    for (std::size_t b = a + 1; b < 6; ++b) {
      std::vector<uint16_t> m(4);
      for (auto& s : m) s = static_cast<uint16_t>(rng() % 16);
      const auto y = sneed::encode_raw(code, m);
      REQUIRE(sneed::decode_erasures_raw(code, y, ErasurePattern::of({a, b})) ==
              m);
    }

  CHECK_THROWS_AS(sneed::build_vandermonde_code(16, 2, f),
                  sneed::FieldTooSmallError);
}

TEST_CASE("catalog matches the published table") {
  const auto& rows = sneed::catalog();
  REQUIRE(rows.size() == 14);
  for (const auto& e : rows) {
    CHECK(e.k == e.n - e.m);
    CHECK(e.d == 3);
    CHECK(sneed::check_singleton(e.n, e.k, e.d));
  }
  CHECK(sneed::catalog_lookup(7).type == "Hamming code");
  CHECK(sneed::catalog_lookup(71).type == "Matrix construction");
  CHECK_THROWS_AS(sneed::catalog_lookup(8), sneed::NotFoundError);

  // buildable rows construct; the others refuse with a typed error
  for (const auto& e : rows) {
    if (e.buildable) {
      const auto code = sneed::build_code_from_catalog(e);
      CHECK(code.n() == e.n);
      CHECK(code.k() == e.k);
    } else {
      CHECK_THROWS_AS(sneed::build_code_from_catalog(e),
                      sneed::UnsupportedEntryError);
    }
  }
}

TEST_CASE("generator files round-trip") {
  const SneedCode code = sneed::build_hamming_code(3);
  std::ostringstream out;
  sneed::save_generator_file(code, out);
  std::istringstream in(out.str());
  const SneedCode loaded = sneed::load_generator(in);
  CHECK(loaded.generator() == code.generator());
  CHECK(loaded.spec() == code.spec());

  const SneedCode wide = sneed::build_vandermonde_code(10, 3, FieldSpec::gf256());
  std::ostringstream out2;
  sneed::save_generator_file(wide, out2);
  std::istringstream in2(out2.str());
  CHECK(sneed::load_generator(in2).generator() == wide.generator());
}

TEST_CASE("generator file rejects malformed input") {
  auto load = [](const std::string& text) {
    std::istringstream in(text);
    return sneed::load_generator(in);
  };
  CHECK_THROWS_AS(load(""), sneed::ConfigError);
  CHECK_THROWS_AS(load("4 3 1\n"), sneed::ConfigError);           // short header
  CHECK_THROWS_AS(load("4 5 1 3\n"), sneed::ConfigError);         // k > n
  CHECK_THROWS_AS(load("4 3 0 3\n"), sneed::ConfigError);         // bad degree
  CHECK_THROWS_AS(load("4 3 1 zz\n"), sneed::ConfigError);        // bad poly
  CHECK_THROWS_AS(load("2 1 1 3\n1 1 1\n"), sneed::ConfigError);  // long row
  CHECK_THROWS_AS(load("2 1 1 3\n1\n"), sneed::ConfigError);      // short row
  CHECK_THROWS_AS(load("2 1 1 3\n1 2\n"), sneed::ConfigError);    // symbol >= q
  // comments and blank lines are fine
  std::istringstream ok("# title\n\n2 1 1 3\n# row\n1 1\n");
  CHECK(sneed::load_generator(ok).n() == 2);
}

TEST_CASE("code construction rejects bad shapes and distances") {
  const FieldSpec f2 = FieldSpec::gf2();
  auto dependent = FieldMatrix::from_rows(f2, {{1, 0, 1}, {1, 0, 1}});
  CHECK_THROWS_AS(SneedCode(std::move(dependent)), sneed::DimensionError);
  auto ok = FieldMatrix::from_rows(f2, {{1, 0, 1}, {0, 1, 1}});
  CHECK_THROWS_AS(SneedCode(std::move(ok), 3), sneed::DimensionError);

  const auto p = ErasurePattern::of({5, 1, 5, 3});
  CHECK(p.positions == std::vector<std::size_t>{1, 3, 5});
  CHECK(p.contains(3));
  CHECK(!p.contains(2));
}
