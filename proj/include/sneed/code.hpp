#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sneed/errors.hpp"
#include "sneed/field.hpp"
#include "sneed/matrix.hpp"
#include "sneed/rational.hpp"

namespace sneed {

/// One row of the published table of protection codes over GF(2).
struct CatalogEntry {
  unsigned n;          // channel count
  unsigned m;          // redundant channels, k = n - m
  unsigned k;
  unsigned d;          // minimum distance, 3 for every row
  std::string type;    // construction family
  bool buildable;      // true when this library can construct the generator
};

inline const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> rows = {
      {7, 3, 4, 3, "Hamming code", true},
      {10, 4, 6, 3, "Linear code", false},
      {15, 4, 11, 3, "Hamming code", true},
      {19, 7, 12, 3, "Extension construction", false},
      {23, 8, 15, 3, "Extension construction", false},
      {25, 5, 20, 3, "Linear code", false},
      {31, 5, 26, 3, "Hamming code", true},
      {39, 8, 31, 3, "Extension construction", false},
      {47, 9, 38, 3, "Extension construction", false},
      {63, 6, 57, 3, "Hamming code", true},
      {71, 8, 63, 3, "Matrix construction", false},
      {79, 9, 70, 3, "Extension construction", false},
      {95, 10, 85, 3, "Extension construction", false},
      {127, 7, 120, 3, "Hamming code", true},
  };
  return rows;
}

inline CatalogEntry catalog_lookup(unsigned n) {
  for (const auto& row : catalog())
    if (row.n == n) return row;
  throw NotFoundError("no catalog code with n = " + std::to_string(n));
}

inline bool check_singleton(unsigned n, unsigned k, unsigned d) {
  return d >= 1 && d - 1 <= n - k;
}

/// Channel positions (0-based) reported compromised at decode time.
struct ErasurePattern {
  std::vector<std::size_t> positions;  // sorted, unique

  static ErasurePattern of(std::vector<std::size_t> positions) {
    std::sort(positions.begin(), positions.end());
    positions.erase(std::unique(positions.begin(), positions.end()),
                    positions.end());
    return ErasurePattern{std::move(positions)};
  }

  bool contains(std::size_t channel) const {
    return std::binary_search(positions.begin(), positions.end(), channel);
  }
  std::size_t size() const { return positions.size(); }
};

/// An [n, k] linear code over GF(2^m) given by a full-rank k x n generator.
/// The minimum distance is optional until somebody computes it; once set,
/// d - 1 <= n - k must hold.
class SneedCode {
public:
  SneedCode(FieldMatrix generator, std::optional<unsigned> d = std::nullopt,
            std::string label = "")
      : generator_(std::move(generator)),
        d_(d),
        label_(std::move(label)) {
    if (generator_.rows() < 1 || generator_.rows() > generator_.cols())
      throw DimensionError("generator must be k x n with 1 <= k <= n");
    if (rank(generator_) != generator_.rows())
      throw DimensionError("generator does not have full row rank");
    if (d_ && !check_singleton(n(), k(), *d_))
      throw DimensionError("distance " + std::to_string(*d_) +
                           " violates d-1 <= n-k for [" + std::to_string(n()) +
                           "," + std::to_string(k()) + "]");
  }

  unsigned n() const { return static_cast<unsigned>(generator_.cols()); }
  unsigned k() const { return static_cast<unsigned>(generator_.rows()); }
  std::optional<unsigned> d() const { return d_; }
  const FieldMatrix& generator() const { return generator_; }
  const FieldSpec& spec() const { return generator_.spec(); }
  const std::string& label() const { return label_; }

  void set_distance(unsigned d) {
    if (!check_singleton(n(), k(), d))
      throw DimensionError("distance violates d-1 <= n-k");
    d_ = d;
  }

private:
  FieldMatrix generator_;
  std::optional<unsigned> d_;
  std::string label_;
};

inline Ratio normalized_capacity(const SneedCode& code) {
  return Ratio(code.k(), code.n());
}

/// y_j = sum over i of g_ij * m_i, one output symbol per channel.
inline std::vector<uint16_t> encode_raw(const SneedCode& code,
                                        std::span<const uint16_t> message) {
  if (message.size() != code.k())
    throw DimensionError("message has " + std::to_string(message.size()) +
                         " symbols, code expects " + std::to_string(code.k()));
  const FieldSpec& f = code.spec();
  const FieldMatrix& g = code.generator();
  std::vector<uint16_t> out(code.n(), 0);
  for (std::size_t i = 0; i < code.k(); ++i) {
    const uint16_t mi = message[i];
    if (mi >= f.order()) throw FieldRangeError("message symbol outside field");
    if (mi == 0) continue;
    for (std::size_t j = 0; j < code.n(); ++j)
      out[j] = f.add(out[j], f.mul(g.raw(i, j), mi));
  }
  return out;
}

inline std::vector<FieldElement> encode(const SneedCode& code,
                                        const std::vector<FieldElement>& message) {
  std::vector<uint16_t> raw;
  raw.reserve(message.size());
  for (const auto& e : message) {
    if (e.spec() != code.spec())
      throw FieldMismatchError("message symbol from a different field");
    raw.push_back(e.value());
  }
  auto y = encode_raw(code, raw);
  std::vector<FieldElement> out;
  out.reserve(y.size());
  for (uint16_t v : y) out.emplace_back(v, code.spec());
  return out;
}

/// Recover the message from the symbols outside the erasure pattern.
/// Values at erased positions are ignored. The surviving columns of the
/// generator must span full rank k.
inline std::vector<uint16_t> decode_erasures_raw(
    const SneedCode& code, std::span<const uint16_t> received,
    const ErasurePattern& pattern) {
  if (received.size() != code.n())
    throw DimensionError("received vector must have n symbols");
  for (std::size_t p : pattern.positions)
    if (p >= code.n()) throw DimensionError("erased position out of range");
  const FieldSpec& f = code.spec();
  const std::size_t k = code.k();

  std::vector<std::size_t> survivors;
  for (std::size_t j = 0; j < code.n(); ++j)
    if (!pattern.contains(j)) survivors.push_back(j);

  // Surviving equations, one row per intact channel: G^T restricted.
  const std::size_t rows = survivors.size();
  const std::size_t cols = k + 1;
  std::vector<uint16_t> w(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < k; ++c)
      w[r * cols + c] = code.generator().raw(c, survivors[r]);
    w[r * cols + k] = received[survivors[r]];
  }
  const auto pivots = detail::eliminate(w, rows, cols, k, f);
  if (pivots.size() < k) {
    const bool exceeded =
        code.d() && pattern.size() > static_cast<std::size_t>(*code.d()) - 1;
    throw UnrecoverablePatternError(
        "surviving channels span rank " + std::to_string(pivots.size()) +
            " of " + std::to_string(k) +
            (exceeded ? "; erasure count exceeds code capability" : ""),
        exceeded);
  }
  for (std::size_t r = k; r < rows; ++r)
    if (w[r * cols + k] != 0)
      throw SneedError("surviving symbols are not consistent with any codeword");
  std::vector<uint16_t> out(k);
  for (std::size_t r = 0; r < k; ++r) out[r] = w[r * cols + k];
  return out;
}

inline std::vector<FieldElement> decode_erasures(
    const SneedCode& code, const std::vector<FieldElement>& received,
    const ErasurePattern& pattern) {
  std::vector<uint16_t> raw;
  raw.reserve(received.size());
  for (const auto& e : received) {
    if (e.spec() != code.spec())
      throw FieldMismatchError("received symbol from a different field");
    raw.push_back(e.value());
  }
  auto m = decode_erasures_raw(code, raw, pattern);
  std::vector<FieldElement> out;
  out.reserve(m.size());
  for (uint16_t v : m) out.emplace_back(v, code.spec());
  return out;
}

namespace detail {

inline unsigned symbol_weight(std::span<const uint16_t> v) {
  unsigned w = 0;
  for (uint16_t x : v)
    if (x != 0) ++w;
  return w;
}

}  // namespace detail

/// Minimum Hamming weight over all nonzero codewords, by full enumeration
/// of the q^k messages. Binary codes walk a Gray sequence over packed
/// codeword masks; general fields step a base-q digit counter.
inline unsigned min_distance(const SneedCode& code) {
  const FieldSpec& f = code.spec();
  const std::size_t k = code.k();
  const std::size_t n = code.n();
  double space = 1.0;
  for (std::size_t i = 0; i < k; ++i) space *= f.order();
  if (space > static_cast<double>(1u << 20))
    throw EnumerationTooLargeError(
        "codeword enumeration needs q^k <= 2^20; [" + std::to_string(n) + "," +
        std::to_string(k) + "] over GF(2^" + std::to_string(f.m()) +
        ") is too large");

  if (f.m() == 1 && n <= 64) {
    // Each Gray-code step flips one message bit, XOR-ing one generator row.
    std::vector<uint64_t> row_mask(k, 0);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (code.generator().raw(i, j)) row_mask[i] |= uint64_t{1} << j;
    uint64_t word = 0;
    unsigned best = static_cast<unsigned>(n) + 1;
    const uint64_t total = uint64_t{1} << k;
    for (uint64_t g = 1; g < total; ++g) {
      word ^= row_mask[std::countr_zero(g)];
      best = std::min(best, static_cast<unsigned>(std::popcount(word)));
    }
    return best;
  }

  std::vector<uint16_t> message(k, 0);
  unsigned best = static_cast<unsigned>(n) + 1;
  while (true) {
    std::size_t pos = 0;
    while (pos < k) {
      if (++message[pos] < f.order()) break;
      message[pos] = 0;
      ++pos;
    }
    if (pos == k) break;
    best = std::min(best, detail::symbol_weight(encode_raw(code, message)));
  }
  return best;
}

/// Parity-check matrix: an (n-k) x n basis of the dual code, built from the
/// reduced row echelon form of the generator.
inline FieldMatrix parity_check_matrix(const SneedCode& code) {
  const FieldSpec& f = code.spec();
  const std::size_t k = code.k();
  const std::size_t n = code.n();
  std::vector<uint16_t> w(k * n);
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t c = 0; c < n; ++c) w[r * n + c] = code.generator().raw(r, c);
  const auto pivots = detail::eliminate(w, k, n, n, f);
  std::vector<bool> is_pivot(n, false);
  for (const auto& [row, col] : pivots) is_pivot[col] = true;

  FieldMatrix h(n - k, n, f);
  std::size_t out_row = 0;
  for (std::size_t free_col = 0; free_col < n; ++free_col) {
    if (is_pivot[free_col]) continue;
    h.set_raw(out_row, free_col, 1);
    for (std::size_t p = 0; p < pivots.size(); ++p)
      h.set_raw(out_row, pivots[p].second, w[p * n + free_col]);
    ++out_row;
  }
  return h;
}

/// Minimum distance as the smallest count of linearly dependent columns of
/// the parity-check matrix. Searches weights upward, so codes with small d
/// finish without touching the message space; always terminates because any
/// n-k+1 columns of an (n-k)-row matrix are dependent.
inline unsigned min_distance_bounded(const SneedCode& code) {
  const FieldMatrix h = parity_check_matrix(code);
  const std::size_t n = code.n();
  const std::size_t r = h.rows();
  for (unsigned w = 1; w <= r + 1; ++w) {
    // Iterate all column subsets of size w in lexicographic order.
    std::vector<std::size_t> idx(w);
    for (unsigned i = 0; i < w; ++i) idx[i] = i;
    while (true) {
      if (rank(h.select_columns(idx)) < w) return w;
      std::size_t i = w;
      while (i > 0 && idx[i - 1] == n - w + (i - 1)) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < w; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return static_cast<unsigned>(r) + 1;
}

/// Classical [2^r - 1, 2^r - 1 - r, 3] binary Hamming code in the
/// parity-interleaved layout: check symbols sit at the power-of-two
/// positions, so the generator carries no identity prefix. Check position
/// 2^s covers exactly the positions whose binary expansion has bit s set.
inline SneedCode build_hamming_code(unsigned r, std::string label = "") {
  if (r < 2 || r > 7)
    throw DimensionError("supported Hamming orders are r in [2,7]");
  const unsigned n = (1u << r) - 1;
  const unsigned k = n - r;
  FieldMatrix g(k, n, FieldSpec::gf2());
  unsigned row = 0;
  for (unsigned pos = 1; pos <= n; ++pos) {
    if ((pos & (pos - 1)) == 0) continue;  // check position
    g.set_raw(row, pos - 1, 1);
    for (unsigned s = 0; s < r; ++s)
      if ((pos >> s) & 1u) g.set_raw(row, (1u << s) - 1, 1);
    ++row;
  }
  return SneedCode(std::move(g), 3,
                   label.empty() ? "[" + std::to_string(n) + "," +
                                       std::to_string(k) + ",3] Hamming"
                                 : std::move(label));
}

inline SneedCode build_code_from_catalog(const CatalogEntry& entry) {
  if (entry.type != "Hamming code")
    throw UnsupportedEntryError("no reference construction for '" + entry.type +
                                "' rows; supply a generator file instead");
  unsigned r = 0;
  while ((1u << r) < entry.n + 1) ++r;
  if ((1u << r) - 1 != entry.n || entry.k != entry.n - r)
    throw UnsupportedEntryError("catalog row is not a Hamming length");
  return build_hamming_code(r, "[" + std::to_string(entry.n) + "," +
                                   std::to_string(entry.k) + "," +
                                   std::to_string(entry.d) + "] Hamming");
}

/// Code recovering any t known-position losses: k = n - t, generator the
/// k x n power matrix whose every k columns are independent.
inline SneedCode build_vandermonde_code(unsigned n, unsigned t,
                                        const FieldSpec& spec) {
  if (t >= n) throw DimensionError("need t < n so that k = n - t >= 1");
  const unsigned k = n - t;
  return SneedCode(build_vandermonde(k, n, spec), t + 1,
                   "[" + std::to_string(n) + "," + std::to_string(k) + "," +
                       std::to_string(t + 1) + "] power matrix");
}

/// The four-channel code of the worked XOR example: three working paths and
/// one redundant path, each symbol mixing at least two messages.
inline SneedCode build_example_xor_code() {
  FieldMatrix g = FieldMatrix::from_rows(FieldSpec::gf2(), {
                                                               {1, 0, 1, 1},
                                                               {1, 1, 0, 1},
                                                               {0, 1, 1, 1},
                                                           });
  return SneedCode(std::move(g), std::nullopt, "[4,3] xor example");
}

// ---- generator file format ----------------------------------------------
// First line: "n k m poly_hex"; then k lines of n space-separated hex
// symbols. Whitespace-tolerant, '#' starts a comment line.

namespace detail {

/// Smallest element of multiplicative order q-1 for the given polynomial.
inline uint16_t find_generator(unsigned m, uint32_t poly) {
  if (m == 1) return 1;
  const uint32_t q = 1u << m;
  for (uint32_t cand = 2; cand < q; ++cand) {
    uint16_t x = static_cast<uint16_t>(cand);
    uint32_t order = 1;
    while (x != 1) {
      x = static_cast<uint16_t>(poly_mod(clmul(x, cand), poly));
      ++order;
      if (order >= q) break;
    }
    if (order == q - 1) return static_cast<uint16_t>(cand);
  }
  throw FieldConstructionError("no primitive element found; polynomial is not primitive");
}

}  // namespace detail

inline void save_generator_file(const SneedCode& code, std::ostream& out) {
  out << code.n() << ' ' << code.k() << ' ' << code.spec().m() << ' ' << std::hex
      << code.spec().primitive_poly() << std::dec << '\n';
  for (std::size_t i = 0; i < code.k(); ++i) {
    for (std::size_t j = 0; j < code.n(); ++j) {
      if (j) out << ' ';
      out << std::hex << code.generator().raw(i, j) << std::dec;
    }
    out << '\n';
  }
}

inline SneedCode load_generator(std::istream& in) {
  std::string line;
  auto next_line = [&]() -> std::string {
    while (std::getline(in, line)) {
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      return line;
    }
    throw ConfigError("generator file ended early");
  };

  std::istringstream header(next_line());
  unsigned n = 0, k = 0, m = 0;
  std::string poly_hex;
  if (!(header >> n >> k >> m >> poly_hex))
    throw ConfigError("generator file header must be 'n k m poly_hex'");
  uint32_t poly = 0;
  try {
    std::size_t used = 0;
    poly = static_cast<uint32_t>(std::stoul(poly_hex, &used, 16));
    if (used != poly_hex.size()) throw std::invalid_argument(poly_hex);
  } catch (const std::exception&) {
    throw ConfigError("bad polynomial field: " + poly_hex);
  }
  if (k < 1 || k > n) throw ConfigError("generator file needs 1 <= k <= n");
  if (m < 1 || m > 16)
    throw ConfigError("generator file field degree must be in [1,16]");

  const FieldSpec spec =
      (m >= 1 && m <= 16 && poly == FieldSpec::gf2m(m).primitive_poly())
          ? FieldSpec::gf2m(m)
          : FieldSpec(m, poly, detail::find_generator(m, poly));

  FieldMatrix g(k, n, spec);
  for (unsigned i = 0; i < k; ++i) {
    std::istringstream row(next_line());
    for (unsigned j = 0; j < n; ++j) {
      std::string cell;
      if (!(row >> cell))
        throw ConfigError("row " + std::to_string(i + 1) + " has fewer than " +
                          std::to_string(n) + " symbols");
      try {
        std::size_t used = 0;
        const unsigned long v = std::stoul(cell, &used, 16);
        if (used != cell.size() || v >= spec.order())
          throw std::invalid_argument(cell);
        g.set_raw(i, j, static_cast<uint16_t>(v));
      } catch (const std::exception&) {
        throw ConfigError("bad symbol '" + cell + "' in row " +
                          std::to_string(i + 1));
      }
    }
    std::string extra;
    if (row >> extra)
      throw ConfigError("row " + std::to_string(i + 1) + " has more than " +
                        std::to_string(n) + " symbols");
  }
  return SneedCode(std::move(g), std::nullopt, "generator file");
}

inline SneedCode load_generator_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open generator file: " + path);
  return load_generator(in);
}

}  // namespace sneed
