#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sneed/code.hpp"
#include "sneed/errors.hpp"
#include "sneed/matrix.hpp"

namespace sneed {

/// Bytes per packed symbol for a field degree: one byte up to GF(2^8),
/// two (big-endian) beyond. GF(2) payloads are byte-parallel: every byte
/// carries eight independent bit symbols.
inline std::size_t packed_symbol_width(unsigned m) { return m <= 8 ? 1 : 2; }

inline void pack_symbol(std::vector<uint8_t>& out, uint16_t v, unsigned m) {
  if (m > 8) out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

inline uint16_t unpack_symbol(std::span<const uint8_t> in, std::size_t index,
                              unsigned m) {
  if (m > 8)
    return static_cast<uint16_t>((in[2 * index] << 8) | in[2 * index + 1]);
  return in[index];
}

/// Apply the code to equal-length packed message strings: channel j's
/// payload holds y_j across all symbol positions. For GF(2) the whole byte
/// is combined at once; larger fields step symbol by symbol.
inline std::vector<std::vector<uint8_t>> encode_block(
    const SneedCode& code, const std::vector<std::vector<uint8_t>>& messages) {
  const FieldSpec& f = code.spec();
  if (messages.size() != code.k())
    throw DimensionError("need one message string per data channel");
  const std::size_t len = messages.empty() ? 0 : messages.front().size();
  for (const auto& m : messages)
    if (m.size() != len)
      throw DimensionError("message strings must share one length");

  std::vector<std::vector<uint8_t>> out(code.n());
  if (f.m() == 1) {
    for (std::size_t j = 0; j < code.n(); ++j) {
      out[j].assign(len, 0);
      for (std::size_t i = 0; i < code.k(); ++i) {
        if (code.generator().raw(i, j) == 0) continue;
        for (std::size_t b = 0; b < len; ++b) out[j][b] ^= messages[i][b];
      }
    }
    return out;
  }

  const std::size_t width = packed_symbol_width(f.m());
  if (len % width != 0)
    throw DimensionError("message length not a whole number of symbols");
  const std::size_t count = len / width;
  std::vector<uint16_t> column(code.k());
  for (auto& o : out) o.reserve(len);
  for (std::size_t s = 0; s < count; ++s) {
    for (std::size_t i = 0; i < code.k(); ++i) {
      column[i] = unpack_symbol(messages[i], s, f.m());
      if (column[i] >= f.order())
        throw FieldRangeError("packed symbol outside field");
    }
    const auto y = encode_raw(code, column);
    for (std::size_t j = 0; j < code.n(); ++j) pack_symbol(out[j], y[j], f.m());
  }
  return out;
}

/// Precomputed repair operator for one erasure pattern: k surviving
/// channels chosen deterministically (lowest index first among independent
/// columns) and the k x k matrix R with message_i = sum_c R[i][c] * y at
/// survivors_used[c]. Building it fails exactly when the pattern is
/// unrecoverable.
class ErasureDecoder {
public:
  ErasureDecoder(const SneedCode& code, const ErasurePattern& pattern)
      : recovery_(0, 0, code.spec()) {
    const FieldSpec& f = code.spec();
    const std::size_t k = code.k();
    for (std::size_t p : pattern.positions)
      if (p >= code.n()) throw DimensionError("erased position out of range");

    // Greedy independent subset of surviving generator columns, kept by an
    // incremental reduction: each kept column is normalized against one
    // fresh pivot row, and a candidate that reduces to zero is dependent.
    std::vector<std::vector<uint16_t>> basis;        // reduced kept columns
    std::vector<std::size_t> basis_pivot;            // pivot row per column
    for (std::size_t j = 0; j < code.n() && basis.size() < k; ++j) {
      if (pattern.contains(j)) continue;
      std::vector<uint16_t> v(k);
      for (std::size_t i = 0; i < k; ++i) v[i] = code.generator().raw(i, j);
      for (std::size_t b = 0; b < basis.size(); ++b) {
        const uint16_t factor = v[basis_pivot[b]];
        if (factor == 0) continue;
        for (std::size_t i = 0; i < k; ++i)
          v[i] = f.add(v[i], f.mul(factor, basis[b][i]));
      }
      std::size_t pivot = 0;
      while (pivot < k && v[pivot] == 0) ++pivot;
      if (pivot == k) continue;
      const uint16_t scale = f.inv(v[pivot]);
      for (std::size_t i = 0; i < k; ++i) v[i] = f.mul(v[i], scale);
      basis.push_back(std::move(v));
      basis_pivot.push_back(pivot);
      survivors_used_.push_back(j);
    }
    const std::size_t chosen = basis.size();
    if (chosen < k) {
      const bool exceeded =
          code.d() && pattern.size() > static_cast<std::size_t>(*code.d()) - 1;
      throw UnrecoverablePatternError(
          "surviving channels span rank " + std::to_string(chosen) + " of " +
              std::to_string(k) +
              (exceeded ? "; erasure count exceeds code capability" : ""),
          exceeded);
    }
    // y_sel = M * message with M[r][c] = g[c][sel_r]; invert to recover.
    FieldMatrix m_mat(k, k, f);
    for (std::size_t r = 0; r < k; ++r)
      for (std::size_t c = 0; c < k; ++c)
        m_mat.set_raw(r, c, code.generator().raw(c, survivors_used_[r]));
    recovery_ = invert(m_mat);
    field_m_ = f.m();
  }

  const std::vector<std::size_t>& survivors_used() const {
    return survivors_used_;
  }

  /// channel_payloads indexed by channel; only the survivors_used entries
  /// are read. All read payloads must share one length.
  std::vector<std::vector<uint8_t>> decode(
      const std::vector<std::vector<uint8_t>>& channel_payloads) const {
    const std::size_t k = recovery_.rows();
    std::size_t len = channel_payloads.at(survivors_used_.front()).size();
    for (std::size_t j : survivors_used_)
      if (channel_payloads.at(j).size() != len)
        throw DimensionError("survivor payloads must share one length");

    std::vector<std::vector<uint8_t>> out(k);
    if (field_m_ == 1) {
      for (std::size_t i = 0; i < k; ++i) {
        out[i].assign(len, 0);
        for (std::size_t c = 0; c < k; ++c) {
          if (recovery_.raw(i, c) == 0) continue;
          const auto& y = channel_payloads[survivors_used_[c]];
          for (std::size_t b = 0; b < len; ++b) out[i][b] ^= y[b];
        }
      }
      return out;
    }

    const FieldSpec& f = recovery_.spec();
    const std::size_t width = packed_symbol_width(field_m_);
    if (len % width != 0)
      throw DimensionError("payload length not a whole number of symbols");
    const std::size_t count = len / width;
    for (auto& o : out) o.reserve(len);
    for (std::size_t s = 0; s < count; ++s) {
      for (std::size_t i = 0; i < k; ++i) {
        uint16_t acc = 0;
        for (std::size_t c = 0; c < k; ++c) {
          const uint16_t y =
              unpack_symbol(channel_payloads[survivors_used_[c]], s, field_m_);
          if (y >= f.order())
            throw FieldRangeError("packed symbol outside field");
          acc = f.add(acc, f.mul(recovery_.raw(i, c), y));
        }
        pack_symbol(out[i], acc, field_m_);
      }
    }
    return out;
  }

private:
  std::vector<std::size_t> survivors_used_;
  FieldMatrix recovery_;
  unsigned field_m_ = 0;
};

/// One-shot block decode for the given erasure pattern.
inline std::vector<std::vector<uint8_t>> decode_block(
    const SneedCode& code, const std::vector<std::vector<uint8_t>>& payloads,
    const ErasurePattern& pattern) {
  if (payloads.size() != code.n())
    throw DimensionError("need one payload slot per channel");
  return ErasureDecoder(code, pattern).decode(payloads);
}

}  // namespace sneed
