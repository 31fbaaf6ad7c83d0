#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "sneed/errors.hpp"

namespace sneed {

namespace detail {

/// Carry-less product of two polynomials over GF(2), each below degree 17.
inline uint64_t clmul(uint32_t x, uint32_t y) {
  uint64_t acc = 0;
  while (y != 0) {
    if (y & 1u) acc ^= x;
    x <<= 1;
    y >>= 1;
  }
  return acc;
}

inline unsigned poly_degree(uint64_t p) {
  unsigned d = 0;
  while (p >>= 1) ++d;
  return d;
}

/// Remainder of a modulo b, both polynomials over GF(2), b != 0.
inline uint64_t poly_mod(uint64_t a, uint64_t b) {
  const unsigned db = poly_degree(b);
  while (a != 0 && poly_degree(a) >= db)
    a ^= b << (poly_degree(a) - db);
  return a;
}

/// Log/antilog tables indexed by the field generator. Shared between
/// copies of a FieldSpec; immutable once built.
struct FieldTables {
  std::vector<uint16_t> exp;  // exp[i] = g^i, i in [0, q-1)
  std::vector<uint16_t> log;  // log[exp[i]] = i; log[0] unused
};

}  // namespace detail

/// GF(2^m) descriptor, 1 <= m <= 16: q = 2^m elements represented as bit
/// vectors, arithmetic modulo an irreducible polynomial of degree m, with a
/// designated multiplicative generator. Cheap to copy; element values are
/// plain integers below q.
class FieldSpec {
public:
  FieldSpec(unsigned m, uint32_t primitive_poly, uint16_t generator)
      : m_(m), poly_(primitive_poly), generator_(generator) {
    validate();
    if (m_ <= kTableDegreeLimit) build_tables();
  }

  static FieldSpec gf2() { return gf2m(1); }
  static FieldSpec gf256() { return gf2m(8); }

  /// Field with the default primitive polynomial for degree m. The default
  /// generator is x (value 2) for every m except m = 1, where 1 is the only
  /// nonzero element.
  static FieldSpec gf2m(unsigned m) {
    if (m < 1 || m > 16)
      throw FieldConstructionError("field degree must be in [1,16], got " +
                                   std::to_string(m));
    return FieldSpec(m, kDefaultPoly[m], m == 1 ? 1 : 2);
  }

  unsigned m() const { return m_; }
  uint32_t order() const { return 1u << m_; }
  uint32_t primitive_poly() const { return poly_; }
  uint16_t generator() const { return generator_; }

  bool operator==(const FieldSpec& o) const {
    return m_ == o.m_ && poly_ == o.poly_ && generator_ == o.generator_;
  }
  bool operator!=(const FieldSpec& o) const { return !(*this == o); }

  // Raw-value arithmetic. Callers must pass values below q; the checked
  // entry points are the FieldElement overloads below.

  uint16_t add(uint16_t x, uint16_t y) const { return x ^ y; }

  uint16_t mul(uint16_t x, uint16_t y) const {
    if (tables_) {
      if (x == 0 || y == 0) return 0;
      const auto& t = *tables_;
      return t.exp[(t.log[x] + t.log[y]) % (order() - 1)];
    }
    return mul_reference(x, y);
  }

  /// Shift-and-reduce multiply. Always available; the table path above must
  /// agree with it bit for bit.
  uint16_t mul_reference(uint16_t x, uint16_t y) const {
    return static_cast<uint16_t>(
        detail::poly_mod(detail::clmul(x, y), poly_));
  }

  uint16_t pow(uint16_t x, uint64_t e) const {
    uint16_t base = x;
    uint16_t acc = 1;
    while (e != 0) {
      if (e & 1u) acc = mul(acc, base);
      base = mul(base, base);
      e >>= 1;
    }
    return acc;
  }

  uint16_t inv(uint16_t x) const {
    if (x == 0) throw DivisionByZeroError("inverse of zero in GF(2^" +
                                          std::to_string(m_) + ")");
    if (tables_) {
      const auto& t = *tables_;
      return t.exp[(order() - 1 - t.log[x]) % (order() - 1)];
    }
    return pow(x, order() - 2);
  }

private:
  // Degrees above this skip table construction and multiply by reduction.
  static constexpr unsigned kTableDegreeLimit = 8;

  // Primitive polynomial per degree, x as a generator (except m = 1).
  static constexpr uint32_t kDefaultPoly[17] = {
      0,      0x3,    0x7,    0xB,    0x13,   0x25,   0x43,   0x89,  0x11D,
      0x211,  0x409,  0x805,  0x1053, 0x201B, 0x4443, 0x8003, 0x1100B};

  void validate() const {
    if (m_ < 1 || m_ > 16)
      throw FieldConstructionError("field degree must be in [1,16], got " +
                                   std::to_string(m_));
    if ((poly_ >> m_) != 1u)
      throw FieldConstructionError("reduction polynomial degree is not " +
                                   std::to_string(m_));
    // Irreducibility by trial division: a reducible polynomial of degree m
    // has a factor of degree at most m/2.
    for (unsigned d = 1; 2 * d <= m_; ++d) {
      for (uint32_t f = 1u << d; f < (2u << d); ++f) {
        if (detail::poly_mod(poly_, f) == 0)
          throw FieldConstructionError("reduction polynomial is reducible");
      }
    }
    if (generator_ == 0 || generator_ >= order())
      throw FieldConstructionError("generator outside field");
    // The generator must have multiplicative order exactly q-1: walking its
    // powers may not return to 1 early.
    const uint32_t q = order();
    uint16_t x = generator_;
    for (uint32_t i = 1; i + 1 < q; ++i) {
      if (x == 1)
        throw FieldConstructionError("generator order divides " +
                                     std::to_string(i) + ", expected " +
                                     std::to_string(q - 1));
      x = mul_reference(x, generator_);
    }
    if (x != 1)
      throw FieldConstructionError("generator power walk did not close");
  }

  void build_tables() {
    auto t = std::make_shared<detail::FieldTables>();
    const uint32_t q = order();
    t->exp.resize(q - 1);
    t->log.assign(q, 0);
    uint16_t x = 1;
    for (uint32_t i = 0; i + 1 < q; ++i) {
      t->exp[i] = x;
      t->log[x] = static_cast<uint16_t>(i);
      x = mul_reference(x, generator_);
    }
    tables_ = std::move(t);
  }

  unsigned m_;
  uint32_t poly_;
  uint16_t generator_;
  std::shared_ptr<const detail::FieldTables> tables_;
};

/// A value in a specific field. Carries its FieldSpec so mixed-field
/// arithmetic is rejected rather than silently wrong.
class FieldElement {
public:
  FieldElement(uint16_t value, FieldSpec spec)
      : value_(value), spec_(std::move(spec)) {
    if (value_ >= spec_.order())
      throw FieldRangeError("element value " + std::to_string(value_) +
                            " outside GF(2^" + std::to_string(spec_.m()) +
                            ")");
  }

  uint16_t value() const { return value_; }
  const FieldSpec& spec() const { return spec_; }

  bool operator==(const FieldElement& o) const {
    return spec_ == o.spec_ && value_ == o.value_;
  }
  bool operator!=(const FieldElement& o) const { return !(*this == o); }

private:
  uint16_t value_;
  FieldSpec spec_;
};

namespace detail {
inline void require_same_field(const FieldElement& x, const FieldElement& y) {
  if (x.spec() != y.spec())
    throw FieldMismatchError("operands from different fields");
}
}  // namespace detail

inline FieldElement add(const FieldElement& x, const FieldElement& y) {
  detail::require_same_field(x, y);
  return FieldElement(x.spec().add(x.value(), y.value()), x.spec());
}

inline FieldElement mul(const FieldElement& x, const FieldElement& y) {
  detail::require_same_field(x, y);
  return FieldElement(x.spec().mul(x.value(), y.value()), x.spec());
}

inline FieldElement inv(const FieldElement& x) {
  return FieldElement(x.spec().inv(x.value()), x.spec());
}

inline FieldElement pow(const FieldElement& x, uint64_t e) {
  return FieldElement(x.spec().pow(x.value(), e), x.spec());
}

inline FieldElement operator+(const FieldElement& x, const FieldElement& y) {
  return add(x, y);
}
inline FieldElement operator*(const FieldElement& x, const FieldElement& y) {
  return mul(x, y);
}

}  // namespace sneed
