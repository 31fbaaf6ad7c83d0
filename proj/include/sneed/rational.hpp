#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "sneed/errors.hpp"

namespace sneed {

/// Exact nonnegative rational, always stored reduced. Used for code rates
/// and measured capacity so equality checks are exact, never floating.
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Ratio() = default;
  Ratio(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (den == 0) throw DivisionByZeroError("ratio with zero denominator");
    if (num < 0 || den < 0) throw SneedError("ratio must be nonnegative");
    reduce();
  }

  void reduce() {
    const std::int64_t g = std::gcd(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    if (num == 0) den = 1;
  }

  bool operator==(const Ratio& o) const {
    return num == o.num && den == o.den;
  }
  bool operator!=(const Ratio& o) const { return !(*this == o); }

  std::string str() const {
    return std::to_string(num) + "/" + std::to_string(den);
  }
};

}  // namespace sneed
