#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rankone {

using BigInt = mpz_class;
using Rational = mpq_class;

/// Parses a decimal integer string (optional leading '-').
BigInt parse_bigint(std::string_view text);

/// Parses "p/q" or "p". The result is canonicalized.
Rational parse_rational(std::string_view text);

std::string to_string(const BigInt& value);
std::string to_string(const Rational& value);

/// Returns the value as int64 when it fits.
std::optional<std::int64_t> to_int64(const BigInt& value);

BigInt pow_big(unsigned long base, unsigned long exponent);

/// Smallest c with c*c >= n.
std::int64_t ceil_sqrt(std::int64_t n);

Rational abs(const Rational& value);
Rational min(const Rational& a, const Rational& b);
Rational max(const Rational& a, const Rational& b);

/// Closed interval [lower, upper] of exact rationals certifying an unknown value.
struct RationalInterval {
  Rational lower;
  Rational upper;

  static RationalInterval point(const Rational& value) { return {value, value}; }

  Rational width() const { return upper - lower; }
  bool exact() const { return lower == upper; }
  bool contains(const Rational& value) const { return lower <= value && value <= upper; }
  bool contains(const RationalInterval& other) const {
    return lower <= other.lower && other.upper <= upper;
  }
  Rational midpoint() const { return (lower + upper) / 2; }

  RationalInterval& operator+=(const RationalInterval& other) {
    lower += other.lower;
    upper += other.upper;
    return *this;
  }
  friend RationalInterval operator+(RationalInterval a, const RationalInterval& b) { return a += b; }
  friend RationalInterval operator-(const RationalInterval& a, const RationalInterval& b) {
    return {a.lower - b.upper, a.upper - b.lower};
  }
  friend bool operator==(const RationalInterval& a, const RationalInterval& b) {
    return a.lower == b.lower && a.upper == b.upper;
  }

  /// Multiplication by a nonnegative constant.
  RationalInterval scaled(const Rational& factor) const { return {lower * factor, upper * factor}; }

  /// Intersection of two certified enclosures of the same quantity.
  RationalInterval intersect(const RationalInterval& other) const {
    return {max(lower, other.lower), min(upper, other.upper)};
  }
};

/// Quotient of a nonnegative interval by a strictly positive one.
RationalInterval divide(const RationalInterval& num, const RationalInterval& den);

/// Product of two nonnegative intervals.
RationalInterval multiply(const RationalInterval& a, const RationalInterval& b);

/// Enclosure of |x| for x in the interval.
RationalInterval abs(const RationalInterval& x);

/// Prints "[lower, upper]", or the single value when exact.
std::ostream& operator<<(std::ostream& out, const RationalInterval& x);

}  // namespace rankone
