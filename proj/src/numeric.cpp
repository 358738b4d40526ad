#include "rankone/numeric.hpp"

#include "rankone/error.hpp"

#include <cctype>
#include <ostream>
#include <limits>

namespace rankone {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::CommonColumnRequired: return "CommonColumnRequired";
    case ErrorKind::UniquenessRequired: return "UniquenessRequired";
    case ErrorKind::StageTooSmall: return "StageTooSmall";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace {

bool is_integer_literal(std::string_view text) {
  if (text.empty()) return false;
  std::size_t i = (text[0] == '-' || text[0] == '+') ? 1 : 0;
  if (i == text.size()) return false;
  for (; i < text.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) return false;
  }
  return true;
}

}  // namespace

BigInt parse_bigint(std::string_view text) {
  if (!is_integer_literal(text)) {
    throw Error(ErrorKind::InvalidArgument, "not a decimal integer: '" + std::string(text) + "'");
  }
  if (text[0] == '+') text.remove_prefix(1);
  return BigInt(std::string(text), 10);
}

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_bigint(text));
  const BigInt num = parse_bigint(text.substr(0, slash));
  const BigInt den = parse_bigint(text.substr(slash + 1));
  if (den == 0) throw Error(ErrorKind::InvalidArgument, "zero denominator in '" + std::string(text) + "'");
  Rational value(num, den);
  value.canonicalize();
  return value;
}

std::string to_string(const BigInt& value) { return value.get_str(); }

std::string to_string(const Rational& value) {
  Rational copy(value);
  copy.canonicalize();
  return copy.get_str();
}

std::optional<std::int64_t> to_int64(const BigInt& value) {
  if (!mpz_fits_slong_p(value.get_mpz_t())) return std::nullopt;
  static_assert(sizeof(long) == sizeof(std::int64_t));
  return static_cast<std::int64_t>(value.get_si());
}

BigInt pow_big(unsigned long base, unsigned long exponent) {
  BigInt out;
  mpz_ui_pow_ui(out.get_mpz_t(), base, exponent);
  return out;
}

std::int64_t ceil_sqrt(std::int64_t n) {
  if (n <= 0) return 0;
  std::int64_t c = 0;
  while (c * c < n) ++c;
  return c;
}

Rational abs(const Rational& value) { return value < 0 ? Rational(-value) : value; }
Rational min(const Rational& a, const Rational& b) { return a < b ? a : b; }
Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

RationalInterval divide(const RationalInterval& num, const RationalInterval& den) {
  if (den.lower <= 0) throw Error(ErrorKind::InvalidArgument, "division by an interval not bounded away from 0");
  return {num.lower / den.upper, num.upper / den.lower};
}

RationalInterval multiply(const RationalInterval& a, const RationalInterval& b) {
  return {a.lower * b.lower, a.upper * b.upper};
}

RationalInterval abs(const RationalInterval& x) {
  if (x.lower >= 0) return x;
  if (x.upper <= 0) return {-x.upper, -x.lower};
  return {Rational(0), max(-x.lower, x.upper)};
}

std::ostream& operator<<(std::ostream& out, const RationalInterval& x) {
  if (x.exact()) return out << to_string(x.lower);
  return out << '[' << to_string(x.lower) << ", " << to_string(x.upper) << ']';
}

}  // namespace rankone
