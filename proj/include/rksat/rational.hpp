#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/gmp.hpp>

namespace rksat {

using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  return Rational(Integer(num), Integer(den));
}

/// Parses "3", "-2/7", "0.25" or "1e-3" exactly.
Rational parse_rational(std::string_view text);

/// Decimal rendering with `digits` significant digits (for human reports only).
std::string to_decimal(const Rational& value, int digits = 12);

/// Exact "a/b" string.
std::string to_string(const Rational& value);

double to_double(const Rational& value);

/// Rational bounds on e^x with lower <= e^x <= upper, |x| <= 1.
/// `terms` Taylor terms are summed; the remainder is bounded by 3 x^{N+1}/(N+1)!.
struct ExpBounds {
  Rational lower;
  Rational upper;
};
ExpBounds exp_bounds(const Rational& x, int terms = 20);

// true iff count >= threshold where count is an integer and threshold rational.
inline bool at_least(std::size_t count, const Rational& threshold) {
  return Rational(Integer(count)) >= threshold;
}

/// ceil of a nonnegative rational.
Integer ceil(const Rational& value);

/// The rational with the smallest denominator in [lo, hi], 0 <= lo <= hi.
Rational simplest_between(const Rational& lo, const Rational& hi);

}  // namespace rksat
