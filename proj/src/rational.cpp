#include "rksat/rational.hpp"

#include <cmath>
#include <sstream>

#include "rksat/errors.hpp"

namespace rksat {

namespace {

Integer pow10(long long e) {
  Integer out = 1;
  for (long long i = 0; i < e; ++i) out *= 10;
  return out;
}

[[noreturn]] void bad_number(std::string_view text) {
  throw Error(ErrorKind::InvalidArgument, "not a rational number: '" + std::string(text) + "'");
}

}  // namespace

Rational parse_rational(std::string_view text) {
  if (text.empty()) bad_number(text);
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const Rational num = parse_rational(text.substr(0, slash));
    const Rational den = parse_rational(text.substr(slash + 1));
    if (den == 0) bad_number(text);
    return num / den;
  }
  std::string_view body = text;
  long long exponent = 0;
  if (const auto e = body.find_first_of("eE"); e != std::string_view::npos) {
    const std::string exp_text(body.substr(e + 1));
    if (exp_text.empty()) bad_number(text);
    std::size_t used = 0;
    try {
      exponent = std::stoll(exp_text, &used);
    } catch (const std::exception&) {
      bad_number(text);
    }
    if (used != exp_text.size()) bad_number(text);
    body = body.substr(0, e);
  }
  bool negative = false;
  if (!body.empty() && (body[0] == '-' || body[0] == '+')) {
    negative = body[0] == '-';
    body.remove_prefix(1);
  }
  Integer digits = 0;
  long long fraction_digits = 0;
  bool seen_point = false, seen_digit = false;
  for (char ch : body) {
    if (ch == '.' && !seen_point) {
      seen_point = true;
      continue;
    }
    if (ch < '0' || ch > '9') bad_number(text);
    digits = digits * 10 + (ch - '0');
    seen_digit = true;
    if (seen_point) ++fraction_digits;
  }
  if (!seen_digit) bad_number(text);
  Rational value(digits, pow10(fraction_digits));
  if (exponent > 0) value *= Rational(pow10(exponent));
  if (exponent < 0) value /= Rational(pow10(-exponent));
  return negative ? Rational(-value) : value;
}

std::string to_string(const Rational& value) { return value.str(); }

double to_double(const Rational& value) { return value.convert_to<double>(); }

std::string to_decimal(const Rational& value, int digits) {
  std::ostringstream out;
  out.precision(digits);
  out << to_double(value);
  return out.str();
}

ExpBounds exp_bounds(const Rational& x, int terms) {
  if (x < 0) {
    const ExpBounds positive = exp_bounds(Rational(-x), terms);
    return {Rational(1) / positive.upper, Rational(1) / positive.lower};
  }
  if (x > 1) throw Error(ErrorKind::InvalidArgument, "exp_bounds needs |x| <= 1");
  Rational sum = 1, term = 1;
  for (int j = 1; j <= terms; ++j) {
    term = term * x / j;
    sum += term;
  }
  // Remainder of the series is at most e^x * x^{N+1}/(N+1)! <= 3 x^{N+1}/(N+1)!.
  const Rational tail = term * x / (terms + 1) * 3;
  return {sum, sum + tail};
}

Integer ceil(const Rational& value) {
  const Integer num = boost::multiprecision::numerator(value);
  const Integer den = boost::multiprecision::denominator(value);
  Integer q = num / den;  // truncates toward zero
  if (q * den != num && value > 0) q += 1;
  return q;
}

Rational simplest_between(const Rational& lo, const Rational& hi) {
  const Integer whole = boost::multiprecision::numerator(lo) / boost::multiprecision::denominator(lo);
  const Rational base(whole);
  if (base == lo) return lo;
  if (Rational(whole + 1) <= hi) return Rational(whole + 1);
  return base + 1 / simplest_between(1 / (hi - base), 1 / (lo - base));
}

}  // namespace rksat
