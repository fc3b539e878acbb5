#pragma once

#include <gmpxx.h>

#include <cctype>
#include <string>
#include <string_view>

#include "subspec/error.hpp"

namespace subspec {

using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

/// Exact conversion of a finite double.
inline Rational rational_from_double(double x) {
  Rational q(x);
  q.canonicalize();
  return q;
}

inline double to_double(const Rational& q) { return q.get_d(); }

inline std::string to_string(const Rational& q) { return q.get_str(); }

/// Accepts "3", "-3/4", "0.125", "1e-3", "2.5E2". Decimals are converted exactly.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&] { throw Error(ErrorKind::ParseError, "not a rational number: '" + std::string(text) + "'"); };
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) fail();

  if (auto slash = s.find('/'); slash != std::string::npos) {
    Rational num = parse_rational(s.substr(0, slash));
    Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) fail();
    Rational q = num / den;
    q.canonicalize();
    return q;
  }

  std::size_t pos = 0;
  bool negative = false;
  if (s[pos] == '+' || s[pos] == '-') negative = s[pos++] == '-';
  std::string digits;
  long frac_digits = 0;
  bool seen_point = false;
  for (; pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.'); ++pos) {
    if (s[pos] == '.') {
      if (seen_point) fail();
      seen_point = true;
    } else {
      digits.push_back(s[pos]);
      if (seen_point) ++frac_digits;
    }
  }
  if (digits.empty()) fail();
  long exponent = 0;
  if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
    ++pos;
    std::size_t used = 0;
    try {
      exponent = std::stol(s.substr(pos), &used);
    } catch (const std::exception&) {
      fail();
    }
    pos += used;
  }
  if (pos != s.size()) fail();

  mpz_class mantissa(digits, 10);
  long shift = exponent - frac_digits;
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
  Rational q = shift < 0 ? Rational(mantissa, scale) : Rational(mantissa * scale);
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

}  // namespace subspec
