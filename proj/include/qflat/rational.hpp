#pragma once

#include <gmpxx.h>

#include <string>

namespace qflat {

using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

/// "p/q" in lowest terms, or "p" when the denominator is 1.
std::string to_string(const Rational& q);

double to_double(const Rational& q);

bool is_integer(const Rational& q);

/// Rational raised to a nonnegative integer power.
Rational pow(const Rational& base, unsigned long exponent);

}  // namespace qflat
