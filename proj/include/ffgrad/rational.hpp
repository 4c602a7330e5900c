#pragma once

#include <gmpxx.h>

#include <string>

namespace ffgrad {

using Rational = mpq_class;

// Parses "a", "a/b" or a finite decimal such as "4.5" exactly.
Rational parse_rational(const std::string& text);

Rational rpow(const Rational& base, long exponent);

inline double to_double(const Rational& r) { return r.get_d(); }
inline double to_double(double r) { return r; }

// Exponentiation shared by the exact and floating code paths.
inline double rpow(double base, long exponent) {
  double out = 1.0;
  for (long i = 0; i < exponent; ++i) out *= base;
  for (long i = 0; i > exponent; --i) out /= base;
  return out;
}

std::string rational_string(const Rational& r);

}  // namespace ffgrad
