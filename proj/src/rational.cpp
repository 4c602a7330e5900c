#include "ffgrad/rational.hpp"

#include <stdexcept>

namespace ffgrad {

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational");
  auto dot = text.find('.');
  if (dot == std::string::npos) {
    Rational r(text, 10);
    r.canonicalize();
    return r;
  }
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  if (digits.empty() || digits == "-") throw std::invalid_argument("bad rational: " + text);
  mpz_class num(digits, 10);
  mpz_class den = 1;
  for (size_t i = dot + 1; i < text.size(); ++i) den *= 10;
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Rational rpow(const Rational& base, long exponent) {
  Rational out = 1;
  Rational b = exponent >= 0 ? base : Rational(1) / base;
  unsigned long e = exponent >= 0 ? exponent : -exponent;
  while (e) {
    if (e & 1) out *= b;
    b *= b;
    e >>= 1;
  }
  return out;
}

std::string rational_string(const Rational& r) { return r.get_str(); }

}  // namespace ffgrad
