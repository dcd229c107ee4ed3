#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace causalbell {

// All arithmetic in the library is exact. Rational is GMP's canonical
// arbitrary-precision rational (reduced form, positive denominator).
using Rational = mpq_class;
using Integer = mpz_class;

inline Rational make_rational(long num, long den = 1) {
  if (den == 0) throw std::invalid_argument("rational: zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline Rational make_rational(const Integer& num, const Integer& den) {
  if (den == 0) throw std::invalid_argument("rational: zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

// Parses "p/q" or "p" (base 10, optional leading '-'). Anything else is
// rejected, including floats and whitespace.
inline Rational parse_rational(std::string_view text) {
  auto bad = [&] {
    return std::invalid_argument("rational: cannot parse '" + std::string(text) + "'");
  };
  if (text.empty()) throw bad();
  const auto slash = text.find('/');
  auto parse_int = [&](std::string_view s) {
    if (s.empty()) throw bad();
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) throw bad();
    for (; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') throw bad();
    return Integer(std::string(s), 10);
  };
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  if (text.find('/', slash + 1) != std::string_view::npos) throw bad();
  Integer num = parse_int(text.substr(0, slash));
  Integer den = parse_int(text.substr(slash + 1));
  if (den == 0) throw bad();
  return make_rational(num, den);
}

// Canonical textual form: "p/q" for non-integers, plain integer otherwise.
inline std::string to_string(const Rational& q) { return q.get_str(); }

using RationalVector = std::vector<Rational>;

inline Rational dot(const RationalVector& a, const RationalVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != 0 && b[i] != 0) s += a[i] * b[i];
  return s;
}

} // namespace causalbell
