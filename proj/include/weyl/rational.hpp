#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

#include "weyl/errors.hpp"

namespace weyl {

// Exact arithmetic scalar types.  cpp_rational keeps values in lowest terms
// with a positive denominator, which is exactly the representation contract
// for rational scalars in this library.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline BigInt rat_num(const Rational& r) { return numerator(r); }
inline BigInt rat_den(const Rational& r) { return denominator(r); }

inline BigInt int_gcd(BigInt a, BigInt b) { return boost::multiprecision::gcd(a, b); }
inline BigInt int_lcm(BigInt a, BigInt b) { return boost::multiprecision::lcm(a, b); }

// Least positive rational x such that x * r is an integer for r != 0.
inline Rational rational_period(const Rational& r) {
  if (r == 0) throw PreconditionError("rational_period of zero");
  return Rational(rat_den(r), abs(rat_num(r)));
}

// lcm over rationals: least positive rational that is an integer multiple of
// both arguments.  lcm(a/b, c/d) = lcm(a,c) / gcd(b,d) in lowest terms.
inline Rational rational_lcm(const Rational& x, const Rational& y) {
  if (x == 0 || y == 0) throw PreconditionError("rational_lcm of zero");
  return Rational(int_lcm(abs(rat_num(x)), abs(rat_num(y))),
                  int_gcd(rat_den(x), rat_den(y)));
}

// Parses "p", "-p", or "p/q".
inline Rational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(BigInt(s));
    BigInt p(s.substr(0, slash));
    BigInt q(s.substr(slash + 1));
    if (q <= 0) throw PreconditionError("rational denominator must be positive: " + s);
    return Rational(p, q);
  } catch (const std::runtime_error&) {
    throw PreconditionError("cannot parse rational: " + s);
  }
}

inline std::string to_string(const Rational& r) {
  if (rat_den(r) == 1) return rat_num(r).str();
  return rat_num(r).str() + "/" + rat_den(r).str();
}

}  // namespace weyl
