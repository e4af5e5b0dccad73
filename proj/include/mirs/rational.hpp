#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace mirs {

using Rational = mpq_class;
using Integer = mpz_class;

/// num/den in canonical form (mpq_class(num, den) alone is not reduced).
inline Rational ratio(const Integer& num, const Integer& den)
{
    Rational r(num, den);
    r.canonicalize();
    return r;
}

/// Parses "p/q", "p" or "-p/q". Throws ValidationError on anything else.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" (or "p" when the denominator is one).
std::string to_string(const Rational& r);

Integer binomial(long n, long k);
Integer factorial(long n);
Rational pow(const Rational& base, long exponent);

inline double to_double(const Rational& r) { return r.get_d(); }

/// Best rational approximation of x with denominator at most max_den
/// (continued-fraction convergents and semiconvergents).
Rational limit_denominator(double x, long max_den);

/// Largest integer <= r.
Integer floor(const Rational& r);

inline bool is_integer(const Rational& r) { return r.get_den() == 1; }

} // namespace mirs
