#pragma once

#include "mirs/params.hpp"
#include "mirs/rational.hpp"

#include <compare>
#include <string>

namespace mirs {

/// c0 + calpha * alpha + ckappa * kappa with exact rational coefficients.
///
/// Homogeneities, orders and Taylor cutoffs live here so that two values
/// can be told apart structurally even when a rational alpha makes their
/// evaluations collide.
struct LinearForm {
    Rational c0;
    Rational calpha;
    Rational ckappa;

    static LinearForm constant(Rational c) { return {std::move(c), 0, 0}; }
    static LinearForm alpha_multiple(Rational m) { return {0, std::move(m), 0}; }

    Rational evaluate(const StructureParams& p) const
    {
        return c0 + calpha * p.alpha() + ckappa * p.kappa();
    }

    LinearForm& operator+=(const LinearForm& o);
    LinearForm& operator-=(const LinearForm& o);
    LinearForm& operator*=(const Rational& s);

    friend LinearForm operator+(LinearForm a, const LinearForm& b) { return a += b; }
    friend LinearForm operator-(LinearForm a, const LinearForm& b) { return a -= b; }
    friend LinearForm operator*(LinearForm a, const Rational& s) { return a *= s; }
    friend LinearForm operator*(const Rational& s, LinearForm a) { return a *= s; }

    friend bool operator==(const LinearForm& a, const LinearForm& b)
    {
        return a.c0 == b.c0 && a.calpha == b.calpha && a.ckappa == b.ckappa;
    }

    /// "4+5*alpha", "2+3*alpha-kappa", "alpha", "0".
    std::string to_string() const;
};

/// Compares the evaluations of a and b. Coefficient-wise equal forms
/// compare equal; distinct forms with equal evaluations raise
/// NonGenericParameters.
std::strong_ordering compare(const LinearForm& a, const LinearForm& b, const StructureParams& p);

inline bool less(const LinearForm& a, const LinearForm& b, const StructureParams& p)
{
    return compare(a, b, p) < 0;
}

} // namespace mirs
