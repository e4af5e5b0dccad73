#include "mirs/linear_form.hpp"

#include "mirs/errors.hpp"

#include <fmt/format.h>

namespace mirs {

LinearForm& LinearForm::operator+=(const LinearForm& o)
{
    c0 += o.c0;
    calpha += o.calpha;
    ckappa += o.ckappa;
    return *this;
}

LinearForm& LinearForm::operator-=(const LinearForm& o)
{
    c0 -= o.c0;
    calpha -= o.calpha;
    ckappa -= o.ckappa;
    return *this;
}

LinearForm& LinearForm::operator*=(const Rational& s)
{
    c0 *= s;
    calpha *= s;
    ckappa *= s;
    return *this;
}

namespace {

void append_term(std::string& out, const Rational& coeff, const char* symbol)
{
    if (coeff == 0) {
        return;
    }
    bool negative = coeff < 0;
    Rational mag = abs(coeff);
    if (out.empty()) {
        out += negative ? "-" : "";
    } else {
        out += negative ? "-" : "+";
    }
    if (mag != 1) {
        out += mirs::to_string(mag) + "*";
    }
    out += symbol;
}

} // namespace

std::string LinearForm::to_string() const
{
    std::string out;
    if (c0 != 0) {
        out = mirs::to_string(c0);
    }
    append_term(out, calpha, "alpha");
    append_term(out, ckappa, "kappa");
    return out.empty() ? "0" : out;
}

std::strong_ordering compare(const LinearForm& a, const LinearForm& b, const StructureParams& p)
{
    if (a == b) {
        return std::strong_ordering::equal;
    }
    Rational va = a.evaluate(p);
    Rational vb = b.evaluate(p);
    if (va == vb) {
        throw NonGenericParameters(fmt::format("distinct forms {} and {} both evaluate to {} at {}",
                                               a.to_string(), b.to_string(), mirs::to_string(va),
                                               p.describe()));
    }
    return va < vb ? std::strong_ordering::less : std::strong_ordering::greater;
}

} // namespace mirs
