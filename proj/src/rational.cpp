#include "mirs/rational.hpp"

#include "mirs/errors.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace mirs {

namespace {

bool valid_integer_text(std::string_view s)
{
    if (s.empty()) {
        return false;
    }
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) {
        return false;
    }
    for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
            return false;
        }
    }
    return true;
}

} // namespace

Rational parse_rational(std::string_view text)
{
    auto slash = text.find('/');
    std::string_view num = text.substr(0, slash);
    std::string_view den = slash == std::string_view::npos ? std::string_view{"1"} : text.substr(slash + 1);
    if (!valid_integer_text(num) || !valid_integer_text(den) || den[0] == '-' || den[0] == '+') {
        throw ValidationError("not a rational number: '" + std::string(text) + "'");
    }
    std::string n(num.front() == '+' ? num.substr(1) : num);
    Integer p(n, 10);
    Integer q(std::string(den), 10);
    if (q == 0) {
        throw ValidationError("zero denominator in '" + std::string(text) + "'");
    }
    Rational r(p, q);
    r.canonicalize();
    return r;
}

std::string to_string(const Rational& r)
{
    if (r.get_den() == 1) {
        return r.get_num().get_str();
    }
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

Integer binomial(long n, long k)
{
    if (k < 0 || n < 0 || k > n) {
        return 0;
    }
    Integer out;
    mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return out;
}

Integer factorial(long n)
{
    if (n < 0) {
        throw std::invalid_argument("factorial of a negative number");
    }
    Integer out;
    mpz_fac_ui(out.get_mpz_t(), static_cast<unsigned long>(n));
    return out;
}

Rational pow(const Rational& base, long exponent)
{
    if (exponent < 0) {
        if (base == 0) {
            throw std::domain_error("zero to a negative power");
        }
        return pow(Rational(1) / base, -exponent);
    }
    Rational out(1);
    Rational b(base);
    long e = exponent;
    while (e > 0) {
        if (e & 1) {
            out *= b;
        }
        b *= b;
        e >>= 1;
    }
    return out;
}

Integer floor(const Rational& r)
{
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return q;
}

Rational limit_denominator(double x, long max_den)
{
    if (!std::isfinite(x)) {
        throw ValidationError("cannot rationalize a non-finite value");
    }
    if (max_den < 1) {
        throw std::invalid_argument("max_den must be positive");
    }
    // Exact binary value of x, then the standard bounded-denominator search.
    Rational target(x);
    Integer p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    Rational rest = target;
    while (true) {
        Integer a = floor(rest);
        Integer q2 = q0 + a * q1;
        if (q2 > max_den) {
            break;
        }
        Integer p2 = p0 + a * p1;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        Rational frac = rest - Rational(a);
        if (frac == 0) {
            return Rational(p1, q1);
        }
        rest = Rational(1) / frac;
    }
    Integer k = (Integer(max_den) - q0) / q1;
    Rational bound1(p0 + k * p1, q0 + k * q1);
    Rational bound2(p1, q1);
    bound1.canonicalize();
    bound2.canonicalize();
    Rational d1 = abs(bound1 - target);
    Rational d2 = abs(bound2 - target);
    return d2 <= d1 ? bound2 : bound1;
}

} // namespace mirs
