#include "mirs/appell.hpp"

#include "mirs/errors.hpp"

#include <cmath>

#include <fmt/format.h>

namespace mirs {

MomentSequence gaussian_moments(const Rational& sigma2, int K)
{
    MomentSequence m;
    for (int j = 0; j <= K; ++j) {
        if (j % 2 == 1) {
            m.m.emplace_back(0);
            continue;
        }
        // (j-1)!! sigma2^{j/2}
        Rational v = 1;
        for (int i = j - 1; i > 0; i -= 2) {
            v *= i;
        }
        m.m.push_back(v * pow(sigma2, j / 2));
    }
    return m;
}

void validate_moments(const MomentSequence& m, bool assert_symmetric)
{
    if (m.m.empty() || m.m.front() != 1) {
        throw ValidationError("moment sequences start with m_0 = 1");
    }
    if (assert_symmetric) {
        for (std::size_t j = 1; j < m.m.size(); j += 2) {
            if (m.m[j] != 0) {
                throw ValidationError(fmt::format("odd moment m_{} = {} of a symmetric law", j, to_string(m.m[j])));
            }
        }
    }
}

AppellPolynomial hermite(int k, const Rational& sigma2)
{
    if (k < 0) {
        throw ValidationError("negative Hermite degree");
    }
    AppellPolynomial prev{{Rational(1)}};
    if (k == 0) {
        return prev;
    }
    AppellPolynomial cur{{Rational(0), Rational(1)}};
    for (int n = 1; n < k; ++n) {
        AppellPolynomial next;
        next.coeffs.assign(static_cast<std::size_t>(n) + 2, Rational(0));
        for (std::size_t j = 0; j < cur.coeffs.size(); ++j) {
            next.coeffs[j + 1] += cur.coeffs[j];
        }
        for (std::size_t j = 0; j < prev.coeffs.size(); ++j) {
            next.coeffs[j] -= Rational(n) * sigma2 * prev.coeffs[j];
        }
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

AppellPolynomial derivative(const AppellPolynomial& w)
{
    AppellPolynomial out;
    for (std::size_t j = 1; j < w.coeffs.size(); ++j) {
        out.coeffs.push_back(w.coeffs[j] * Rational(static_cast<long>(j)));
    }
    if (out.coeffs.empty()) {
        out.coeffs.emplace_back(0);
    }
    return out;
}

namespace {

std::optional<Integer> exact_root(const Integer& x, unsigned long n)
{
    Integer r;
    if (mpz_root(r.get_mpz_t(), x.get_mpz_t(), n) != 0) {
        return r;
    }
    return std::nullopt;
}

} // namespace

std::optional<Rational> exact_rational_power(const Rational& x, const Rational& e)
{
    if (x <= 0) {
        throw ValidationError("rational powers need a positive base");
    }
    const unsigned long q = e.get_den().get_ui();
    auto num = exact_root(x.get_num(), q);
    auto den = exact_root(x.get_den(), q);
    if (!num || !den) {
        return std::nullopt;
    }
    Rational root(*num, *den);
    root.canonicalize();
    return pow(root, e.get_num().get_si());
}

double RescaledAppell::coefficient(int j) const
{
    const auto i = static_cast<std::size_t>(j);
    return to_double(a.at(i)) * std::pow(to_double(eps), to_double(exponent.at(i)));
}

std::optional<Rational> RescaledAppell::exact_coefficient(int j) const
{
    const auto i = static_cast<std::size_t>(j);
    if (a.at(i) == 0) {
        return Rational(0);
    }
    auto f = exact_rational_power(eps, exponent.at(i));
    if (!f) {
        return std::nullopt;
    }
    return a[i] * *f;
}

RescaledAppell appell_rescale(const AppellPolynomial& w, const Rational& alpha, const Rational& eps)
{
    if (!(eps > 0)) {
        throw ValidationError("eps must be positive");
    }
    RescaledAppell out;
    out.k = w.degree();
    out.a = w.coeffs;
    out.eps = eps;
    for (int j = 0; j <= out.k; ++j) {
        out.exponent.push_back(alpha * Rational(out.k - j));
    }
    return out;
}

std::vector<Coefficient> appell_rescale_symbolic(const AppellPolynomial& w, const std::string& t)
{
    std::vector<Coefficient> out;
    const int k = w.degree();
    for (int j = 0; j <= k; ++j) {
        out.push_back(Coefficient::symbol(t, k - j) * w.coeffs[static_cast<std::size_t>(j)]);
    }
    return out;
}

std::string w_atom(int m)
{
    return fmt::format("W_{}(Pi0)", m);
}

FormalSeries compose_faa_di_bruno(int k, const FormalSeries& pi, const Rational& cutoff, const StructureParams& p)
{
    if (k < 0) {
        throw ValidationError("negative Appell degree");
    }
    FormalSeries rest;
    for (const auto& [b, c] : pi.terms()) {
        if (!b.empty()) {
            rest.add(b, c);
        }
    }
    // The l-th power of the non-constant part collects the ordered
    // decompositions b_1 + ... + b_l.
    FormalSeries total;
    FormalSeries power = FormalSeries::one();
    for (int l = 0; l <= k; ++l) {
        if (l > 0) {
            power = series_mul(power, rest, p);
        }
        FormalSeries term = power;
        Coefficient w = k - l == 0 ? Coefficient(1) : Coefficient::symbol(w_atom(k - l));
        term *= w * Rational(binomial(k, l));
        total += term;
    }
    return total.truncated(cutoff, p);
}

FormalSeries expand_w_atoms(const FormalSeries& s, const std::vector<AppellPolynomial>& ws, const Coefficient& pi0)
{
    std::map<std::string, Coefficient> images;
    for (std::size_t m = 1; m < ws.size(); ++m) {
        Coefficient v;
        for (std::size_t j = 0; j < ws[m].coeffs.size(); ++j) {
            v += pi0.pow(static_cast<int>(j)) * ws[m].coeffs[j];
        }
        images.emplace(w_atom(static_cast<int>(m)), std::move(v));
    }
    FormalSeries out;
    for (const auto& [b, c] : s.terms()) {
        out.add(b, c.substitute(images));
    }
    return out;
}

} // namespace mirs
