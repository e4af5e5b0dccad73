#pragma once

#include "mirs/formal_series.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mirs {

/// m_0 = 1, m_1, ..., m_K with m_j = E[Z^j].
template <class T>
struct BasicMomentSequence {
    std::vector<T> m;
    std::size_t max_order() const { return m.empty() ? 0 : m.size() - 1; }
};
using MomentSequence = BasicMomentSequence<Rational>;

/// Monic polynomial sum_j coeffs[j] phi^j of degree coeffs.size() - 1.
template <class T>
struct BasicAppellPolynomial {
    std::vector<T> coeffs;
    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};
using AppellPolynomial = BasicAppellPolynomial<Rational>;

/// Moments of N(0, sigma2) up to order K.
MomentSequence gaussian_moments(const Rational& sigma2, int K);

/// ValidationError unless m_0 = 1 (and, when asked, every odd moment is zero).
void validate_moments(const MomentSequence& m, bool assert_symmetric = false);

/// r_0..r_K with sum r_i tau^i/i! = (sum m_i tau^i/i!)^{-1}:
///   r_0 = 1,  r_n = -sum_{i=1}^n binom(n,i) m_i r_{n-i}.
template <class T>
std::vector<T> reciprocal_mgf(const BasicMomentSequence<T>& m, int K)
{
    std::vector<T> r;
    r.reserve(static_cast<std::size_t>(K) + 1);
    r.push_back(T(1));
    for (int n = 1; n <= K; ++n) {
        T acc = T(0);
        for (int i = 1; i <= n; ++i) {
            acc += T(Rational(binomial(n, i))) * m.m.at(static_cast<std::size_t>(i)) *
                   r[static_cast<std::size_t>(n - i)];
        }
        r.push_back(T(0) - acc);
    }
    return r;
}

/// W_k(phi) = sum_j binom(k,j) r_{k-j} phi^j.
template <class T>
BasicAppellPolynomial<T> appell_from_moments(const BasicMomentSequence<T>& m, int k)
{
    const auto r = reciprocal_mgf(m, k);
    BasicAppellPolynomial<T> w;
    w.coeffs.reserve(static_cast<std::size_t>(k) + 1);
    for (int j = 0; j <= k; ++j) {
        w.coeffs.push_back(T(Rational(binomial(k, j))) * r[static_cast<std::size_t>(k - j)]);
    }
    return w;
}

/// H_0 = 1, H_1 = phi, H_{k+1} = phi H_k - k sigma2 H_{k-1}.
AppellPolynomial hermite(int k, const Rational& sigma2);

/// Coefficientwise derivative.
AppellPolynomial derivative(const AppellPolynomial& w);

/// eps^{alpha k} W_k(eps^{-alpha} phi) = sum_j a_j eps^{alpha (k-j)} phi^j.
struct RescaledAppell {
    int k = 0;
    std::vector<Rational> a;
    /// exponent[j] = alpha (k - j)
    std::vector<Rational> exponent;
    Rational eps;

    /// a_j eps^{exponent[j]} in double precision.
    double coefficient(int j) const;
    /// The same, exactly, when eps^{exponent[j]} is rational.
    std::optional<Rational> exact_coefficient(int j) const;
};
RescaledAppell appell_rescale(const AppellPolynomial& w, const Rational& alpha, const Rational& eps);

/// The rescaled coefficients with t = eps^alpha kept as a symbol: a_j t^{k-j}.
std::vector<Coefficient> appell_rescale_symbolic(const AppellPolynomial& w, const std::string& t);

/// x^e for rational x > 0 and rational e when the result is rational.
std::optional<Rational> exact_rational_power(const Rational& x, const Rational& e);

/// Name of the atom W_m(Pi_0).
std::string w_atom(int m);

/// (W_k(Pi))_beta = sum_l binom(k,l) W_{k-l}(Pi_0) sum_{b_1+...+b_l = beta, b_i != 0} Pi_{b_1}...Pi_{b_l},
/// with W_m(Pi_0) kept as the atom w_atom(m) (W_0 = 1). The coefficient of pi
/// at the empty multiindex is ignored. Truncated at cutoff.
FormalSeries compose_faa_di_bruno(int k, const FormalSeries& pi, const Rational& cutoff, const StructureParams& p);

/// Replaces every atom W_m(Pi_0) by the polynomial ws[m] evaluated at the
/// coefficient pi0.
FormalSeries expand_w_atoms(const FormalSeries& s, const std::vector<AppellPolynomial>& ws, const Coefficient& pi0);

} // namespace mirs
