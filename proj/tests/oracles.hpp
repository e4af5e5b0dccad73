#pragma once

// Reference computations used by the tests. They follow the defining formulas
// as literally as possible and share no code paths with the library beyond
// the basic containers.

#include "mirs/appell.hpp"
#include "mirs/recentering.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <vector>

namespace oracle {

using mirs::Coefficient;
using mirs::FormalSeries;
using mirs::Multiindex;
using mirs::PolyIndex;
using mirs::Rational;
using mirs::StructureParams;

inline Rational q(long n, long d = 1)
{
    Rational r(n, d);
    r.canonicalize();
    return r;
}

inline int degree(const PolyIndex& n)
{
    int s = 2 * n[0];
    for (std::size_t i = 1; i < n.arity(); ++i) {
        s += n[i];
    }
    return s;
}

/// alpha (1 + (kmin-1) sum beta(k) - sum beta(n)) + 2 sum beta(k) + sum |n| beta(n)
inline Rational homogeneity(const Multiindex& b, const StructureParams& p)
{
    long K = 0, N = 0, deg = 0;
    for (const auto& [k, m] : b.kpart()) {
        K += m;
    }
    for (const auto& [n, m] : b.npart()) {
        N += m;
        deg += static_cast<long>(degree(n)) * m;
    }
    return p.alpha() * Rational(1 + (p.kmin() - 1) * K - N) + Rational(2 * K + deg);
}

inline long bracket(const Multiindex& b)
{
    long s = 0;
    for (const auto& [k, m] : b.kpart()) {
        s += static_cast<long>(k - 1) * m;
    }
    for (const auto& [n, m] : b.npart()) {
        s -= m;
    }
    return s;
}

inline Rational discounted(const Multiindex& b, const StructureParams& p)
{
    long above = 0;
    for (const auto& [k, m] : b.kpart()) {
        if (k > p.kmin()) {
            above += m;
        }
    }
    return oracle::homogeneity(b, p) - p.kappa() * Rational(above);
}

inline Rational order(const Multiindex& b, const StructureParams& p)
{
    return oracle::homogeneity(b, p) + q(p.D(), 2) * Rational(1 + oracle::bracket(b));
}

inline bool populated(const Multiindex& b, const StructureParams& p)
{
    long K = 0, N = 0;
    for (const auto& [k, m] : b.kpart()) {
        K += m;
    }
    for (const auto& [n, m] : b.npart()) {
        N += m;
    }
    if (K == 0 && N == 1) {
        return true;
    }
    if (K == 1 && b.k(p.kmin()) == 1 && N == p.kmin()) {
        return true;
    }
    return oracle::bracket(b) >= 0;
}

/// Every n in N^{1+d} with |n| <= max_degree, by brute force over the box.
inline std::vector<PolyIndex> polyindices(int d, int max_degree)
{
    std::vector<PolyIndex> out;
    std::vector<int> c(static_cast<std::size_t>(d) + 1, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == c.size()) {
            PolyIndex n(c);
            if (degree(n) <= max_degree) {
                out.push_back(n);
            }
            return;
        }
        for (int v = 0; v <= max_degree; ++v) {
            c[i] = v;
            rec(i + 1);
        }
    };
    rec(0);
    return out;
}

/// Populated beta with order <= C among those with at most maxK nonlinearity
/// units from slots kmin..max_slot, at most maxN polynomial units and total
/// polynomial degree sum |n| beta(n) <= max_degree; sorted by (order value,
/// canonical order).
inline std::vector<Multiindex> brute_force_populated(const Rational& C, const StructureParams& p, int maxK, int maxN,
                                                     int max_degree, int max_slot)
{
    std::vector<int> slots;
    for (int k = p.kmin(); k <= max_slot; k += 2) {
        slots.push_back(k);
    }
    const auto ns = polyindices(p.d(), max_degree);
    std::vector<Multiindex> kparts{Multiindex()};
    std::function<void(std::size_t, int, Multiindex)> krec = [&](std::size_t from, int left, Multiindex cur) {
        for (std::size_t i = from; i < slots.size() && left > 0; ++i) {
            Multiindex next = cur + Multiindex::f(slots[i]);
            kparts.push_back(next);
            krec(i, left - 1, next);
        }
    };
    krec(0, maxK, Multiindex());
    std::vector<Multiindex> nparts{Multiindex()};
    std::function<void(std::size_t, int, int, Multiindex)> nrec = [&](std::size_t from, int left, int deg,
                                                                       Multiindex cur) {
        for (std::size_t i = from; i < ns.size() && left > 0; ++i) {
            if (deg + degree(ns[i]) > max_degree) {
                continue;
            }
            Multiindex next = cur + Multiindex::e(ns[i]);
            nparts.push_back(next);
            nrec(i, left - 1, deg + degree(ns[i]), next);
        }
    };
    nrec(0, maxN, 0, Multiindex());

    std::vector<std::pair<Rational, Multiindex>> found;
    for (const auto& kp : kparts) {
        for (const auto& np : nparts) {
            const Multiindex b = kp + np;
            if (!oracle::populated(b, p)) {
                continue;
            }
            const Rational o = oracle::order(b, p);
            if (o <= C) {
                found.emplace_back(o, b);
            }
        }
    }
    std::sort(found.begin(), found.end());
    std::vector<Multiindex> out;
    for (auto& [o, b] : found) {
        out.push_back(b);
    }
    return out;
}

/// Gamma z^gamma as the product of z_k and of the unit images z_n + pi^(n).
inline FormalSeries gamma_of_monomial(const mirs::PiSpec& spec, const Multiindex& gamma, const StructureParams& p)
{
    Multiindex kpart;
    for (const auto& [k, m] : gamma.kpart()) {
        kpart.add_k(k, m);
    }
    FormalSeries out = FormalSeries::monomial(kpart);
    for (const auto& [n, m] : gamma.npart()) {
        FormalSeries image = FormalSeries::monomial(Multiindex::e(n));
        if (auto row = spec.entries.find(n); row != spec.entries.end()) {
            for (const auto& [b, c] : row->second) {
                image.add(b, c);
            }
        }
        for (int i = 0; i < m; ++i) {
            out = mirs::series_mul(out, image, p);
        }
    }
    return out;
}

/// dGamma z^gamma from dGamma z_k = 0, dGamma z_n = dpi^(n) and the Leibniz
/// rule dGamma(z_n a) = dpi^(n) Gamma a + (Gamma z_n) dGamma a.
inline FormalSeries dgamma_of_monomial(const mirs::PiSpec& spec, const mirs::DPiSpec& dspec, const Multiindex& gamma,
                                       const StructureParams& p)
{
    if (gamma.npart().empty()) {
        return FormalSeries();
    }
    const PolyIndex n = gamma.npart().begin()->first;
    const Multiindex rest = gamma - Multiindex::e(n);
    FormalSeries dpi;
    if (auto row = dspec.entries.find(n); row != dspec.entries.end()) {
        for (const auto& [b, c] : row->second) {
            dpi.add(b, c);
        }
    }
    return mirs::series_mul(dpi, gamma_of_monomial(spec, rest, p), p) +
           mirs::series_mul(gamma_of_monomial(spec, Multiindex::e(n), p), dgamma_of_monomial(spec, dspec, rest, p), p);
}

/// H_k(x) = sum_m (-1)^m k! / (m! (k-2m)! 2^m) sigma2^m x^{k-2m}
inline std::vector<Rational> hermite_closed_form(int k, const Rational& sigma2)
{
    std::vector<Rational> c(static_cast<std::size_t>(k) + 1, Rational(0));
    for (int m = 0; 2 * m <= k; ++m) {
        const Rational coef = Rational(mirs::factorial(k)) /
                              Rational(mirs::factorial(m) * mirs::factorial(k - 2 * m) * mirs::Integer(1 << m));
        c[static_cast<std::size_t>(k - 2 * m)] = (m % 2 ? -coef : coef) * mirs::pow(sigma2, m);
    }
    return c;
}

/// E[Z^j] = (j-1)!! sigma2^{j/2} for even j, zero for odd j.
inline std::vector<Rational> gaussian_moments(const Rational& sigma2, int K)
{
    std::vector<Rational> m;
    for (int j = 0; j <= K; ++j) {
        if (j % 2) {
            m.push_back(0);
            continue;
        }
        Rational dbl = 1;
        for (int i = j - 1; i > 0; i -= 2) {
            dbl *= i;
        }
        m.push_back(dbl * mirs::pow(sigma2, j / 2));
    }
    return m;
}

/// W_0 = 1, W_k = k * antiderivative(W_{k-1}) + c with c fixed by E[W_k(Z)] = 0.
inline std::vector<Rational> appell_by_integration(const std::vector<Rational>& moments, int k)
{
    std::vector<Rational> w{Rational(1)};
    for (int deg = 1; deg <= k; ++deg) {
        std::vector<Rational> next(static_cast<std::size_t>(deg) + 1, Rational(0));
        for (int j = 0; j < deg; ++j) {
            next[static_cast<std::size_t>(j) + 1] = Rational(deg) * w[static_cast<std::size_t>(j)] / Rational(j + 1);
        }
        Rational mean = 0;
        for (int j = 1; j <= deg; ++j) {
            mean += next[static_cast<std::size_t>(j)] * moments[static_cast<std::size_t>(j)];
        }
        next[0] = -mean;
        w = std::move(next);
    }
    return w;
}

/// W_k(P + sum_i c_i z^{b_i}) = sum_j a_j (P + ...)^j expanded over ordered
/// j-tuples of summands, then cut at order <= cutoff.
inline std::map<Multiindex, Coefficient> appell_of_series_brute(const std::vector<Rational>& a,
                                                                const std::vector<std::pair<Multiindex, Rational>>& terms,
                                                                const Coefficient& P, const Rational& cutoff,
                                                                const StructureParams& p)
{
    std::vector<std::pair<Multiindex, Coefficient>> summands{{Multiindex(), P}};
    for (const auto& [b, c] : terms) {
        summands.emplace_back(b, Coefficient(c));
    }
    std::map<Multiindex, Coefficient> out;
    for (std::size_t j = 0; j < a.size(); ++j) {
        std::vector<std::size_t> idx(j, 0);
        while (true) {
            Multiindex b;
            Coefficient c(a[j]);
            for (std::size_t i : idx) {
                b += summands[i].first;
                c = c * summands[i].second;
            }
            if (oracle::order(b, p) <= cutoff) {
                out[b] += c;
            }
            std::size_t pos = 0;
            while (pos < j && ++idx[pos] == summands.size()) {
                idx[pos++] = 0;
            }
            if (pos == j) {
                break;
            }
        }
    }
    for (auto it = out.begin(); it != out.end();) {
        it = it->second.is_zero() ? out.erase(it) : std::next(it);
    }
    return out;
}

inline Rational random_rational(std::mt19937_64& rng, long max_num = 3, long max_den = 3)
{
    std::uniform_int_distribution<long> num(-max_num, max_num);
    std::uniform_int_distribution<long> den(1, max_den);
    long n = 0;
    while (n == 0) {
        n = num(rng);
    }
    return q(n, den(rng));
}

} // namespace oracle
