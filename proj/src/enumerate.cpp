#include "mirs/errors.hpp"
#include "mirs/multiindex.hpp"

#include <algorithm>
#include <functional>

#include <fmt/format.h>

namespace mirs {

namespace {

/// All n in N^{1+d} with |n| <= max_degree, sorted by (|n|, lexicographic).
std::vector<PolyIndex> poly_indices_up_to(int d, long max_degree)
{
    std::vector<PolyIndex> out;
    if (max_degree < 0) {
        return out;
    }
    std::vector<int> c(static_cast<std::size_t>(d) + 1, 0);
    std::function<void(std::size_t, long)> rec = [&](std::size_t i, long budget) {
        if (i == c.size()) {
            out.emplace_back(c);
            return;
        }
        const long w = i == 0 ? 2 : 1;
        for (long v = 0; v * w <= budget; ++v) {
            c[i] = static_cast<int>(v);
            rec(i + 1, budget - v * w);
        }
        c[i] = 0;
    };
    rec(0, max_degree);
    std::sort(out.begin(), out.end(), [](const PolyIndex& x, const PolyIndex& y) {
        int dx = parabolic_degree(x);
        int dy = parabolic_degree(y);
        return dx != dy ? dx < dy : x < y;
    });
    return out;
}

long floor_long(const Rational& r)
{
    return floor(r).get_si();
}

using OrderFilter = std::function<bool(const LinearForm&)>;

std::vector<Multiindex> enumerate_impl(const Rational& cutoff_value, const OrderFilter& within,
                                       const StructureParams& p, const EnumerationOptions& opts)
{
    if (opts.bound_inflation < 1) {
        throw ValidationError("bound inflation must be >= 1");
    }
    const Rational alpha = p.alpha();
    const Rational a = p.a();
    const Rational halfD = ratio(p.D(), 2);
    const std::optional<Rational>& max_hom = opts.max_homogeneity;
    const int d = p.d();

    auto accept = [&](const Multiindex& beta) {
        if (max_hom && homogeneity(beta, p).evaluate(p) > *max_hom) {
            return false;
        }
        return within(order(beta, p));
    };

    std::vector<Multiindex> out;

    // Purely polynomial: |e_n|_< = |n|.
    Rational poly_cap = cutoff_value * opts.bound_inflation;
    if (max_hom) {
        poly_cap = std::min<Rational>(poly_cap, *max_hom);
    }
    for (const auto& n : poly_indices_up_to(d, floor_long(poly_cap))) {
        Multiindex beta = Multiindex::e(n);
        if (accept(beta)) {
            out.push_back(std::move(beta));
        }
    }

    // Special forms f_kmin + e_{n_1} + ... + e_{n_kmin}: order 2 + sum |n_i|.
    {
        Rational cap = (cutoff_value - 2) * opts.bound_inflation;
        if (max_hom) {
            cap = std::min<Rational>(cap, *max_hom - 2);
        }
        const long budget = floor_long(cap);
        const auto ns = poly_indices_up_to(d, budget);
        Multiindex beta = Multiindex::f(p.kmin());
        std::function<void(std::size_t, int, long)> rec = [&](std::size_t start, int count, long deg) {
            if (count == p.kmin()) {
                if (accept(beta)) {
                    out.push_back(beta);
                }
                return;
            }
            for (std::size_t i = start; i < ns.size(); ++i) {
                const long nd = parabolic_degree(ns[i]);
                if (deg + nd > budget) {
                    break;
                }
                beta.add_n(ns[i]);
                rec(i, count + 1, deg + nd);
                beta.remove_n(ns[i]);
            }
        };
        if (budget >= 0) {
            rec(0, 0, 0);
        }
    }

    // [beta] >= 0. With K = sum beta(k), S = sum (k-1) beta(k) and N <= S,
    //   |beta|_< >= alpha + D/2 + K a - S alpha + sum |n| beta(n),
    // which bounds K, S and the polynomial degree separately.
    const Rational B = (cutoff_value - alpha - halfD) * opts.bound_inflation;
    if (B < 0) {
        return out;
    }
    const long Kmax = floor_long(B / a);
    const long Smax = floor_long(B / (-alpha));
    long kupper = 1 + Smax;
    if (p.kmax()) {
        kupper = std::min<long>(kupper, *p.kmax());
    }
    std::vector<int> ks;
    for (long k = p.kmin(); k <= kupper; k += 2) {
        ks.push_back(static_cast<int>(k));
    }

    Multiindex beta;
    std::function<void(long, long)> visit_kpart = [&](long K, long S) {
        Rational deg_cap = B - Rational(K) * a + Rational(S) * alpha;
        std::optional<Rational> hom_room;
        if (max_hom) {
            hom_room = *max_hom - alpha - Rational(K) * a;
            if (*hom_room < 0) {
                return;
            }
            deg_cap = std::min<Rational>(deg_cap, *hom_room);
        }
        if (deg_cap < 0) {
            return;
        }
        const long budget = floor_long(deg_cap);
        const auto ns = poly_indices_up_to(d, budget);
        std::function<void(std::size_t, long, long, Rational)> rec =
            [&](std::size_t start, long count, long deg, Rational hom_used) {
                if (accept(beta)) {
                    out.push_back(beta);
                }
                if (count == S) {
                    return;
                }
                for (std::size_t i = start; i < ns.size(); ++i) {
                    const long nd = parabolic_degree(ns[i]);
                    if (deg + nd > budget) {
                        break;
                    }
                    Rational h = hom_used + Rational(nd) - alpha;
                    if (hom_room && h > *hom_room) {
                        break;
                    }
                    beta.add_n(ns[i]);
                    rec(i, count + 1, deg + nd, h);
                    beta.remove_n(ns[i]);
                }
            };
        rec(0, 0, 0, Rational(0));
    };

    std::function<void(std::size_t, long, long)> rec_k = [&](std::size_t i, long K, long S) {
        if (i == ks.size()) {
            visit_kpart(K, S);
            return;
        }
        const int k = ks[i];
        for (int m = 0;; ++m) {
            const long K2 = K + m;
            const long S2 = S + static_cast<long>(k - 1) * m;
            if (K2 > Kmax || S2 > Smax) {
                break;
            }
            Multiindex saved = beta;
            beta.add_k(k, m);
            rec_k(i + 1, K2, S2);
            beta = std::move(saved);
        }
    };
    rec_k(0, 0, 0);
    return out;
}

std::vector<Multiindex> finish(std::vector<Multiindex> raw, const StructureParams& p,
                               const EnumerationOptions& opts)
{
    std::vector<std::pair<Rational, Multiindex>> keyed;
    keyed.reserve(raw.size());
    for (auto& b : raw) {
        keyed.emplace_back(order(b, p).evaluate(p), std::move(b));
    }
    std::sort(keyed.begin(), keyed.end());
    keyed.erase(std::unique(keyed.begin(), keyed.end()), keyed.end());
    std::vector<Multiindex> out;
    out.reserve(keyed.size());
    for (auto& kv : keyed) {
        out.push_back(std::move(kv.second));
    }
    if (opts.check_genericity) {
        validate_genericity(out, p);
    }
    return out;
}

Rational ceil_rational(const Rational& r)
{
    return Rational(-floor(Rational(-r)));
}

} // namespace

std::vector<Multiindex> enumerate_populated(const Rational& cutoff, const StructureParams& p,
                                            const EnumerationOptions& opts)
{
    auto within = [&](const LinearForm& f) { return f.evaluate(p) <= cutoff; };
    return finish(enumerate_impl(cutoff, within, p, opts), p, opts);
}

std::vector<Multiindex> enumerate_populated(const LinearForm& cutoff, const StructureParams& p,
                                            const EnumerationOptions& opts)
{
    auto within = [&](const LinearForm& f) { return compare(f, cutoff, p) <= 0; };
    return finish(enumerate_impl(cutoff.evaluate(p), within, p, opts), p, opts);
}

void validate_genericity(std::span<const Multiindex> set, const StructureParams& p)
{
    std::vector<std::pair<Rational, std::size_t>> values;
    std::vector<LinearForm> forms;
    values.reserve(set.size());
    forms.reserve(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        forms.push_back(order(set[i], p));
        values.emplace_back(forms.back().evaluate(p), i);
    }
    std::sort(values.begin(), values.end());
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        if (values[i].first == values[i + 1].first) {
            const auto& x = forms[values[i].second];
            const auto& y = forms[values[i + 1].second];
            if (!(x == y)) {
                throw NonGenericParameters(fmt::format(
                    "orders of {} and {} coincide at {} but the forms {} and {} differ",
                    set[values[i].second].to_string(), set[values[i + 1].second].to_string(),
                    to_string(values[i].first), x.to_string(), y.to_string()));
            }
        }
    }
    for (const auto& beta : set) {
        const Rational hom = homogeneity(beta, p).evaluate(p);
        const Rational disc = discounted_homogeneity(beta, p).evaluate(p);
        if (bracket(beta) >= 0 && is_integer(disc) && disc >= 0) {
            throw NonGenericParameters(fmt::format(
                "discounted homogeneity of {} is the nonnegative integer {}", beta.to_string(),
                to_string(disc)));
        }
        if (ceil_rational(disc) < hom) {
            throw NonGenericParameters(fmt::format(
                "an integer lies between the discounted homogeneity {} and the homogeneity {} of {}",
                to_string(disc), to_string(hom), beta.to_string()));
        }
    }
}

std::vector<Multiindex> classify_degree_two(const Rational& cutoff, const StructureParams& p)
{
    EnumerationOptions opts;
    opts.max_homogeneity = Rational(2);
    const auto candidates = enumerate_populated(cutoff, p, opts);
    const LinearForm two = LinearForm::constant(2);
    std::vector<Multiindex> out;
    for (const auto& beta : candidates) {
        if (compare(homogeneity(beta, p), two, p) != 0) {
            continue;
        }
        bool poly = is_purely_polynomial(beta) && parabolic_degree(beta.npart().begin()->first) == 2;
        bool shifted = beta.k_count() == 1 && beta.npart().size() == 1 &&
                       beta.npart().begin()->first.is_zero() && beta.npart().begin()->second == p.kmin();
        if (!poly && !shifted) {
            throw LemmaViolation(fmt::format("{} has homogeneity 2 but is neither e_n with |n| = 2 nor "
                                             "f_k + {} e_0",
                                             beta.to_string(), p.kmin()));
        }
        out.push_back(beta);
    }
    return out;
}

} // namespace mirs
