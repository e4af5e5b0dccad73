#include "mirs/checks.hpp"

#include "mirs/errors.hpp"
#include "mirs/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>

namespace mirs {

namespace {

struct Tally {
    std::size_t cases = 0;
    std::optional<std::string> failure;

    void expect(bool ok, const std::function<std::string()>& what)
    {
        ++cases;
        if (!ok && !failure) {
            failure = what();
        }
    }
};

std::string point_string(const Point& x)
{
    std::string s = "(";
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += (i ? "," : "") + to_string(x[i]);
    }
    return s + ")";
}

/// (z - x)^n
Rational shifted_power(const Point& z, const Point& x, const PolyIndex& n)
{
    Rational v = 1;
    for (std::size_t i = 0; i < n.arity(); ++i) {
        v *= pow(Rational(z[i] - x[i]), n[i]);
    }
    return v;
}

/// Multisets of `count` entries of `pool` (by index, nondecreasing).
void for_each_multiset(std::size_t pool_size, int count, const std::function<void(const std::vector<std::size_t>&)>& fn)
{
    std::vector<std::size_t> pick;
    std::function<void(std::size_t)> rec = [&](std::size_t from) {
        if (static_cast<int>(pick.size()) == count) {
            fn(pick);
            return;
        }
        for (std::size_t i = from; i < pool_size; ++i) {
            pick.push_back(i);
            rec(i);
            pick.pop_back();
        }
    };
    rec(0);
}

/// Number of distinct orderings of a multiset, by listing them.
long count_orderings(std::vector<std::size_t> items)
{
    std::sort(items.begin(), items.end());
    long count = 0;
    do {
        ++count;
    } while (std::next_permutation(items.begin(), items.end()));
    return count;
}

std::vector<Multiindex> non_populated_neighbours(const std::vector<Multiindex>& set, const StructureParams& p)
{
    std::set<Multiindex> out;
    const auto ns = gen::polyindices_up_to(p.d(), 1);
    for (const auto& g : set) {
        for (const auto& n : ns) {
            for (int m = 1; m <= 2; ++m) {
                Multiindex b = g + Multiindex::e(n, m);
                if (!is_populated(b, p)) {
                    out.insert(b);
                }
            }
        }
    }
    return {out.begin(), out.end()};
}

void check_general_axioms(const PiSpec& spec, const std::vector<Multiindex>& set, const StructureParams& p,
                          std::vector<AxiomReport>& out)
{
    GammaEngine engine(spec, p);

    Tally mult;
    const std::size_t ncols = std::min<std::size_t>(set.size(), 12);
    for (std::size_t i = 0; i < ncols; ++i) {
        for (std::size_t j = i; j < ncols; ++j) {
            const Multiindex& g1 = set[i];
            const Multiindex& g2 = set[j];
            for (const auto& beta : set) {
                const Coefficient lhs = engine.entry(beta, g1 + g2);
                Coefficient rhs;
                beta.for_each_submultiindex([&](const Multiindex& b) {
                    rhs += engine.entry(b, g1) * engine.entry(beta - b, g2);
                });
                mult.expect(lhs == rhs, [&] {
                    return fmt::format("beta={}, gamma={}+{}: {} != {}", beta.to_string(), g1.to_string(),
                                       g2.to_string(), lhs.to_string(), rhs.to_string());
                });
            }
        }
    }
    out.push_back({"Gamma is multiplicative", !mult.failure, mult.cases, mult.failure});

    Tally fixk;
    for (int k = p.kmin(); k <= p.kmin() + 4; k += 2) {
        if (!p.admits_k(k)) {
            continue;
        }
        const Multiindex fk = Multiindex::f(k);
        for (const auto& beta : set) {
            const Coefficient v = engine.entry(beta, fk);
            const Coefficient want = beta == fk ? Coefficient(1) : Coefficient();
            fixk.expect(v == want, [&] { return fmt::format("Gamma_{}^{} = {}", beta.to_string(), fk.to_string(), v.to_string()); });
        }
    }
    out.push_back({"Gamma fixes the nonlinearity slots", !fixk.failure, fixk.cases, fixk.failure});

    Tally pop;
    if (spec.strict_population) {
        for (const auto& beta : non_populated_neighbours(set, p)) {
            for (const auto& gamma : set) {
                const Coefficient v = engine.entry(beta, gamma);
                pop.expect(v.is_zero(), [&] {
                    return fmt::format("non-populated row {} against column {}: {}", beta.to_string(), gamma.to_string(),
                                       v.to_string());
                });
            }
        }
    }
    out.push_back({"non-populated rows vanish on populated columns", !pop.failure, pop.cases, pop.failure});

    Tally tri;
    for (const auto& beta : set) {
        for (const auto& gamma : set) {
            if (beta == gamma) {
                continue;
            }
            const Coefficient v = engine.entry(beta, gamma);
            if (v.is_zero()) {
                continue;
            }
            const bool ok = less(homogeneity(gamma, p), homogeneity(beta, p), p) &&
                            less(discounted_homogeneity(gamma, p), discounted_homogeneity(beta, p), p) &&
                            (!spec.strict_population || precedes(gamma, beta, p));
            tri.expect(ok, [&] { return fmt::format("Gamma_{}^{} = {} is not below the diagonal", beta.to_string(), gamma.to_string(), v.to_string()); });
        }
    }
    out.push_back({"Gamma minus identity is strictly triangular", !tri.failure, tri.cases, tri.failure});
}

} // namespace

std::vector<AxiomReport> check_model_axioms(const std::vector<Point>& points, int max_degree,
                                            const StructureParams& p, const PiSpec* spec, const Rational& cutoff)
{
    if (points.empty()) {
        throw ValidationError("check_model_axioms needs at least one point");
    }
    for (const auto& x : points) {
        if (x.size() != static_cast<std::size_t>(p.d()) + 1) {
            throw ValidationError(fmt::format("point {} does not have 1+d = {} coordinates", point_string(x), p.d() + 1));
        }
    }
    std::vector<AxiomReport> out;
    const auto ns = gen::polyindices_up_to(p.d(), max_degree);

    Tally trans;
    for (const auto& x : points) {
        for (const auto& y : points) {
            for (const auto& z : points) {
                for (const auto& n : ns) {
                    for (const auto& m : ns) {
                        Rational lhs = 0;
                        for (const auto& l : ns) {
                            lhs += polynomial_sector_gamma(x, y, n, l) * polynomial_sector_gamma(y, z, l, m);
                        }
                        const Rational rhs = polynomial_sector_gamma(x, z, n, m);
                        trans.expect(lhs == rhs, [&] {
                            return fmt::format("x={}, y={}, z={}, n={}, m={}: {} != {}", point_string(x), point_string(y),
                                               point_string(z), n.to_string(), m.to_string(), to_string(lhs), to_string(rhs));
                        });
                    }
                }
            }
        }
    }
    out.push_back({"polynomial Gamma is transitive", !trans.failure, trans.cases, trans.failure});

    Tally ident;
    for (const auto& x : points) {
        for (const auto& n : ns) {
            for (const auto& m : ns) {
                const Rational v = polynomial_sector_gamma(x, x, n, m);
                ident.expect(v == (n == m ? 1 : 0), [&] {
                    return fmt::format("x={}, n={}, m={}: {}", point_string(x), n.to_string(), m.to_string(), to_string(v));
                });
            }
        }
    }
    out.push_back({"Gamma_xx is the identity", !ident.failure, ident.cases, ident.failure});

    // The engine built on the base-case spec must reproduce the binomial
    // formula on single polynomial units.
    const Point& x0 = points.front();
    const Point& y0 = points.size() > 1 ? points[1] : points.front();
    const PiSpec poly = polynomial_pi_spec(x0, y0, max_degree, p);
    {
        GammaEngine engine(poly, p);
        Tally binom;
        for (const auto& n : ns) {
            for (const auto& m : ns) {
                const Coefficient v = engine.entry(Multiindex::e(n), Multiindex::e(m));
                const Rational want = polynomial_sector_gamma(x0, y0, n, m);
                binom.expect(v == Coefficient(want), [&] {
                    return fmt::format("n={}, m={}: {} != {}", n.to_string(), m.to_string(), v.to_string(), to_string(want));
                });
            }
        }
        out.push_back({"binomial formula on polynomial units", !binom.failure, binom.cases, binom.failure});
    }

    Tally recenter;
    for (const auto& x : points) {
        for (const auto& y : points) {
            for (const auto& z : points) {
                for (const auto& n : ns) {
                    Rational lhs = 0;
                    for (const auto& m : ns) {
                        lhs += polynomial_sector_gamma(x, y, n, m) * shifted_power(z, y, m);
                    }
                    const Rational rhs = shifted_power(z, x, n);
                    recenter.expect(lhs == rhs, [&] {
                        return fmt::format("x={}, y={}, at {}, n={}: {} != {}", point_string(x), point_string(y),
                                           point_string(z), n.to_string(), to_string(lhs), to_string(rhs));
                    });
                }
            }
        }
    }
    out.push_back({"Gamma_xy Pi_y = Pi_x on polynomials (. - x)^n", !recenter.failure, recenter.cases, recenter.failure});

    Tally pm_poly;
    for (const auto& n : ns) {
        const PiMinusExpr e = expand_pi_minus(Multiindex::e(n), p);
        pm_poly.expect(e.is_zero(), [&] { return fmt::format("Pi^-_e{} = {}", n.to_string(), e.to_string()); });
    }
    out.push_back({"Pi^- vanishes on polynomial units", !pm_poly.failure, pm_poly.cases, pm_poly.failure});

    Tally special;
    const auto low = gen::polyindices_up_to(p.d(), 4);
    for_each_multiset(low.size(), p.kmin(), [&](const std::vector<std::size_t>& pick) {
        int degree = 0;
        Multiindex beta = Multiindex::f(p.kmin());
        PolyIndex total = PolyIndex::zero(p.d());
        for (std::size_t i : pick) {
            degree += parabolic_degree(low[i]);
            beta.add_n(low[i]);
            total = total + low[i];
        }
        if (degree > 4) {
            return;
        }
        const PiMinusExpr e = expand_pi_minus(beta, p);
        const long want = count_orderings(pick);
        const bool ok = e.terms.size() == 1 && e.terms[0].factor == want && e.terms[0].monomial == total &&
                        e.terms[0].pi_factors.empty() && !e.terms[0].w_index && !e.terms[0].counterterm &&
                        !e.terms[0].xi && e.terms[0].eps_exponent == LinearForm{};
        special.expect(ok, [&] { return fmt::format("Pi^-_{} = {}, expected {} (.-x)^{}", beta.to_string(), e.to_string(), want, total.to_string()); });
    });
    out.push_back({"base-case Pi^- coefficient kmin!/prod beta(n)!", !special.failure, special.cases, special.failure});

    const auto set = enumerate_populated(cutoff, p);
    check_general_axioms(spec ? *spec : poly, set, p, out);
    return out;
}

namespace gen {

Rational small_rational(Rng& rng)
{
    std::uniform_int_distribution<long> num(1, 3);
    std::uniform_int_distribution<long> den(1, 3);
    std::bernoulli_distribution neg(0.5);
    const long n = num(rng);
    return ratio(neg(rng) ? -n : n, den(rng));
}

Point random_point(Rng& rng, int d)
{
    std::uniform_int_distribution<long> num(-6, 6);
    std::uniform_int_distribution<long> den(1, 4);
    Point x;
    for (int i = 0; i <= d; ++i) {
        x.push_back(ratio(num(rng), den(rng)));
    }
    return x;
}

std::vector<PolyIndex> polyindices_up_to(int d, int max_degree)
{
    std::vector<PolyIndex> out;
    std::vector<int> c(static_cast<std::size_t>(d) + 1, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
        if (i == c.size()) {
            out.emplace_back(c);
            return;
        }
        const int w = i == 0 ? 2 : 1;
        for (int v = 0; v * w <= left; ++v) {
            c[i] = v;
            rec(i + 1, left - v * w);
        }
        c[i] = 0;
    };
    rec(0, max_degree);
    std::sort(out.begin(), out.end(), [](const PolyIndex& a, const PolyIndex& b) {
        const int da = parabolic_degree(a);
        const int db = parabolic_degree(b);
        return da != db ? da < db : a < b;
    });
    return out;
}

PiSpec random_pi_spec(Rng& rng, const std::vector<Multiindex>& pool, const StructureParams& p, int max_entries)
{
    std::vector<Multiindex> cands;
    for (const auto& b : pool) {
        if (bracket(b) >= 0 || is_purely_polynomial(b)) {
            cands.push_back(b);
        }
    }
    PiSpec s;
    s.strict_population = true;
    if (cands.empty()) {
        return s;
    }
    const auto ns = polyindices_up_to(p.d(), 3);
    std::uniform_int_distribution<int> count(1, max_entries);
    const int want = count(rng);
    for (int tries = 0; static_cast<int>(s.size()) < want && tries < 1000; ++tries) {
        const Multiindex& b = cands[rng() % cands.size()];
        const PolyIndex& n = ns[rng() % ns.size()];
        if (!less(LinearForm::constant(parabolic_degree(n)), homogeneity(b, p), p) || !s.at(n, b).is_zero()) {
            continue;
        }
        s.set(n, b, small_rational(rng));
    }
    return s;
}

DPiSpec random_dpi_spec(Rng& rng, const std::vector<Multiindex>& pool, const StructureParams& p, int max_entries)
{
    std::vector<Multiindex> cands;
    for (const auto& b : pool) {
        if (bracket(b) >= 0) {
            cands.push_back(b);
        }
    }
    const Rational bound = p.alpha() + Rational(p.D()) / p.pbar_or_default();
    std::vector<PolyIndex> ns;
    for (const auto& n : polyindices_up_to(p.d(), 2)) {
        if (Rational(parabolic_degree(n)) < bound) {
            ns.push_back(n);
        }
    }
    DPiSpec s;
    if (cands.empty() || ns.empty()) {
        return s;
    }
    std::uniform_int_distribution<int> count(1, max_entries);
    const int want = count(rng);
    for (int tries = 0; static_cast<int>(s.size()) < want && tries < 1000; ++tries) {
        s.set(ns[rng() % ns.size()], cands[rng() % cands.size()], small_rational(rng));
    }
    return s;
}

FormalSeries random_series(Rng& rng, const std::vector<Multiindex>& pool, int max_terms)
{
    FormalSeries s;
    if (pool.empty()) {
        return s;
    }
    std::uniform_int_distribution<int> count(1, max_terms);
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
        s.add(pool[rng() % pool.size()], small_rational(rng));
    }
    return s;
}

MomentSequence random_moments(Rng& rng, int K)
{
    MomentSequence m;
    m.m.push_back(1);
    for (int j = 1; j <= K; ++j) {
        m.m.push_back(small_rational(rng) * Rational(j));
    }
    return m;
}

} // namespace gen

namespace {

CheckRow make_row(const std::string& suite, const std::string& property, const Tally& t)
{
    return {suite, property, !t.failure, t.cases, t.failure.value_or("")};
}

/// Runs fn(i) for i in [0, n) on up to jobs threads; each call gets its own
/// Tally, merged in index order so the first failure reported is stable.
Tally parallel_tally(int n, int jobs, const std::function<void(int, Tally&)>& fn)
{
    std::vector<Tally> parts(static_cast<std::size_t>(n));
    const int workers = std::max(1, std::min(jobs, n));
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            try {
                for (int i = w; i < n; i += workers) {
                    fn(i, parts[static_cast<std::size_t>(i)]);
                }
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) {
        t.join();
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    Tally out;
    for (auto& t : parts) {
        out.cases += t.cases;
        if (!out.failure && t.failure) {
            out.failure = t.failure;
        }
    }
    return out;
}

bool supported_on(const FormalSeries& s, const std::function<bool(const Multiindex&)>& pred, std::string& bad)
{
    for (const auto& [b, c] : s.terms()) {
        if (!pred(b)) {
            bad = b.to_string();
            return false;
        }
    }
    return true;
}

} // namespace

std::vector<CheckRow> multiindex_suite(const StructureParams& p, const CheckOptions& o)
{
    const std::string suite = "multiindex";
    std::vector<CheckRow> rows;
    const auto set = enumerate_populated(o.max_order, p);
    const Multiindex empty;

    Tally add_hom, add_disc, add_ord;
    const LinearForm h0 = homogeneity(empty, p);
    const LinearForm d0 = discounted_homogeneity(empty, p);
    const LinearForm o0 = order(empty, p);
    for (std::size_t i = 0; i < set.size(); ++i) {
        for (std::size_t j = i; j < set.size(); ++j) {
            const Multiindex& a = set[i];
            const Multiindex& b = set[j];
            const Multiindex s = a + b;
            auto msg = [&] { return fmt::format("beta={}, beta'={}", a.to_string(), b.to_string()); };
            add_hom.expect(homogeneity(s, p) - h0 == (homogeneity(a, p) - h0) + (homogeneity(b, p) - h0), msg);
            add_disc.expect(discounted_homogeneity(s, p) - d0 ==
                                (discounted_homogeneity(a, p) - d0) + (discounted_homogeneity(b, p) - d0),
                            msg);
            add_ord.expect(order(s, p) - o0 == (order(a, p) - o0) + (order(b, p) - o0), msg);
        }
    }
    rows.push_back(make_row(suite, "homogeneity minus |0| is additive", add_hom));
    rows.push_back(make_row(suite, "discounted homogeneity minus <0> is additive", add_disc));
    rows.push_back(make_row(suite, "order minus |0|_< is additive", add_ord));

    Tally nonneg;
    for (const auto& b : set) {
        const auto ch = compare(homogeneity(b, p), h0, p);
        const auto cd = compare(discounted_homogeneity(b, p), d0, p);
        const bool ok = b.empty() ? (ch == 0 && cd == 0) : (ch > 0 && cd > 0);
        nonneg.expect(ok, [&] { return fmt::format("beta={}", b.to_string()); });
    }
    rows.push_back(make_row(suite, "homogeneities exceed their value at 0 except at 0", nonneg));

    Tally ordpos, ordfloor, e0floor;
    const Multiindex e0 = Multiindex::e(PolyIndex::zero(p.d()));
    const LinearForm half_D = LinearForm::constant(ratio(p.D(), 2));
    for (const auto& b : set) {
        if (bracket(b) >= 0) {
            const bool ok = compare(order(b, p), homogeneity(b, p) + half_D, p) >= 0 &&
                            compare(homogeneity(b, p) + half_D, LinearForm::alpha_multiple(1) + half_D, p) >= 0;
            ordpos.expect(ok, [&] { return fmt::format("beta={}", b.to_string()); });
        }
        ordfloor.expect(compare(order(b, p), homogeneity(b, p), p) >= 0, [&] { return fmt::format("beta={}", b.to_string()); });
        e0floor.expect(compare_order(e0, b, p) != OrderRelation::greater, [&] { return fmt::format("beta={}", b.to_string()); });
    }
    rows.push_back(make_row(suite, "order on [beta] >= 0 is at least |beta| + D/2 >= alpha + D/2", ordpos));
    rows.push_back(make_row(suite, "order of a populated index is at least its homogeneity", ordfloor));
    rows.push_back(make_row(suite, "e_0 precedes every populated index", e0floor));

    Tally finite;
    {
        EnumerationOptions wide;
        wide.bound_inflation = 2;
        const auto again = enumerate_populated(o.max_order, p, wide);
        finite.expect(again == set, [&] { return fmt::format("{} indices vs {} with inflated bounds", set.size(), again.size()); });
        bool sorted = true;
        for (std::size_t i = 1; i < set.size(); ++i) {
            sorted = sorted && compare_order(set[i - 1], set[i], p) != OrderRelation::greater;
        }
        finite.expect(sorted, [] { return std::string("enumeration is not sorted by order"); });
    }
    rows.push_back(make_row(suite, "enumeration is finite and stable under bound inflation", finite));

    Tally kappa;
    for (const auto& g : set) {
        const Rational h = homogeneity(g, p).evaluate(p);
        const Rational dh = discounted_homogeneity(g, p).evaluate(p);
        const long lo = floor(std::min<Rational>(h, dh)).get_si() - 1;
        const long hi = floor(std::max<Rational>(h, dh)).get_si() + 1;
        for (long m = lo; m <= hi; ++m) {
            kappa.expect((Rational(m) < h) == (Rational(m) < dh), [&] { return fmt::format("gamma={}, m={}", g.to_string(), m); });
        }
    }
    rows.push_back(make_row(suite, "integer below |gamma| iff below <gamma>", kappa));

    Tally classify;
    {
        const Rational C = 20;
        const auto got = classify_degree_two(C, p);
        std::set<Multiindex> want;
        for (const auto& n : gen::polyindices_up_to(p.d(), 2)) {
            if (parabolic_degree(n) == 2) {
                want.insert(Multiindex::e(n));
            }
        }
        for (int k = p.kmin(); p.admits_k(k); k += 2) {
            const Multiindex b = Multiindex::f(k) + Multiindex::e(PolyIndex::zero(p.d()), p.kmin());
            if (order(b, p).evaluate(p) > C) {
                break;
            }
            want.insert(b);
        }
        const std::set<Multiindex> have(got.begin(), got.end());
        classify.expect(have == want && have.size() == got.size(), [&] {
            return fmt::format("{} indices, expected {}", got.size(), want.size());
        });
    }
    rows.push_back(make_row(suite, "homogeneity-two indices are e_n with |n| = 2 and f_k + kmin e_0", classify));
    return rows;
}

std::vector<CheckRow> series_suite(const StructureParams& p, const CheckOptions& o)
{
    const std::string suite = "series";
    std::vector<CheckRow> rows;
    gen::Rng rng(o.seed ^ 0x5e1e5ULL);
    const auto pool = enumerate_populated(std::min<Rational>(o.max_order, Rational(4)), p);
    std::vector<Multiindex> tilde;
    for (const auto& b : pool) {
        if (bracket(b) >= 0) {
            tilde.push_back(b);
        }
    }
    const auto ns = gen::polyindices_up_to(p.d(), 2);

    Tally assoc, comm, dist, leibniz, dt, trunc;
    for (int t = 0; t < o.trials; ++t) {
        const FormalSeries a = gen::random_series(rng, pool);
        const FormalSeries b = gen::random_series(rng, pool);
        const FormalSeries c = gen::random_series(rng, pool);
        auto msg = [&] { return fmt::format("a={}, b={}, c={}", a.to_string(), b.to_string(), c.to_string()); };
        assoc.expect(series_mul(series_mul(a, b, p), c, p) == series_mul(a, series_mul(b, c, p), p), msg);
        comm.expect(series_mul(a, b, p) == series_mul(b, a, p), msg);
        dist.expect(series_mul(a, b + c, p) == series_mul(a, b, p) + series_mul(a, c, p), msg);

        const PolyIndex& n = ns[rng() % ns.size()];
        const FormalSeries lhs = series_derivative(series_mul(a, b, p), n);
        const FormalSeries rhs = series_mul(series_derivative(a, n), b, p) + series_mul(a, series_derivative(b, n), p);
        leibniz.expect(lhs == rhs, [&] { return fmt::format("n={}, a={}, b={}", n.to_string(), a.to_string(), b.to_string()); });

        std::string bad;
        for (const auto& m : ns) {
            const FormalSeries d = series_derivative(a, m);
            dt.expect(supported_on(d, [](const Multiindex& x) { return bracket(x) >= 0; }, bad),
                      [&] { return fmt::format("D^{} {} has a term at {}", m.to_string(), a.to_string(), bad); });
        }

        const FormalSeries ta = gen::random_series(rng, tilde);
        const FormalSeries tb = gen::random_series(rng, tilde);
        const Rational cut = Rational(2 + static_cast<long>(rng() % 3));
        trunc.expect(series_mul(ta.truncated(cut, p), tb.truncated(cut, p), p) == series_mul(ta, tb, p).truncated(cut, p),
                     [&] { return fmt::format("cutoff {}, a={}, b={}", to_string(cut), ta.to_string(), tb.to_string()); });
    }
    rows.push_back(make_row(suite, "product is associative", assoc));
    rows.push_back(make_row(suite, "product is commutative", comm));
    rows.push_back(make_row(suite, "product distributes over addition", dist));
    rows.push_back(make_row(suite, "D^n obeys the Leibniz rule", leibniz));
    rows.push_back(make_row(suite, "D^n maps populated series to [beta] >= 0", dt));
    rows.push_back(make_row(suite, "truncation commutes with products on [beta] >= 0", trunc));
    return rows;
}

std::vector<CheckRow> gamma_suite(const StructureParams& p, const CheckOptions& o)
{
    const std::string suite = "recentering";
    std::vector<CheckRow> rows;
    const auto set = enumerate_populated(o.max_order, p);

    std::vector<PiSpec> specs;
    {
        gen::Rng rng(o.seed ^ 0x9a33aULL);
        for (int t = 0; t < o.trials; ++t) {
            specs.push_back(gen::random_pi_spec(rng, set, p));
        }
    }

    // Oracle equivalence and triangularity share the computed entries.
    Tally tri;
    std::mutex tri_mutex;
    const Tally oracle = parallel_tally(o.trials, o.jobs, [&](int t, Tally& tally) {
        GammaEngine engine(specs[static_cast<std::size_t>(t)], p);
        Tally local_tri;
        for (const auto& beta : set) {
            for (const auto& gamma : set) {
                const Coefficient a = engine.entry(beta, gamma);
                const Coefficient b = engine.entry_recursive(beta, gamma);
                tally.expect(a == b, [&] {
                    return fmt::format("spec #{}, beta={}, gamma={}: {} vs {}", t, beta.to_string(), gamma.to_string(),
                                       a.to_string(), b.to_string());
                });
                const Coefficient off = beta == gamma ? a - Coefficient(1) : a;
                if (!off.is_zero()) {
                    const bool ok = less(discounted_homogeneity(gamma, p), discounted_homogeneity(beta, p), p) &&
                                    less(homogeneity(gamma, p), homogeneity(beta, p), p) && precedes(gamma, beta, p);
                    local_tri.expect(ok, [&] { return fmt::format("spec #{}, beta={}, gamma={}", t, beta.to_string(), gamma.to_string()); });
                } else {
                    ++local_tri.cases;
                }
            }
        }
        std::lock_guard lock(tri_mutex);
        tri.cases += local_tri.cases;
        if (!tri.failure && local_tri.failure) {
            tri.failure = local_tri.failure;
        }
    });
    rows.push_back(make_row(suite, "exponential formula equals unit-by-unit recursion", oracle));
    rows.push_back(make_row(suite, "Gamma minus identity is strictly triangular", tri));

    Tally deps;
    {
        gen::Rng rng(o.seed ^ 0xde95ULL);
        const std::size_t n = std::min<std::size_t>(set.size(), 40);
        for (int t = 0; t < std::max(1, o.trials / 10); ++t) {
            const PiSpec spec = gen::random_pi_spec(rng, set, p);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    const Multiindex& beta = set[i];
                    const Multiindex& gamma = set[j];
                    for (const auto& [slot_n, b] : gamma_dependencies(spec, beta, gamma, p)) {
                        const OrderRelation r = compare_order(b, beta, p);
                        const bool ok = r != OrderRelation::greater &&
                                        (is_purely_polynomial(gamma) || r == OrderRelation::less);
                        deps.expect(ok, [&, b = b] {
                            return fmt::format("Gamma_{}^{} depends on pi at {}", beta.to_string(), gamma.to_string(), b.to_string());
                        });
                    }
                }
            }
        }
    }
    rows.push_back(make_row(suite, "Gamma entries depend only on lower spec entries", deps));

    Tally deriv, dtri, maps;
    {
        gen::Rng rng(o.seed ^ 0xd1ffULL);
        const auto small = enumerate_populated(std::min<Rational>(o.max_order, Rational(4)), p);
        std::vector<Multiindex> tilde;
        for (const auto& b : small) {
            if (bracket(b) >= 0) {
                tilde.push_back(b);
            }
        }
        for (int t = 0; t < o.trials; ++t) {
            const PiSpec spec = gen::random_pi_spec(rng, small, p);
            const DPiSpec dspec = gen::random_dpi_spec(rng, small, p);
            const FormalSeries a = gen::random_series(rng, small);
            const FormalSeries b = gen::random_series(rng, small);
            const FormalSeries lhs = dgamma_apply(spec, dspec, series_mul(a, b, p), std::nullopt, p);
            const FormalSeries rhs =
                series_mul(dgamma_apply(spec, dspec, a, std::nullopt, p), gamma_apply(spec, b, std::nullopt, p), p) +
                series_mul(gamma_apply(spec, a, std::nullopt, p), dgamma_apply(spec, dspec, b, std::nullopt, p), p);
            deriv.expect(lhs == rhs, [&] { return fmt::format("trial {}: a={}, b={}", t, a.to_string(), b.to_string()); });

            std::string bad;
            const FormalSeries ta = gen::random_series(rng, tilde);
            maps.expect(supported_on(gamma_apply(spec, ta, std::nullopt, p), [](const Multiindex& x) { return bracket(x) >= 0; }, bad),
                        [&] { return fmt::format("Gamma {} has a term at {}", ta.to_string(), bad); });
            maps.expect(supported_on(gamma_apply(spec, a, std::nullopt, p), [&](const Multiindex& x) { return is_populated(x, p); }, bad),
                        [&] { return fmt::format("Gamma {} has a term at {}", a.to_string(), bad); });
            maps.expect(supported_on(dgamma_apply(spec, dspec, a, std::nullopt, p), [](const Multiindex& x) { return bracket(x) >= 0; }, bad),
                        [&] { return fmt::format("dGamma {} has a term at {}", a.to_string(), bad); });

            if (t % 10 == 0) {
                for (const auto& beta : small) {
                    for (const auto& gamma : small) {
                        const Coefficient v = dgamma_entry(spec, dspec, {beta, gamma, std::nullopt}, p);
                        dtri.expect(v.is_zero() || precedes(gamma, beta, p), [&] {
                            return fmt::format("dGamma_{}^{} = {}", beta.to_string(), gamma.to_string(), v.to_string());
                        });
                    }
                }
            }
        }
    }
    rows.push_back(make_row(suite, "dGamma is a derivation relative to Gamma", deriv));
    rows.push_back(make_row(suite, "dGamma is strictly triangular", dtri));
    rows.push_back(make_row(suite, "Gamma preserves [beta] >= 0 and populated supports; dGamma lands in [beta] >= 0", maps));

    gen::Rng rng(o.seed ^ 0x90135ULL);
    std::vector<Point> points;
    for (int i = 0; i < 3; ++i) {
        points.push_back(gen::random_point(rng, p.d()));
    }
    for (const auto& a : check_model_axioms(points, 3, p, nullptr, std::min<Rational>(o.max_order, Rational(4)))) {
        rows.push_back({suite, a.axiom, a.passed, a.cases, a.counterexample.value_or("")});
    }
    return rows;
}

std::vector<CheckRow> hierarchy_suite(const StructureParams& p, const CheckOptions& o)
{
    const std::string suite = "hierarchy";
    std::vector<CheckRow> rows;
    const auto set = enumerate_populated(o.max_order, p);

    Tally pop, bookkeeping, parity, special;
    for (const auto& b : set) {
        const PiMinusExpr e = expand_pi_minus(b, p);
        pop.expect(e.is_zero() || bracket(b) >= 0 || is_special_form(b, p),
                   [&] { return fmt::format("Pi^-_{} = {}", b.to_string(), e.to_string()); });
        // f_k + kmin e_0
        const auto& kp = b.kpart();
        const PolyIndex zero = PolyIndex::zero(p.d());
        if (kp.size() == 1 && kp.begin()->second == 1 && b.npart().size() == 1 && b.n(zero) == p.kmin()) {
            const int k = kp.begin()->first;
            const bool ok = e.terms.size() == 1 && e.terms[0].factor == Rational(binomial(k, p.kmin())) &&
                            e.terms[0].w_index == (k == p.kmin() ? std::nullopt : std::optional<int>(k - p.kmin())) &&
                            e.terms[0].eps_exponent == LinearForm::alpha_multiple(p.kmin() - k) &&
                            e.terms[0].pi_factors.empty() && !e.terms[0].counterterm;
            special.expect(ok, [&] { return fmt::format("Pi^-_{} = {}", b.to_string(), e.to_string()); });
        }
        if (bracket(b) < 0) {
            continue;
        }
        const LinearForm h = homogeneity(b, p);
        for (const auto& t : e.terms) {
            bookkeeping.expect(term_homogeneity(t, p) == h, [&] {
                return fmt::format("beta={}: term {} has homogeneity {}", b.to_string(), t.to_string(),
                                   term_homogeneity(t, p).to_string());
            });
            if (t.counterterm) {
                parity.expect(t.counterterm->k % 2 == 1 && !t.counterterm->beta.has_polynomial_part(),
                              [&] { return fmt::format("beta={}: {}", b.to_string(), t.counterterm->to_string()); });
            }
        }
    }
    Tally offpop;
    for (const auto& b : non_populated_neighbours(set, p)) {
        if (order(b, p).evaluate(p) > o.max_order) {
            continue;
        }
        const PiMinusExpr e = expand_hierarchy_formula(b, p);
        offpop.expect(e.is_zero(), [&] { return fmt::format("non-populated {} gives {}", b.to_string(), e.to_string()); });
    }
    rows.push_back(make_row(suite, "Pi^- vanishes unless [beta] >= 0 or beta is a base case", pop));
    rows.push_back(make_row(suite, "hierarchy formula vanishes on non-populated indices", offpop));
    rows.push_back(make_row(suite, "every term carries the homogeneity of its index", bookkeeping));
    rows.push_back(make_row(suite, "counterterms have odd k and no polynomial part", parity));
    rows.push_back(make_row(suite, "f_k + kmin e_0 expands to a single W_{k-kmin} term", special));

    Tally descent, topo, restrict;
    const StructureParams restricted = p.with_kmax(p.kmin());
    for (const auto& b : set) {
        if (bracket(b) < 0) {
            continue;
        }
        DependencyGraph g;
        try {
            g = dependency_graph(b, p);
        } catch (const LemmaViolation& e) {
            descent.expect(false, [&] { return fmt::format("beta={}: {}", b.to_string(), e.what()); });
            continue;
        }
        const LinearForm ob = order(b, p);
        for (const auto& r : g.roots) {
            if (r.kind == DependencyNode::Kind::xi) {
                continue;
            }
            const bool self = r.kind == DependencyNode::Kind::counterterm &&
                              r.beta + Multiindex::e(PolyIndex::zero(p.d()), r.k) == b;
            descent.expect(self ? node_order(r, p) == ob : less(node_order(r, p), ob, p),
                           [&] { return fmt::format("Pi^-_{} -> {}", b.to_string(), r.label()); });
        }
        std::map<DependencyNode, std::size_t> pos;
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            pos[g.nodes[i]] = i;
        }
        for (const auto& e : g.edges) {
            if (e.to.kind == DependencyNode::Kind::xi) {
                continue;
            }
            const auto c = compare(node_order(e.to, p), node_order(e.from, p), p);
            descent.expect(e.owned ? c == 0 : c < 0, [&] { return fmt::format("edge {} -> {}", e.from.label(), e.to.label()); });
            topo.expect(pos.at(e.to) < pos.at(e.from), [&] { return fmt::format("{} listed before {}", e.from.label(), e.to.label()); });
        }
        if (b.k_count_above(p.kmin()) == 0) {
            const DependencyGraph gr = dependency_graph(b, restricted);
            restrict.expect(gr.to_dot() == g.to_dot(), [&] { return fmt::format("beta={}", b.to_string()); });
        }
    }
    rows.push_back(make_row(suite, "dependency edges descend in the order", descent));
    rows.push_back(make_row(suite, "dependency nodes are topologically sorted", topo));
    rows.push_back(make_row(suite, "graphs without k > kmin agree with the k = kmin rebuild", restrict));

    Tally boundary;
    {
        const Multiindex b = Multiindex::f(p.kmin(), 2);
        const bool at_default = counterterm_support(1, b, p.with_alpha(Rational(-11, 20)));
        const bool at_small = counterterm_support(1, b, p.with_alpha(Rational(-2, 5)));
        bool rejected = false;
        try {
            counterterm_support(1, b, p.with_alpha(Rational(-1, 2)));
        } catch (const NonGenericParameters&) {
            rejected = true;
        }
        boundary.expect(at_default && !at_small && rejected, [&] {
            return fmt::format("c1[{}]: {} at -11/20, {} at -2/5, {}", b.to_string(), at_default, at_small,
                               rejected ? "rejected at -1/2" : "accepted at -1/2");
        });
    }
    rows.push_back(make_row(suite, "c1 support of 2f_kmin switches at alpha = -1/2", boundary));
    return rows;
}

std::vector<CheckRow> appell_suite(const StructureParams& p, const CheckOptions& o)
{
    const std::string suite = "appell";
    std::vector<CheckRow> rows;
    gen::Rng rng(o.seed ^ 0xa99e11ULL);
    const int K = 8;

    Tally law, centred, rescale;
    for (int t = 0; t < o.trials; ++t) {
        const MomentSequence m = gen::random_moments(rng, K);
        for (int k = 1; k <= K; ++k) {
            const AppellPolynomial w = appell_from_moments(m, k);
            const AppellPolynomial lower = appell_from_moments(m, k - 1);
            const AppellPolynomial dw = derivative(w);
            bool ok = dw.coeffs.size() == lower.coeffs.size();
            for (std::size_t j = 0; ok && j < dw.coeffs.size(); ++j) {
                ok = dw.coeffs[j] == Rational(k) * lower.coeffs[j];
            }
            law.expect(ok, [&] { return fmt::format("trial {}, k={}", t, k); });

            Rational mean = 0;
            for (int j = 0; j <= k; ++j) {
                mean += w.coeffs[static_cast<std::size_t>(j)] * m.m[static_cast<std::size_t>(j)];
            }
            centred.expect(mean == 0, [&] { return fmt::format("trial {}, k={}: E W_k = {}", t, k, to_string(mean)); });

            BasicMomentSequence<Coefficient> scaled;
            const Coefficient tsym = Coefficient::symbol("t");
            for (int j = 0; j <= k; ++j) {
                scaled.m.push_back(Coefficient(m.m[static_cast<std::size_t>(j)]) * tsym.pow(j));
            }
            const auto ws = appell_from_moments(scaled, k);
            const auto sym = appell_rescale_symbolic(w, "t");
            rescale.expect(ws.coeffs == sym, [&] { return fmt::format("trial {}, k={}", t, k); });
        }
    }
    rows.push_back(make_row(suite, "W_k' = k W_{k-1}", law));
    rows.push_back(make_row(suite, "W_k has mean zero under its moments", centred));
    rows.push_back(make_row(suite, "rescaling matches rescaled moments", rescale));

    Tally gauss;
    for (int t = 0; t < 10; ++t) {
        const Rational s2 = ratio(1 + static_cast<long>(rng() % 5), 1 + static_cast<long>(rng() % 4));
        const MomentSequence g = gaussian_moments(s2, K);
        for (int k = 0; k <= K; ++k) {
            gauss.expect(appell_from_moments(g, k).coeffs == hermite(k, s2).coeffs,
                         [&] { return fmt::format("sigma2={}, k={}", to_string(s2), k); });
        }
    }
    rows.push_back(make_row(suite, "Gaussian moments give Hermite polynomials", gauss));

    Tally faa;
    {
        const auto pool = enumerate_populated(std::min<Rational>(o.max_order, Rational(4)), p);
        std::vector<Multiindex> nonempty;
        for (const auto& b : pool) {
            if (!b.empty()) {
                nonempty.push_back(b);
            }
        }
        const Coefficient P = Coefficient::symbol("P");
        for (int t = 0; t < std::max(1, o.trials / 4); ++t) {
            const MomentSequence m = gen::random_moments(rng, 5);
            std::vector<AppellPolynomial> ws;
            for (int j = 0; j <= 5; ++j) {
                ws.push_back(appell_from_moments(m, j));
            }
            const FormalSeries h = gen::random_series(rng, nonempty, 4);
            const Rational cut = o.max_order;
            FormalSeries arg = h;
            arg.add(Multiindex(), P);
            for (int k = 0; k <= 5; ++k) {
                FormalSeries brute;
                FormalSeries power = FormalSeries::one();
                for (int j = 0; j <= k; ++j) {
                    if (j > 0) {
                        power = series_mul(power, arg, p);
                    }
                    FormalSeries term = power;
                    term *= Coefficient(ws[static_cast<std::size_t>(k)].coeffs[static_cast<std::size_t>(j)]);
                    brute += term;
                }
                const FormalSeries lhs = expand_w_atoms(compose_faa_di_bruno(k, arg, cut, p), ws, P);
                faa.expect(lhs == brute.truncated(cut, p), [&] { return fmt::format("k={}, pi={}", k, arg.to_string()); });
            }
        }
    }
    rows.push_back(make_row(suite, "Faa di Bruno composition equals direct expansion", faa));
    return rows;
}

std::vector<CheckRow> simulation_suite(const CheckOptions& o)
{
    const std::string suite = "simulation";
    std::vector<CheckRow> rows;
    sim::SimOptions opts = o.sim_options;
    opts.jobs = o.jobs;
    const sim::SimReport r = sim::run_simulation(o.sim_config, opts);

    Tally slope;
    slope.expect(std::abs(r.slope.slope + 2 * o.sim_config.s) <= 0.15, [&] {
        return fmt::format("slope {:.4f} +- {:.4f}, expected {:.4f}", r.slope.slope, r.slope.stderr_, -2 * o.sim_config.s);
    });
    rows.push_back(make_row(suite, "log-periodogram slope is -2s", slope));

    Tally cent;
    for (const auto& c : r.centredness) {
        cent.expect(std::abs(c.z) < 3, [&] { return fmt::format("k={}: z={:.3f}", c.k, c.z); });
    }
    rows.push_back(make_row(suite, "split-sample W_k(Z) has mean zero", cent));

    Tally var;
    for (const auto& v : r.variance_scaling) {
        var.expect(std::abs(v.ratio - v.expected) <= 3 * v.se, [&] {
            return fmt::format("eps={}: ratio {:.4f}, expected {:.4f}, se {:.4f}", v.eps, v.ratio, v.expected, v.se);
        });
    }
    rows.push_back(make_row(suite, "variance scales like eps^(2 alpha)", var));

    Tally herm;
    for (const auto& h : r.hermite) {
        herm.expect(std::abs(h.empirical - h.hermite) <= 3 * h.se, [&] {
            return fmt::format("k={}, j={}: {:.4f} vs {:.4f} (se {:.4f})", h.k, h.j, h.empirical, h.hermite, h.se);
        });
    }
    rows.push_back(make_row(suite, "empirical Appell polynomials match Hermite", herm));
    return rows;
}

std::vector<CheckRow> run_all_checks(const StructureParams& p, const CheckOptions& o)
{
    std::vector<CheckRow> rows;
    for (auto* suite : {&multiindex_suite, &series_suite, &gamma_suite, &hierarchy_suite, &appell_suite}) {
        auto part = suite(p, o);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    if (o.with_sim) {
        auto part = simulation_suite(o);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    return rows;
}

std::string format_check_table(const std::vector<CheckRow>& rows)
{
    std::size_t wsuite = 5;
    std::size_t wprop = 8;
    for (const auto& r : rows) {
        wsuite = std::max(wsuite, r.suite.size());
        wprop = std::max(wprop, r.property.size());
    }
    std::ostringstream out;
    out << fmt::format("{:<{}}  {:<{}}  {:>8}  {}\n", "suite", wsuite, "property", wprop, "cases", "status");
    for (const auto& r : rows) {
        out << fmt::format("{:<{}}  {:<{}}  {:>8}  {}\n", r.suite, wsuite, r.property, wprop, r.cases, r.passed ? "pass" : "FAIL");
        if (!r.passed) {
            out << "    counterexample: " << r.detail << "\n";
        }
    }
    const auto failed = std::count_if(rows.begin(), rows.end(), [](const CheckRow& r) { return !r.passed; });
    out << fmt::format("{} properties, {} failed\n", rows.size(), failed);
    return out.str();
}

} // namespace mirs
