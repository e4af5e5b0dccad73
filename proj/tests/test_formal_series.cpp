#include "oracles.hpp"

#include "mirs/formal_series.hpp"

#include <doctest.h>

#include <random>

using namespace mirs;
using oracle::q;

namespace {

const PolyIndex e0 = PolyIndex::zero(3);

FormalSeries random_series(std::mt19937_64& rng, const std::vector<Multiindex>& pool, int max_terms = 3)
{
    std::uniform_int_distribution<int> count(0, max_terms);
    std::uniform_int_distribution<std::size_t> which(0, pool.size() - 1);
    std::bernoulli_distribution symbolic(0.3);
    FormalSeries s;
    for (int i = count(rng); i > 0; --i) {
        Coefficient c = oracle::random_rational(rng);
        if (symbolic(rng)) {
            c = c * Coefficient::symbol("p");
        }
        s.add(pool[which(rng)], c);
    }
    return s;
}

std::vector<Multiindex> bracket_nonnegative(const std::vector<Multiindex>& v)
{
    std::vector<Multiindex> out;
    for (const auto& b : v) {
        if (bracket(b) >= 0) {
            out.push_back(b);
        }
    }
    return out;
}

} // namespace

TEST_CASE("products of monomials")
{
    const auto p = StructureParams::defaults();
    const auto f3 = Multiindex::f(3);
    const auto s = FormalSeries::monomial(f3, q(2, 3));
    CHECK(series_mul(FormalSeries::one(), s, p) == s);
    const auto prod = series_mul(FormalSeries::monomial(f3, Coefficient::symbol("p")),
                                 FormalSeries::monomial(Multiindex::e(e0), Coefficient::symbol("q")), p);
    CHECK(prod.size() == 1);
    CHECK(prod.at(f3 + Multiindex::e(e0)) == Coefficient::symbol("p") * Coefficient::symbol("q"));

    FormalSeries a = FormalSeries::monomial(Multiindex::e(e0)) + FormalSeries::monomial(f3);
    const auto sq = series_mul(a, a, p);
    CHECK(sq.size() == 3);
    CHECK(sq.at(Multiindex::e(e0, 2)) == Coefficient(1));
    CHECK(sq.at(f3 + Multiindex::e(e0)) == Coefficient(2));
    CHECK(sq.at(Multiindex::f(3, 2)) == Coefficient(1));
}

TEST_CASE("cutoff drops high-order terms")
{
    const auto p = StructureParams::defaults();
    FormalSeries s(Rational(3));
    s.add(Multiindex::f(3), 1, p);
    s.add(Multiindex::e(e0), 1, p);
    CHECK(s.size() == 1);
    CHECK(s.at(Multiindex::f(3)).is_zero());
}

TEST_CASE("derivatives")
{
    const auto n = PolyIndex({0, 1, 0, 0});
    CHECK(series_derivative(FormalSeries::monomial(Multiindex::e(n)), n) == FormalSeries::one());
    CHECK(series_derivative(FormalSeries::monomial(Multiindex::e(n, 2)), n) ==
          FormalSeries::monomial(Multiindex::e(n), 2));
    CHECK(series_derivative(FormalSeries::monomial(Multiindex::f(3)), n).is_zero());
    const auto d = series_derivative(FormalSeries::monomial(Multiindex::f(3) + Multiindex::e(e0, 2), q(1, 2)), e0);
    CHECK(d == FormalSeries::monomial(Multiindex::f(3) + Multiindex::e(e0), 1));
}

TEST_CASE("projections")
{
    const auto p = StructureParams::defaults();
    CHECK(project_T(FormalSeries::monomial(Multiindex::f(3) + Multiindex::e(e0, 4)), p).is_zero());
    CHECK(project_Ttilde(FormalSeries::monomial(Multiindex::e(e0))).is_zero());
    const auto s = FormalSeries::monomial(Multiindex::f(3) + Multiindex::e(e0, 2));
    CHECK(project_Ttilde(s) == s);
    CHECK(project_T(FormalSeries::monomial(Multiindex::f(3) + Multiindex::e(e0, 3)), p).size() == 1);
}

TEST_CASE("ring laws on random series")
{
    const auto p = StructureParams::defaults();
    const auto pool = enumerate_populated(Rational(4), p);
    std::mt19937_64 rng(21);
    for (int t = 0; t < 100; ++t) {
        const auto a = random_series(rng, pool);
        const auto b = random_series(rng, pool);
        const auto c = random_series(rng, pool);
        CHECK(series_mul(a, b, p) == series_mul(b, a, p));
        CHECK(series_mul(series_mul(a, b, p), c, p) == series_mul(a, series_mul(b, c, p), p));
        CHECK(series_mul(a, b + c, p) == series_mul(a, b, p) + series_mul(a, c, p));
        CHECK((a - a).is_zero());
        const auto ab = series_mul(a, b, p);
        for (const auto& [beta, coef] : ab.terms()) {
            CHECK(!coef.is_zero());
        }
    }
}

TEST_CASE("D^n is a derivation and maps T into Ttilde")
{
    const auto p = StructureParams::defaults();
    const auto pool = enumerate_populated(Rational(5), p);
    const auto ns = oracle::polyindices(3, 2);
    std::mt19937_64 rng(22);
    for (int t = 0; t < 100; ++t) {
        const auto a = random_series(rng, pool);
        const auto b = random_series(rng, pool);
        const auto& n = ns[static_cast<std::size_t>(t) % ns.size()];
        CHECK(series_derivative(series_mul(a, b, p), n) ==
              series_mul(series_derivative(a, n), b, p) + series_mul(a, series_derivative(b, n), p));
        const auto da = series_derivative(a, n);
        CHECK(project_Ttilde(da) == da);
    }
}

TEST_CASE("truncation coherence on Ttilde")
{
    const auto p = StructureParams::defaults();
    const auto pool = bracket_nonnegative(enumerate_populated(Rational(12), p));
    REQUIRE(pool.size() > 20);
    std::mt19937_64 rng(23);
    for (int t = 0; t < 100; ++t) {
        const auto a = random_series(rng, pool, 4);
        const auto b = random_series(rng, pool, 4);
        const Rational C = Rational(8 + t % 8);
        CHECK(series_mul(a, b, p).truncated(C, p) == series_mul(a.truncated(C, p), b.truncated(C, p), p));
    }
}
