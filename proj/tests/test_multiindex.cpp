#include "oracles.hpp"

#include "mirs/errors.hpp"
#include "mirs/multiindex.hpp"

#include <doctest.h>

#include <random>

using namespace mirs;
using oracle::q;

namespace {

PolyIndex pi(std::vector<int> c) { return PolyIndex(std::move(c)); }
const PolyIndex e0 = PolyIndex::zero(3);

Multiindex random_multiindex(std::mt19937_64& rng, const StructureParams& p)
{
    static const auto ns = oracle::polyindices(p.d(), 3);
    std::uniform_int_distribution<int> count(0, 3);
    std::uniform_int_distribution<int> slot(0, 2);
    std::uniform_int_distribution<std::size_t> which(0, ns.size() - 1);
    Multiindex b;
    for (int i = count(rng); i > 0; --i) {
        b.add_k(p.kmin() + 2 * slot(rng));
    }
    for (int i = count(rng) + count(rng); i > 0; --i) {
        b.add_n(ns[which(rng)]);
    }
    return b;
}

} // namespace

TEST_CASE("homogeneity and order of small multiindices")
{
    const auto p = StructureParams::defaults();
    CHECK(homogeneity(Multiindex(), p).evaluate(p) == q(-11, 20));
    CHECK(order(Multiindex(), p).evaluate(p) == q(39, 20));
    CHECK(homogeneity(Multiindex::e(e0), p).evaluate(p) == 0);
    CHECK(order(Multiindex::e(e0), p).evaluate(p) == 0);
    CHECK(homogeneity(Multiindex::f(3), p) == LinearForm{2, 3, 0});
    CHECK(discounted_homogeneity(Multiindex::f(5), p) == LinearForm{2, 3, -1});
    CHECK(bracket(Multiindex::f(3, 2) + Multiindex::e(e0)) == 3);
    CHECK(homogeneity(Multiindex::e(pi({1, 0, 0, 0})), p).evaluate(p) == 2);
}

TEST_CASE("homogeneity, order and discount agree with the defining formulas")
{
    const auto p = StructureParams::defaults();
    std::mt19937_64 rng(11);
    for (int t = 0; t < 500; ++t) {
        const Multiindex b = random_multiindex(rng, p);
        CAPTURE(b.to_string());
        CHECK(homogeneity(b, p).evaluate(p) == oracle::homogeneity(b, p));
        CHECK(order(b, p).evaluate(p) == oracle::order(b, p));
        CHECK(discounted_homogeneity(b, p).evaluate(p) == oracle::discounted(b, p));
        CHECK(bracket(b) == oracle::bracket(b));
        CHECK(is_populated(b, p) == oracle::populated(b, p));
    }
}

TEST_CASE("homogeneity is additive up to the constant alpha")
{
    const auto p = StructureParams::defaults();
    std::mt19937_64 rng(12);
    for (int t = 0; t < 300; ++t) {
        const Multiindex a = random_multiindex(rng, p);
        const Multiindex b = random_multiindex(rng, p);
        CHECK(homogeneity(a + b, p) + LinearForm::alpha_multiple(1) == homogeneity(a, p) + homogeneity(b, p));
        CHECK(bracket(a + b) == bracket(a) + bracket(b));
    }
}

TEST_CASE("to_string and canonical order")
{
    CHECK(Multiindex().to_string() == "0");
    const Multiindex b = Multiindex::f(5) + Multiindex::f(3, 2) + Multiindex::e(e0, 2) + Multiindex::e(pi({1, 0, 0, 0}));
    CHECK(b.to_string() == "2f3+f5+2e(0,0,0,0)+e(1,0,0,0)");
    CHECK((b - Multiindex::f(3)).to_string() == "f3+f5+2e(0,0,0,0)+e(1,0,0,0)");
    CHECK_THROWS_AS(Multiindex::f(3) - Multiindex::f(5), ValidationError);
}

TEST_CASE("submultiindex enumeration counts the product of (mult+1)")
{
    const Multiindex b = Multiindex::f(3, 2) + Multiindex::e(e0, 3) + Multiindex::e(pi({0, 1, 0, 0}));
    std::set<Multiindex> seen;
    b.for_each_submultiindex([&](const Multiindex& g) {
        CHECK(b.contains(g));
        seen.insert(g);
    });
    CHECK(seen.size() == 3 * 4 * 2);
}

TEST_CASE("validation of multiindices and parameters")
{
    const auto p = StructureParams::defaults();
    CHECK_THROWS_AS(validate(Multiindex::f(4), p), ValidationError);
    CHECK_THROWS_AS(validate(Multiindex::f(1), p), ValidationError);
    CHECK_THROWS_AS(validate(Multiindex::e(pi({0, 0})), p), ValidationError);
    CHECK_NOTHROW(validate(Multiindex::f(7) + Multiindex::e(e0), p));
    CHECK_THROWS_AS(validate(Multiindex::f(5), p.with_kmax(3)), ValidationError);

    CHECK_THROWS_AS(StructureParams(2, 3, q(-11, 20), q(1, 100)), ValidationError);
    CHECK_THROWS_AS(StructureParams(3, 4, q(-11, 20), q(1, 100)), ValidationError);
    CHECK_THROWS_AS(StructureParams(3, 3, q(-1), q(1, 100)), ValidationError);
    CHECK_THROWS_AS(StructureParams(3, 3, q(1, 10), q(1, 100)), ValidationError);
    CHECK_THROWS_AS(StructureParams(3, 3, q(-11, 20), q(0)), ValidationError);
    CHECK_THROWS_AS(StructureParams(3, 3, q(-11, 20), q(1)), ValidationError);
    CHECK_THROWS_AS(StructureParams(3, 3, q(-11, 20), q(1, 100), q(2)), ValidationError);
}

TEST_CASE("default pbar sits inside both integrability windows")
{
    const auto p = StructureParams::defaults();
    const Rational pb = p.default_pbar();
    CHECK(pb > 2);
    CHECK(pb.get_den() <= 100);
    CHECK(Rational(p.kmin()) * p.alpha() + Rational(p.D()) / pb > 0);
    CHECK(p.alpha() - 2 + Rational(p.D()) / pb < 0);
    CHECK(!is_integer(Rational(p.D()) / pb));
}

TEST_CASE("enumeration matches brute force at small cutoffs")
{
    const auto p = StructureParams::defaults();
    const auto got2 = enumerate_populated(Rational(2), p);
    CHECK(got2.size() == 13);
    CHECK(got2 == oracle::brute_force_populated(Rational(2), p, 2, 4, 4, 9));

    // Two f3 already cost more than 4 and a single f3 admits at most three
    // polynomial units, so this box is exhaustive at C = 4.
    const auto got4 = enumerate_populated(Rational(4), p);
    CHECK(got4 == oracle::brute_force_populated(Rational(4), p, 2, 5, 4, 9));
    for (std::size_t i = 1; i < got4.size(); ++i) {
        CHECK(compare_order(got4[i - 1], got4[i], p) != OrderRelation::greater);
    }
}

TEST_CASE("enumeration is stable under bound inflation")
{
    const auto p = StructureParams::defaults();
    const auto base = enumerate_populated(Rational(5), p);
    EnumerationOptions opts;
    opts.bound_inflation = 3;
    CHECK(enumerate_populated(Rational(5), p, opts) == base);
}

TEST_CASE("every populated index has order at least that of e0")
{
    const auto p = StructureParams::defaults();
    for (const auto& b : enumerate_populated(Rational(5), p)) {
        CHECK(compare_order(Multiindex::e(e0), b, p) != OrderRelation::greater);
    }
}

TEST_CASE("order comparison and genericity")
{
    const auto p = StructureParams::defaults();
    CHECK(compare_order(Multiindex::e(e0), Multiindex(), p) == OrderRelation::less);
    CHECK(precedes(Multiindex::f(3) + Multiindex::e(e0), Multiindex::f(3), p));
    const auto half = p.with_alpha(q(-1, 2));
    CHECK_THROWS_AS(compare_order(Multiindex(), Multiindex::e(pi({0, 0, 0, 2})), half), NonGenericParameters);
    CHECK_THROWS_AS(enumerate_populated(Rational(6), half), NonGenericParameters);
}

TEST_CASE("degree-two classification")
{
    const auto p = StructureParams::defaults();
    CHECK(classify_degree_two(Rational(1), p).empty());
    const auto two = classify_degree_two(Rational(2), p);
    CHECK(two.size() == 8);
    for (const auto& b : two) {
        CHECK(oracle::homogeneity(b, p) == 2);
    }
    const auto eight = classify_degree_two(Rational(8), p);
    CHECK(eight.size() == 9);
    CHECK(std::find(eight.begin(), eight.end(), Multiindex::f(5) + Multiindex::e(e0, 3)) != eight.end());
}
