#include "oracles.hpp"

#include "mirs/checks.hpp"
#include "mirs/errors.hpp"
#include "mirs/recentering.hpp"

#include <doctest.h>

#include <random>

using namespace mirs;
using oracle::q;

namespace {

const PolyIndex e0 = PolyIndex::zero(3);
const Multiindex E0 = Multiindex::e(e0);
const Multiindex beta0 = Multiindex::f(3) + Multiindex::e(e0, 2);
const Coefficient P = Coefficient::symbol("p");
const Coefficient QHAT = Coefficient::symbol("qhat");

PiSpec one_entry_spec()
{
    PiSpec s;
    s.set(e0, beta0, P);
    return s;
}

} // namespace

TEST_CASE("empty spec gives the identity")
{
    const auto p = StructureParams::defaults();
    const auto set = enumerate_populated(Rational(3), p);
    GammaEngine engine(PiSpec{}, p);
    for (const auto& b : set) {
        for (const auto& g : set) {
            CHECK(engine.entry(b, g) == Coefficient(b == g ? 1 : 0));
        }
    }
    CHECK(gamma_dependencies(PiSpec{}, beta0, E0, p).empty());
}

TEST_CASE("single-entry spec examples")
{
    const auto p = StructureParams::defaults();
    GammaEngine engine(one_entry_spec(), p);
    CHECK(engine.entry(beta0, E0) == P);
    CHECK(engine.entry_recursive(beta0, E0) == P);
    CHECK(engine.entry(beta0 + E0, Multiindex::e(e0, 2)) == Coefficient(2) * P);
    CHECK(engine.entry_recursive(beta0 + E0, Multiindex::e(e0, 2)) == Coefficient(2) * P);
    const auto f3 = Multiindex::f(3);
    CHECK(engine.entry(f3, f3) == Coefficient(1));
    CHECK(engine.entry(f3 + E0, f3).is_zero());
    CHECK(engine.entry(f3 + beta0, f3 + E0) == P);
    CHECK(engine.entry_recursive(f3 + beta0, f3 + E0) == P);

    const auto deps = gamma_dependencies(one_entry_spec(), beta0 + E0, Multiindex::e(e0, 2), p);
    REQUIRE(deps.size() == 1);
    CHECK(deps.begin()->second == beta0);
    // 2e0 is not populated, so no descent is implied; adding e0 lowers the order
    CHECK(precedes(beta0 + E0, beta0, p));
}

TEST_CASE("single-entry dGamma examples")
{
    const auto p = StructureParams::defaults();
    DPiSpec d;
    d.set(e0, beta0, QHAT);
    const PiSpec empty;
    CHECK(dgamma_entry(empty, d, {beta0, E0, {}}, p) == QHAT);
    CHECK(dgamma_entry(one_entry_spec(), d, {beta0 + E0, Multiindex::e(e0, 2), {}}, p) == Coefficient(2) * QHAT);
    CHECK(dgamma_entry(one_entry_spec(), d, {beta0 + beta0, Multiindex::e(e0, 2), {}}, p) == Coefficient(2) * P * QHAT);
    for (const auto& b : enumerate_populated(Rational(4), p)) {
        CHECK(dgamma_entry(one_entry_spec(), d, {b, Multiindex::f(3), {}}, p).is_zero());
    }
}

TEST_CASE("gamma_apply on units")
{
    const auto p = StructureParams::defaults();
    CHECK(gamma_apply(one_entry_spec(), FormalSeries::one(), std::nullopt, p) == FormalSeries::one());
    const auto img = gamma_apply(one_entry_spec(), FormalSeries::monomial(E0), std::nullopt, p);
    CHECK(img == FormalSeries::monomial(E0) + FormalSeries::monomial(beta0, P));
}

TEST_CASE("spec validation")
{
    const auto p = StructureParams::defaults();
    PiSpec bad;
    bad.set(PolyIndex({1, 0, 0, 0}), Multiindex::e(PolyIndex({0, 0, 0, 1})), 1);
    CHECK_THROWS_AS(bad.validate(p), ValidationError);
    PiSpec unpopulated;
    unpopulated.strict_population = true;
    unpopulated.set(e0, Multiindex::f(3) + Multiindex::e(e0, 4), 1);
    CHECK_THROWS_AS(unpopulated.validate(p), ValidationError);
    unpopulated.strict_population = false;
    CHECK_NOTHROW(unpopulated.validate(p));
    DPiSpec dbad;
    dbad.set(e0, Multiindex::e(PolyIndex({0, 0, 0, 1})), 1);
    CHECK_THROWS_AS(dbad.validate(p), ValidationError);
    DPiSpec dhigh;
    dhigh.set(PolyIndex({1, 0, 0, 0}), beta0, 1);
    CHECK_THROWS_AS(dhigh.validate(p), ValidationError);
}

TEST_CASE("entries agree with the product of unit images")
{
    const auto p = StructureParams::defaults();
    const auto set = enumerate_populated(Rational(5), p);
    gen::Rng rng(31);
    for (int t = 0; t < 15; ++t) {
        const PiSpec spec = gen::random_pi_spec(rng, set, p, 4);
        GammaEngine engine(spec, p);
        for (const auto& g : set) {
            const FormalSeries col = oracle::gamma_of_monomial(spec, g, p);
            for (const auto& b : set) {
                CAPTURE(b.to_string());
                CAPTURE(g.to_string());
                const Coefficient want = col.at(b);
                CHECK(engine.entry(b, g) == want);
                CHECK(engine.entry_recursive(b, g) == want);
            }
        }
    }
}

TEST_CASE("triangularity of Gamma under strict population")
{
    const auto p = StructureParams::defaults();
    const auto set = enumerate_populated(Rational(6), p);
    gen::Rng rng(32);
    for (int t = 0; t < 5; ++t) {
        GammaEngine engine(gen::random_pi_spec(rng, set, p), p);
        for (const auto& b : set) {
            for (const auto& g : set) {
                Coefficient off = engine.entry(b, g);
                if (b == g) {
                    CHECK(off == Coefficient(1));
                    continue;
                }
                if (!off.is_zero()) {
                    CHECK(oracle::homogeneity(g, p) < oracle::homogeneity(b, p));
                    CHECK(oracle::discounted(g, p) < oracle::discounted(b, p));
                    CHECK(oracle::order(g, p) < oracle::order(b, p));
                }
            }
        }
    }
}

TEST_CASE("dGamma agrees with the Leibniz oracle and is a Gamma-derivation")
{
    const auto p = StructureParams::defaults();
    const auto set = enumerate_populated(Rational(5), p);
    gen::Rng rng(33);
    for (int t = 0; t < 10; ++t) {
        const PiSpec spec = gen::random_pi_spec(rng, set, p, 3);
        const DPiSpec dspec = gen::random_dpi_spec(rng, set, p, 3);
        for (const auto& g : set) {
            const FormalSeries col = oracle::dgamma_of_monomial(spec, dspec, g, p);
            for (const auto& b : set) {
                CHECK(dgamma_entry(spec, dspec, {b, g, {}}, p) == col.at(b));
            }
        }
        const auto a = gen::random_series(rng, set, 2);
        const auto c = gen::random_series(rng, set, 2);
        const auto lhs = dgamma_apply(spec, dspec, series_mul(a, c, p), std::nullopt, p);
        const auto rhs = series_mul(dgamma_apply(spec, dspec, a, std::nullopt, p), gamma_apply(spec, c, std::nullopt, p), p) +
                         series_mul(gamma_apply(spec, a, std::nullopt, p), dgamma_apply(spec, dspec, c, std::nullopt, p), p);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("Gamma preserves Ttilde and T")
{
    const auto p = StructureParams::defaults();
    const auto set = enumerate_populated(Rational(6), p);
    gen::Rng rng(34);
    for (int t = 0; t < 20; ++t) {
        const PiSpec spec = gen::random_pi_spec(rng, set, p);
        const auto a = gen::random_series(rng, set, 3);
        const auto image = gamma_apply(spec, a, Rational(6), p);
        CHECK(project_T(image, p) == image);
        const auto at = project_Ttilde(a);
        const auto image_t = gamma_apply(spec, at, Rational(6), p);
        CHECK(project_Ttilde(image_t) == image_t);
    }
}

TEST_CASE("polynomial sector")
{
    const Point x{q(1), q(2), q(-1), q(1, 2)};
    const Point y{q(3), q(1, 3), q(0), q(2)};
    CHECK(polynomial_sector_gamma(x, y, PolyIndex({1, 0, 0, 0}), PolyIndex::zero(3)) == q(2));
    CHECK(polynomial_sector_gamma(x, y, PolyIndex({0, 2, 0, 0}), PolyIndex({0, 1, 0, 0})) == q(-10, 3));
    CHECK(polynomial_sector_gamma(x, y, PolyIndex({0, 1, 0, 0}), PolyIndex({1, 0, 0, 0})) == 0);
    CHECK(polynomial_sector_gamma(x, y, PolyIndex({2, 1, 0, 0}), PolyIndex({2, 1, 0, 0})) == 1);
}

TEST_CASE("model axioms on random rational points")
{
    const auto p = StructureParams::defaults();
    gen::Rng rng(35);
    std::vector<Point> pts;
    for (int i = 0; i < 4; ++i) {
        pts.push_back(gen::random_point(rng, p.d()));
    }
    for (const auto& r : check_model_axioms(pts, 3, p)) {
        CAPTURE(r.axiom);
        CHECK(r.passed);
        CHECK(r.cases > 0);
    }
}

TEST_CASE("dependencies of polynomial columns")
{
    const auto p = StructureParams::defaults();
    const auto deps = gamma_dependencies(one_entry_spec(), beta0, E0, p);
    CHECK(deps == std::set<SpecSlot>{{e0, beta0}});
    CHECK(gamma_dependencies(one_entry_spec(), beta0 + E0, E0, p).empty());
}
