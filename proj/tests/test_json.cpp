#include "mirs/errors.hpp"
#include "mirs/json_io.hpp"

#include <doctest.h>

#include <string>

using namespace mirs;
using mirs::io::Json;

namespace {

bool schema_error_mentions(const std::function<void()>& fn, const std::string& needle)
{
    try {
        fn();
    } catch (const ValidationError& e) {
        return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
}

} // namespace

TEST_CASE("rationals")
{
    CHECK(io::rational_from_json(Json("-3/6"), "x") == Rational(-1, 2));
    CHECK(io::rational_from_json(Json(4), "x") == 4);
    CHECK(io::to_json(Rational(3, 4)) == Json("3/4"));
    CHECK_THROWS_AS(io::rational_from_json(Json("1/0"), "x"), ValidationError);
    CHECK_THROWS_AS(io::rational_from_json(Json("abc"), "x"), ValidationError);
    CHECK_THROWS_AS(io::rational_from_json(Json(0.5), "x"), ValidationError);
}

TEST_CASE("parameters")
{
    const auto p = io::params_from_json(Json::object());
    CHECK(p.alpha() == Rational(-11, 20));
    CHECK(p.kappa() == Rational(1, 100));
    const auto q = io::params_from_json(Json::parse(R"({"alpha": "-3/5", "kmax": 5})"));
    CHECK(q.alpha() == Rational(-3, 5));
    CHECK(q.kmax() == 5);
    const auto back = io::params_from_json(io::to_json(q));
    CHECK(back.alpha() == q.alpha());
    CHECK(back.kmax() == q.kmax());
    CHECK(schema_error_mentions([] { io::params_from_json(Json::parse(R"({"alpah": "-1/2"})")); }, "unknown field"));
    CHECK_THROWS_AS(io::params_from_json(Json::parse(R"({"alpha": "1/2"})")), ValidationError);
}

TEST_CASE("multiindices")
{
    const auto p = StructureParams::defaults();
    const auto b = io::multiindex_from_json(Json::parse(R"({"k": {"3": 2, "5": 1}, "n": [{"idx": [0,0,0,0], "mult": 2}]})"), p);
    CHECK(b.to_string() == "2f3+f5+2e(0,0,0,0)");
    CHECK(io::multiindex_from_json(io::to_json(b), p) == b);
    CHECK(io::multiindex_from_json(Json::object(), p).empty());
    CHECK(schema_error_mentions([&] { io::multiindex_from_json(Json::parse(R"({"n": [{"idx": [0,0], "mult": 1}]})"), p); },
                                "schema error at idx"));
    CHECK(schema_error_mentions([&] { io::multiindex_from_json(Json::parse(R"({"k": {"x": 1}})"), p); }, "beta.k"));
    CHECK(schema_error_mentions([&] { io::multiindex_from_json(Json::parse(R"({"k": {"3": -1}})"), p); }, "negative"));
    CHECK(schema_error_mentions([&] { io::multiindex_from_json(Json::parse(R"([1, 2])"), p); }, "schema error at beta"));
    CHECK_THROWS_AS(io::multiindex_from_json(Json::parse(R"({"k": {"4": 1}})"), p), ValidationError);
}

TEST_CASE("coefficients and series")
{
    const auto p = StructureParams::defaults();
    const auto c = io::coefficient_from_json(Json::parse(R"([{"symbols": [["p", 2]], "rational": "3/2"}, {"symbols": [], "rational": "-1"}])"));
    CHECK(c == Coefficient(Rational(3, 2)) * Coefficient::symbol("p", 2) - Coefficient(1));
    CHECK(io::coefficient_from_json(io::to_json(c)) == c);
    CHECK(io::coefficient_from_json(Json("2/3")) == Coefficient(Rational(2, 3)));

    FormalSeries s;
    s.add(Multiindex::f(3), c);
    s.add(Multiindex(), Coefficient(5));
    CHECK(io::series_from_json(io::to_json(s), p) == s);
    CHECK_THROWS_AS(io::series_from_json(Json::object(), p), ValidationError);
}

TEST_CASE("specs")
{
    const auto p = StructureParams::defaults();
    const auto spec = io::pispec_from_json(Json::parse(R"({"strict": true, "entries": [
        {"n": [0,0,0,0], "beta": {"k": {"3": 1}, "n": [{"idx": [0,0,0,0], "mult": 2}]}, "value": "1/2"}]})"),
                                           p);
    CHECK(spec.strict_population);
    CHECK(spec.size() == 1);
    CHECK(spec.at(PolyIndex::zero(3), Multiindex::f(3) + Multiindex::e(PolyIndex::zero(3), 2)) ==
          Coefficient(Rational(1, 2)));
    // |n| = 2 is not below |e(0,0,0,1)| = 1
    CHECK_THROWS_AS(io::pispec_from_json(Json::parse(R"({"entries": [
        {"n": [1,0,0,0], "beta": {"n": [{"idx": [0,0,0,1], "mult": 1}]}, "value": "1"}]})"),
                                         p),
                    ValidationError);
    CHECK_THROWS_AS(io::dpispec_from_json(Json::parse(R"({"entries": 3})"), p), ValidationError);
}

TEST_CASE("moments")
{
    const auto m = io::moments_from_json(Json::parse(R"({"m": ["1", "0", "2/3", 0]})"));
    CHECK(m.max_order() == 3);
    CHECK(m.m[2] == Rational(2, 3));
    CHECK(io::moments_from_json(io::to_json(m)).m == m.m);
    CHECK_THROWS_AS(io::moments_from_json(Json::parse(R"({"m": []})")), ValidationError);
    CHECK_THROWS_AS(io::moments_from_json(Json::parse(R"({"m": ["2", "0"]})")), ValidationError);
}

TEST_CASE("simulation config")
{
    const auto c = io::sim_config_from_json(Json::parse(R"({"gridT": 64, "gridX": 32, "s": 0.3, "seed": 12})"));
    CHECK(c.gridT == 64);
    CHECK(c.gridX == 32);
    CHECK(c.s == doctest::Approx(0.3));
    CHECK(c.seed == 12);
    CHECK(c.dt == doctest::Approx(c.dx * c.dx));
    CHECK_THROWS_AS(io::sim_config_from_json(Json::parse(R"({"gridT": "x"})")), ValidationError);
    CHECK_THROWS_AS(io::sim_config_from_json(Json::parse(R"({"grid": 4})")), ValidationError);
    const auto o = io::sim_options_from_json(Json::parse(R"({"seeds": 8, "eps": [1, 0.5]})"));
    CHECK(o.seeds == 8);
    CHECK(o.eps.size() == 2);
}

TEST_CASE("worked expansion serialisation")
{
    const auto p = StructureParams::defaults();
    const auto j = io::to_json(expand_pi_minus(Multiindex::f(3, 2), p));
    REQUIRE(j["terms"].size() == 2);
    CHECK(j["terms"][1]["counterterm"]["k"] == 1);
    CHECK(j["terms"][0]["text"] == "3*W_2(Pi[0])*Pi[f3]");
}
