#include "mirs/errors.hpp"
#include "mirs/noise_sim.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>

using namespace mirs;
using namespace mirs::sim;

namespace {

SimConfig small_config(int T = 32, int X = 32)
{
    SimConfig c;
    c.gridT = T;
    c.gridX = X;
    c.dt = 1.0;
    c.dx = 1.0;
    c.cutoffRho = 0.5;
    c.seed = 7;
    return c;
}

} // namespace

TEST_CASE("config validation")
{
    SimConfig c = small_config();
    CHECK_NOTHROW(c.validate());
    c.dsim = 4;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = small_config();
    c.s = 1.5;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = small_config(31, 32);
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = small_config();
    c.cutoffRho = 0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = small_config(8, 4);
    c.dsim = 2;
    CHECK(c.size() == 8 * 4 * 4);
    CHECK(c.shape() == std::vector<int>{8, 4, 4});
}

TEST_CASE("seeds")
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 200; ++i) {
        seen.insert(derive_seed(99, i));
    }
    CHECK(seen.size() == 200);
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(parabolic_frequency(3.0, 4.0) == doctest::Approx(std::pow(9.0 + 16.0, 0.25)));
}

TEST_CASE("noise synthesis is deterministic and mean free")
{
    const auto cfg = small_config();
    const auto a = synthesize_noise(cfg, 5);
    const auto b = synthesize_noise(cfg, 5);
    const auto c = synthesize_noise(cfg, 6);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
    CHECK(a.values.size() == cfg.size());
    CHECK(std::abs(a.mean()) < 1e-12);
    CHECK(a.tag == "zeta");
}

TEST_CASE("the linear solve inverts the heat operator on a single mode")
{
    const auto cfg = small_config(16, 16);
    const int a = 2, b = 3;
    const double q0 = 2 * std::numbers::pi * a / cfg.gridT;
    const double q1 = 2 * std::numbers::pi * b / cfg.gridX;
    LatticeField zeta{std::vector<double>(cfg.size()), cfg, "zeta"};
    for (int t = 0; t < cfg.gridT; ++t) {
        for (int x = 0; x < cfg.gridX; ++x) {
            zeta.values[static_cast<std::size_t>(t * cfg.gridX + x)] = std::cos(q0 * t + q1 * x);
        }
    }
    const auto Z = solve_linear(zeta);
    const double den = q0 * q0 + q1 * q1 * q1 * q1;
    double worst = 0;
    for (int t = 0; t < cfg.gridT; ++t) {
        for (int x = 0; x < cfg.gridX; ++x) {
            const double th = q0 * t + q1 * x;
            const double want = (q1 * q1 * std::cos(th) + q0 * std::sin(th)) / den;
            worst = std::max(worst, std::abs(Z.values[static_cast<std::size_t>(t * cfg.gridX + x)] - want));
        }
    }
    CHECK(worst < 1e-12);
    CHECK(Z.tag == "Z");
}

TEST_CASE("empirical variances match the spectral prediction")
{
    const auto cfg = small_config();
    std::vector<LatticeField> zs, Zs;
    for (std::uint64_t i = 0; i < 64; ++i) {
        zs.push_back(synthesize_noise(cfg, derive_seed(cfg.seed, i)));
        Zs.push_back(solve_linear(zs.back()));
    }
    const auto mz = estimate_moments_pooled(zs, 2);
    const auto mZ = estimate_moments_pooled(Zs, 2);
    CHECK(mz.m[0] == doctest::Approx(1.0));
    CHECK(std::abs(mz.m[1]) < 1e-12);
    CHECK(std::abs(mz.m[2] - theoretical_variance(cfg, false)) < 4 * mz.se[2] + 1e-9);
    CHECK(std::abs(mZ.m[2] - theoretical_variance(cfg, true)) < 4 * mZ.se[2] + 1e-9);
}

TEST_CASE("moment estimates and rationalisation")
{
    const auto cfg = small_config();
    const auto f = solve_linear(synthesize_noise(cfg, 3));
    const auto est = estimate_moments(f, 4, 8);
    REQUIRE(est.m.size() == 5);
    CHECK(est.m[0] == doctest::Approx(1.0));
    CHECK(est.se[2] > 0);
    const auto r = rationalize(est);
    CHECK(r.m[0] == 1);
    for (std::size_t j = 1; j < r.m.size(); ++j) {
        CHECK(r.m[j].get_den() <= 1000000);
        CHECK(std::abs(r.m[j].get_d() - est.m[j]) < 1e-6);
    }
}

TEST_CASE("variance scaling rejects non-dyadic eps")
{
    const auto cfg = small_config();
    std::vector<LatticeField> fs{solve_linear(synthesize_noise(cfg, 1))};
    CHECK_THROWS_AS(variance_scaling_check(fs, -0.55, {0.3}), ValidationError);
    CHECK_THROWS_AS(variance_scaling_check(fs, -0.55, {2.0}), ValidationError);
    CHECK_THROWS_AS(variance_scaling_check(fs, -0.55, {1.0 / 64}), ValidationError);
    const auto rows = variance_scaling_check(fs, -0.55, {1.0});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].ratio == doctest::Approx(1.0));
}

TEST_CASE("dumped fields")
{
    const auto cfg = small_config(8, 8);
    const auto f = synthesize_noise(cfg, 2);
    const auto dir = std::filesystem::temp_directory_path() / "mirs_dump_test";
    std::filesystem::create_directories(dir);
    const auto raw = (dir / "zeta.f64").string();
    const auto side = (dir / "zeta.json").string();
    dump_field(f, raw, side);
    CHECK(std::filesystem::file_size(raw) == cfg.size() * 8);
    std::ifstream in(raw, std::ios::binary);
    double first = 0;
    in.read(reinterpret_cast<char*>(&first), sizeof first);
    CHECK(first == f.values[0]);
    std::ifstream sj(side);
    const auto j = nlohmann::json::parse(sj);
    CHECK(j.contains("shape"));
    std::filesystem::remove_all(dir);
}
