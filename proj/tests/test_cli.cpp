#include "mirs/cli.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mirs;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

const std::string f3 = R"({"k":{"3":1}})";
const std::string two_f3 = R"({"k":{"3":2}})";
const std::string small_sim = R"({"gridT": 32, "gridX": 32, "seeds": 4, "eps": [1, 0.5], "kmax": 3, "blocks": 4})";

} // namespace

TEST_CASE("index queries")
{
    CHECK(run({"index", "homog", "--beta", f3}).out == "2+3*alpha = 7/20\n");
    const auto r = run({"index", "bracket", "--beta", two_f3});
    CHECK(r.code == exit_ok);
    CHECK(r.out == "4\n");
    CHECK(run({"index", "populated", "--beta", R"({"k":{"3":1},"n":[{"idx":[0,0,0,0],"mult":4}]})"}).out.find("false") !=
          std::string::npos);
}

TEST_CASE("malformed input exits with a validation code")
{
    const auto r = run({"index", "order", "--beta", R"({"k":{"3":1},"n":[{"idx":[0,0],"mult":1}]})"});
    CHECK(r.code == exit_validation);
    CHECK(r.err.find("schema error") != std::string::npos);
    CHECK(run({"index", "order", "--beta", "{not json"}).code == exit_validation);
    CHECK(run({"index", "order", "--beta", R"({"k":{"4":1}})"}).code == exit_validation);
    CHECK(run({"frobnicate"}).code == exit_validation);
    CHECK(run({"enumerate", "--max-order", "x/y"}).code == exit_validation);
    CHECK(run({"enumerate", "--max-order", "2", "--alpha", "1/2"}).code == exit_validation);
}

TEST_CASE("non-generic parameters exit with code 3")
{
    const auto r = run({"enumerate", "--max-order", "6", "--alpha", "-1/2"});
    CHECK(r.code == exit_non_generic);
    CHECK(r.err.find("non-generic") != std::string::npos);
    CHECK(run({"counterterms", "--max-order", "6", "--alpha", "-1/2"}).code == exit_non_generic);
}

TEST_CASE("enumerate and classify")
{
    const auto r = run({"enumerate", "--max-order", "2"});
    CHECK(r.code == exit_ok);
    CHECK(r.out.find("13 indices") != std::string::npos);
    const auto j = nlohmann::json::parse(run({"enumerate", "--max-order", "2", "--format", "json"}).out);
    CHECK(j.size() == 13);
    CHECK(run({"classify-two", "--max-order", "8"}).out.find("9 indices") != std::string::npos);
    CHECK(run({"counterterms", "--max-order", "12"}).out.find("c1[2f3]") != std::string::npos);
}

TEST_CASE("pi-minus, deps and gamma")
{
    CHECK(run({"pi-minus", "--beta", two_f3}).out == "Pi^-_2f3 = 3*W_2(Pi[0])*Pi[f3] - c1[2f3]*W_1(Pi[0])\n");
    const auto ast = nlohmann::json::parse(run({"pi-minus", "--beta", two_f3, "--format", "json-ast"}).out);
    CHECK(ast["terms"].size() == 2);
    const auto dot = run({"deps", "--beta", two_f3, "--dot"});
    CHECK(dot.code == exit_ok);
    CHECK(dot.out.rfind("digraph", 0) == 0);
    const std::string spec =
        R"({"entries": [{"n": [0,0,0,0], "beta": {"k": {"3": 1}, "n": [{"idx": [0,0,0,0], "mult": 2}]}, "value": [{"symbols": [["p", 1]], "rational": "1"}]}]})";
    const auto g = run({"gamma", "--pi-spec", spec, "--beta", R"({"k":{"3":1},"n":[{"idx":[0,0,0,0],"mult":2}]})",
                        "--gamma", R"({"n":[{"idx":[0,0,0,0],"mult":1}]})"});
    CHECK(g.code == exit_ok);
    CHECK(g.out.find("p") != std::string::npos);
}

TEST_CASE("appell")
{
    const auto r = run({"appell", "--moments", R"({"m": ["1", "0", "1", "0", "3"]})", "--k", "4", "--sigma2", "1",
                        "--check-hermite"});
    CHECK(r.code == exit_ok);
    CHECK(r.out.find("equals the Hermite polynomial") != std::string::npos);
    CHECK(run({"appell", "--moments", R"({"m": ["1", "0", "2"]})", "--k", "2", "--sigma2", "1", "--check-hermite"}).code ==
          exit_property_failure);
    CHECK(run({"appell", "--moments", R"({"m": ["1", "0"]})", "--k", "3"}).code == exit_validation);
}

TEST_CASE("outputs are byte-identical across runs")
{
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"enumerate", "--max-order", "4"},
             {"pi-minus", "--beta", R"({"k":{"3":1,"5":1},"n":[{"idx":[0,0,0,0],"mult":1}]})"},
             {"deps", "--beta", two_f3, "--format", "json"},
             {"simulate", "--config", small_sim}}) {
        CHECK(run(args).out == run(args).out);
    }
}

TEST_CASE("simulate writes a report and honours MIRS_SEED")
{
    const auto dir = std::filesystem::temp_directory_path() / "mirs_cli_test";
    std::filesystem::create_directories(dir);
    const auto report = (dir / "report.json").string();
    const auto r = run({"simulate", "--config", small_sim, "--out", report, "--dump-dir", (dir / "fields").string()});
    CHECK(r.code == exit_ok);
    std::ifstream in(report);
    const auto j = nlohmann::json::parse(in);
    CHECK(j.contains("slopeFit"));
    CHECK(j["seeds"] == 4);
    CHECK(std::filesystem::exists(dir / "fields" / "Z.f64"));

    const auto base = run({"simulate", "--config", small_sim});
    setenv("MIRS_SEED", "12345", 1);
    const auto seeded = run({"simulate", "--config", small_sim});
    unsetenv("MIRS_SEED");
    CHECK(base.out != seeded.out);
    CHECK(nlohmann::json::parse(seeded.out)["config"]["seed"] == 12345);
    std::filesystem::remove_all(dir);
}

TEST_CASE("check runs the property suites")
{
    const auto r = run({"check", "--max-order", "4", "--trials", "3"});
    CHECK(r.code == exit_ok);
    CHECK(r.out.find(", 0 failed") != std::string::npos);
}
