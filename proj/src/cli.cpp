#include "mirs/cli.hpp"

#include "mirs/checks.hpp"
#include "mirs/errors.hpp"
#include "mirs/hierarchy.hpp"
#include "mirs/json_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <fmt/format.h>

namespace mirs {

namespace {

using io::Json;

struct ParamArgs {
    std::string file;
    std::string alpha;
    std::string kappa;
    int kmax = 0;

    void attach(CLI::App* app)
    {
        app->add_option("--params", file, "structure parameters (JSON file)");
        app->add_option("--alpha", alpha, "override alpha, as p/q");
        app->add_option("--kappa", kappa, "override kappa, as p/q");
        app->add_option("--kmax", kmax, "restrict the nonlinearity slots to k <= kmax");
    }

    StructureParams load() const
    {
        Json j = file.empty() ? Json::object() : io::read_json_file(file);
        if (!alpha.empty()) {
            j["alpha"] = alpha;
        }
        if (!kappa.empty()) {
            j["kappa"] = kappa;
        }
        if (kmax > 0) {
            j["kmax"] = kmax;
        }
        return io::params_from_json(j);
    }
};

/// Inline JSON when the argument looks like JSON, else a file path.
Json json_arg(const std::string& arg)
{
    const auto first = arg.find_first_not_of(" \t\n");
    if (first != std::string::npos && (arg[first] == '{' || arg[first] == '[')) {
        try {
            return Json::parse(arg);
        } catch (const nlohmann::json::parse_error& e) {
            throw ValidationError(fmt::format("malformed inline JSON: {}", e.what()));
        }
    }
    return io::read_json_file(arg);
}

Rational rational_arg(const std::string& s, const char* name)
{
    try {
        return parse_rational(s);
    } catch (const ValidationError& e) {
        throw ValidationError(fmt::format("{}: {}", name, e.what()));
    }
}

std::optional<std::uint64_t> seed_override()
{
    const char* env = std::getenv("MIRS_SEED");
    if (!env || !*env) {
        return std::nullopt;
    }
    try {
        std::size_t used = 0;
        const auto v = std::stoull(env, &used, 0);
        if (env[used] != '\0') {
            throw std::invalid_argument(env);
        }
        return v;
    } catch (const std::exception&) {
        throw ValidationError(fmt::format("MIRS_SEED={} is not an unsigned integer", env));
    }
}

std::string value_line(const LinearForm& f, const StructureParams& p)
{
    if (f.calpha == 0 && f.ckappa == 0) {
        return to_string(f.c0);
    }
    return fmt::format("{} = {}", f.to_string(), to_string(f.evaluate(p)));
}

Json value_json(const LinearForm& f, const StructureParams& p)
{
    return Json{{"form", io::to_json(f)}, {"value", to_string(f.evaluate(p))}};
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Multiindex regularity structures: symbolic models and Gaussian checks", "mirs"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    std::string format = "text";
    auto add_format = [&](CLI::App* sub, std::vector<std::string> allowed) {
        sub->add_option("--format", format, "output format")->check(CLI::IsMember(std::move(allowed)));
    };

    // index
    auto* index = app.add_subcommand("index", "properties of one multiindex");
    ParamArgs index_params;
    index_params.attach(index);
    std::string quantity;
    std::string beta_arg;
    index->add_option("quantity", quantity, "homog | order | bracket | populated | discounted")
        ->required()
        ->check(CLI::IsMember({"homog", "order", "bracket", "populated", "discounted"}));
    index->add_option("--beta", beta_arg, "multiindex (JSON file or inline JSON)")->required();
    add_format(index, {"text", "json"});

    // enumerate / classify-two / counterterms
    std::string max_order = "6";
    auto* enumerate = app.add_subcommand("enumerate", "populated multiindices up to an order");
    ParamArgs enum_params;
    enum_params.attach(enumerate);
    enumerate->add_option("--max-order", max_order, "cutoff on |beta|_<, as p/q");
    add_format(enumerate, {"text", "json"});

    auto* classify = app.add_subcommand("classify-two", "populated multiindices of homogeneity two");
    ParamArgs classify_params;
    classify_params.attach(classify);
    classify->add_option("--max-order", max_order, "cutoff on |beta|_<, as p/q");
    add_format(classify, {"text", "json"});

    auto* counterterms = app.add_subcommand("counterterms", "supported counterterms c^(k)_beta");
    ParamArgs ct_params;
    ct_params.attach(counterterms);
    counterterms->add_option("--max-order", max_order, "cutoff on |beta + k e_0|_<, as p/q");
    add_format(counterterms, {"text", "json"});

    // gamma
    auto* gamma = app.add_subcommand("gamma", "entries of Gamma and dGamma");
    ParamArgs gamma_params;
    gamma_params.attach(gamma);
    std::string spec_arg, dspec_arg, gamma_arg, points_arg;
    bool with_deps = false;
    bool axioms = false;
    gamma->add_option("--pi-spec", spec_arg, "pi spec (JSON file or inline JSON)");
    gamma->add_option("--beta", beta_arg, "row multiindex");
    gamma->add_option("--gamma", gamma_arg, "column multiindex");
    gamma->add_option("--dgamma", dspec_arg, "dpi spec; also report dGamma_beta^gamma");
    gamma->add_flag("--deps", with_deps, "list the spec entries the entry depends on");
    gamma->add_flag("--axioms", axioms, "check the model axioms and print the report");
    gamma->add_option("--points", points_arg, "sample points for --axioms: [[x0,x1,...], ...]");
    add_format(gamma, {"text", "json"});

    // pi-minus / deps
    auto* piminus = app.add_subcommand("pi-minus", "expand Pi^-_beta");
    ParamArgs pm_params;
    pm_params.attach(piminus);
    piminus->add_option("--beta", beta_arg, "multiindex")->required();
    add_format(piminus, {"text", "json-ast"});

    auto* deps = app.add_subcommand("deps", "dependency graph of Pi^-_beta");
    ParamArgs deps_params;
    deps_params.attach(deps);
    bool dot = false;
    deps->add_option("--beta", beta_arg, "multiindex")->required();
    deps->add_flag("--dot", dot, "emit DOT");
    add_format(deps, {"text", "json"});

    // appell
    auto* appell = app.add_subcommand("appell", "Appell polynomials from moments");
    std::string moments_arg, sigma2_arg;
    int appell_k = 0;
    bool check_hermite = false;
    appell->add_option("--moments", moments_arg, "moments {\"m\": [...]} (JSON file or inline JSON)")->required();
    appell->add_option("--k", appell_k, "degree")->required()->check(CLI::NonNegativeNumber);
    appell->add_option("--sigma2", sigma2_arg, "variance for the Hermite comparison, as p/q");
    appell->add_flag("--check-hermite", check_hermite, "compare with the Hermite polynomial");
    add_format(appell, {"text", "json"});

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Gaussian noise simulation and law checks");
    std::string config_arg, out_path, dump_dir;
    int seeds = 0;
    int jobs = 1;
    simulate->add_option("--config", config_arg, "simulation config (JSON file or inline JSON)");
    simulate->add_option("--out", out_path, "write the report JSON here");
    simulate->add_option("--dump-dir", dump_dir, "write the first zeta and Z fields here");
    simulate->add_option("--seeds", seeds, "number of independent fields")->check(CLI::PositiveNumber);
    simulate->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

    // check
    auto* check = app.add_subcommand("check", "run every property suite");
    ParamArgs check_params;
    check_params.attach(check);
    bool with_sim = false;
    int trials = 100;
    check->add_option("--max-order", max_order, "cutoff on |beta|_<, as p/q");
    check->add_flag("--with-sim", with_sim, "also run the simulation suite");
    check->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    check->add_option("--trials", trials, "random cases per property")->check(CLI::PositiveNumber);
    check->add_option("--sim-config", config_arg, "simulation config for --with-sim");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "mirs: " << e.what() << "\n";
        return exit_validation;
    }

    try {
        if (index->parsed()) {
            const StructureParams p = index_params.load();
            const Multiindex b = io::multiindex_from_json(json_arg(beta_arg), p);
            Json j{{"beta", b.to_string()}};
            std::string text;
            if (quantity == "homog") {
                j["homogeneity"] = value_json(homogeneity(b, p), p);
                text = value_line(homogeneity(b, p), p);
            } else if (quantity == "discounted") {
                j["discounted"] = value_json(discounted_homogeneity(b, p), p);
                text = value_line(discounted_homogeneity(b, p), p);
            } else if (quantity == "order") {
                j["order"] = value_json(order(b, p), p);
                text = value_line(order(b, p), p);
            } else if (quantity == "bracket") {
                j["bracket"] = bracket(b);
                text = std::to_string(bracket(b));
            } else {
                j["populated"] = is_populated(b, p);
                text = is_populated(b, p) ? "true" : "false";
            }
            out << (format == "json" ? j.dump(2) : text) << "\n";
            return exit_ok;
        }

        if (enumerate->parsed() || classify->parsed()) {
            const StructureParams p = (enumerate->parsed() ? enum_params : classify_params).load();
            const Rational C = rational_arg(max_order, "--max-order");
            const auto set = enumerate->parsed() ? enumerate_populated(C, p) : classify_degree_two(C, p);
            if (format == "json") {
                Json arr = Json::array();
                for (const auto& b : set) {
                    arr.push_back(Json{{"beta", io::to_json(b)},
                                       {"text", b.to_string()},
                                       {"homogeneity", value_json(homogeneity(b, p), p)},
                                       {"order", value_json(order(b, p), p)}});
                }
                out << arr.dump(2) << "\n";
            } else {
                for (const auto& b : set) {
                    out << fmt::format("{:<40} |.|_< = {:<22} |.| = {}\n", b.to_string(), value_line(order(b, p), p),
                                       value_line(homogeneity(b, p), p));
                }
                out << fmt::format("{} indices\n", set.size());
            }
            return exit_ok;
        }

        if (counterterms->parsed()) {
            const StructureParams p = ct_params.load();
            const Rational C = rational_arg(max_order, "--max-order");
            const auto set = enumerate_populated(C, p);
            const PolyIndex zero = PolyIndex::zero(p.d());
            std::vector<CountertermKey> keys;
            for (const auto& b : set) {
                const int k = b.n(zero);
                if (k >= p.kmin() || b.npart().size() != static_cast<std::size_t>(k > 0)) {
                    continue;
                }
                const Multiindex b0 = k > 0 ? b - Multiindex::e(zero, k) : b;
                if (counterterm_support(k, b0, p)) {
                    keys.push_back({k, b0});
                }
            }
            std::sort(keys.begin(), keys.end());
            if (format == "json") {
                Json arr = Json::array();
                for (const auto& c : keys) {
                    arr.push_back(Json{{"k", c.k}, {"beta", io::to_json(c.beta)}, {"text", c.to_string()}});
                }
                out << arr.dump(2) << "\n";
            } else {
                for (const auto& c : keys) {
                    out << fmt::format("{:<24} |beta| = {}\n", c.to_string(), value_line(homogeneity(c.beta, p), p));
                }
                out << fmt::format("{} counterterms\n", keys.size());
            }
            return exit_ok;
        }

        if (gamma->parsed()) {
            const StructureParams p = gamma_params.load();
            std::optional<PiSpec> spec;
            if (!spec_arg.empty()) {
                spec = io::pispec_from_json(json_arg(spec_arg), p);
            }
            if (axioms) {
                std::vector<Point> points;
                if (points_arg.empty()) {
                    points = {Point(static_cast<std::size_t>(p.d()) + 1, Rational(0)),
                              Point(static_cast<std::size_t>(p.d()) + 1, Rational(1, 2)),
                              Point(static_cast<std::size_t>(p.d()) + 1, Rational(-2, 3))};
                } else {
                    const Json pj = json_arg(points_arg);
                    if (!pj.is_array()) {
                        throw ValidationError("schema error at points: expected a list of points");
                    }
                    for (const auto& x : pj) {
                        if (!x.is_array()) {
                            throw ValidationError("schema error at points[]: expected a list of rationals");
                        }
                        Point pt;
                        for (const auto& c : x) {
                            pt.push_back(io::rational_from_json(c, "points[][]"));
                        }
                        points.push_back(std::move(pt));
                    }
                }
                const auto report = check_model_axioms(points, 3, p, spec ? &*spec : nullptr);
                bool all = true;
                Json arr = Json::array();
                for (const auto& a : report) {
                    all = all && a.passed;
                    Json row{{"axiom", a.axiom}, {"status", a.passed ? "pass" : "fail"}, {"cases", a.cases}};
                    if (a.counterexample) {
                        row["counterexample"] = *a.counterexample;
                    }
                    arr.push_back(std::move(row));
                }
                out << arr.dump(2) << "\n";
                return all ? exit_ok : exit_property_failure;
            }
            if (!spec || beta_arg.empty() || gamma_arg.empty()) {
                throw ValidationError("gamma needs --pi-spec, --beta and --gamma (or --axioms)");
            }
            const Multiindex b = io::multiindex_from_json(json_arg(beta_arg), p);
            const Multiindex g = io::multiindex_from_json(json_arg(gamma_arg), p);
            const Coefficient v = gamma_entry(*spec, {b, g, std::nullopt}, p);
            Json j{{"beta", b.to_string()}, {"gamma", g.to_string()}, {"entry", io::to_json(v)}, {"text", v.to_string()}};
            std::string text = fmt::format("Gamma_{}^{} = {}\n", b.to_string(), g.to_string(), v.to_string());
            auto slot_list = [](const std::set<SpecSlot>& slots) {
                Json arr = Json::array();
                std::string s;
                for (const auto& [n, bb] : slots) {
                    arr.push_back(Json{{"n", n.components()}, {"beta", bb.to_string()}});
                    s += fmt::format("  {} at {}\n", n.to_string(), bb.to_string());
                }
                return std::make_pair(arr, s);
            };
            if (with_deps) {
                auto [arr, s] = slot_list(gamma_dependencies(*spec, b, g, p));
                j["dependencies"] = arr;
                text += "depends on pi^(n) at:\n" + s;
            }
            if (!dspec_arg.empty()) {
                const DPiSpec dspec = io::dpispec_from_json(json_arg(dspec_arg), p);
                const Coefficient dv = dgamma_entry(*spec, dspec, {b, g, std::nullopt}, p);
                j["dentry"] = io::to_json(dv);
                j["dtext"] = dv.to_string();
                text += fmt::format("dGamma_{}^{} = {}\n", b.to_string(), g.to_string(), dv.to_string());
                if (with_deps) {
                    const auto dd = dgamma_dependencies(*spec, dspec, b, g, p);
                    auto [parr, ps] = slot_list(dd.pi);
                    auto [darr, ds] = slot_list(dd.dpi);
                    j["dDependencies"] = Json{{"pi", parr}, {"dpi", darr}};
                    text += "dGamma depends on pi^(n) at:\n" + ps + "and on dpi^(n) at:\n" + ds;
                }
            }
            out << (format == "json" ? j.dump(2) + "\n" : text);
            return exit_ok;
        }

        if (piminus->parsed()) {
            const StructureParams p = pm_params.load();
            const Multiindex b = io::multiindex_from_json(json_arg(beta_arg), p);
            const PiMinusExpr e = expand_pi_minus(b, p);
            if (format == "json-ast") {
                Json j = io::to_json(e);
                j["beta"] = b.to_string();
                out << j.dump(2) << "\n";
            } else {
                out << "Pi^-_" << b.to_string() << " = " << e.to_string() << "\n";
            }
            return exit_ok;
        }

        if (deps->parsed()) {
            const StructureParams p = deps_params.load();
            const Multiindex b = io::multiindex_from_json(json_arg(beta_arg), p);
            const DependencyGraph g = dependency_graph(b, p);
            if (dot) {
                out << g.to_dot();
            } else if (format == "json") {
                out << io::to_json(g).dump(2) << "\n";
            } else {
                for (const auto& n : g.nodes) {
                    if (n.kind == DependencyNode::Kind::xi) {
                        out << n.label() << "\n";
                    } else {
                        out << fmt::format("{:<32} order {}\n", n.label(), value_line(node_order(n, p), p));
                    }
                }
            }
            return exit_ok;
        }

        if (appell->parsed()) {
            const MomentSequence m = io::moments_from_json(json_arg(moments_arg));
            if (static_cast<std::size_t>(appell_k) > m.max_order()) {
                throw ValidationError(fmt::format("--k {} needs moments up to order {}, got {}", appell_k, appell_k, m.max_order()));
            }
            const AppellPolynomial w = appell_from_moments(m, appell_k);
            Json j = io::to_json(w);
            std::string text;
            for (int i = 0; i <= w.degree(); ++i) {
                text += fmt::format("phi^{}: {}\n", i, to_string(w.coeffs[static_cast<std::size_t>(i)]));
            }
            int code = exit_ok;
            if (check_hermite) {
                if (sigma2_arg.empty()) {
                    throw ValidationError("--check-hermite needs --sigma2");
                }
                const AppellPolynomial h = hermite(appell_k, rational_arg(sigma2_arg, "--sigma2"));
                const bool same = h.coeffs == w.coeffs;
                j["hermite"] = io::to_json(h);
                j["matchesHermite"] = same;
                text += same ? "equals the Hermite polynomial\n" : "differs from the Hermite polynomial\n";
                code = same ? exit_ok : exit_property_failure;
            }
            out << (format == "json" ? j.dump(2) + "\n" : text);
            return code;
        }

        if (simulate->parsed()) {
            const Json cj = config_arg.empty() ? Json::object() : json_arg(config_arg);
            sim::SimConfig cfg = io::sim_config_from_json(cj);
            sim::SimOptions opts = io::sim_options_from_json(cj);
            if (auto s = seed_override()) {
                cfg.seed = *s;
            }
            if (seeds > 0) {
                opts.seeds = seeds;
            }
            opts.jobs = jobs;
            const sim::SimReport r = sim::run_simulation(cfg, opts);
            const Json report = io::to_json(r);
            if (!dump_dir.empty()) {
                std::filesystem::create_directories(dump_dir);
                const auto base = std::filesystem::path(dump_dir);
                sim::dump_field(r.zeta.front(), (base / "zeta.f64").string(), (base / "zeta.json").string());
                sim::dump_field(r.Z.front(), (base / "Z.f64").string(), (base / "Z.json").string());
            }
            if (out_path.empty()) {
                out << report.dump(2) << "\n";
            } else {
                std::ofstream f(out_path);
                if (!f) {
                    throw ValidationError(fmt::format("cannot write {}", out_path));
                }
                f << report.dump(2) << "\n";
                out << fmt::format("slope {:.4f} +- {:.4f}; report written to {}\n", r.slope.slope, r.slope.stderr_, out_path);
            }
            return exit_ok;
        }

        if (check->parsed()) {
            const StructureParams p = check_params.load();
            CheckOptions o;
            o.max_order = rational_arg(max_order, "--max-order");
            o.trials = trials;
            o.jobs = jobs;
            o.with_sim = with_sim;
            if (auto s = seed_override()) {
                o.seed = *s;
            }
            if (!config_arg.empty()) {
                const Json cj = json_arg(config_arg);
                o.sim_config = io::sim_config_from_json(cj);
                o.sim_options = io::sim_options_from_json(cj);
            }
            if (auto s = seed_override()) {
                o.sim_config.seed = *s;
            }
            const auto rows = run_all_checks(p, o);
            out << format_check_table(rows);
            const bool all = std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.passed; });
            return all ? exit_ok : exit_property_failure;
        }
    } catch (const NonGenericParameters& e) {
        err << "mirs: non-generic parameters: " << e.what() << "\n";
        return exit_non_generic;
    } catch (const ValidationError& e) {
        err << "mirs: " << e.what() << "\n";
        return exit_validation;
    } catch (const LemmaViolation& e) {
        err << "mirs: identity violated: " << e.what() << "\n";
        return exit_property_failure;
    }
    return exit_ok;
}

} // namespace mirs
