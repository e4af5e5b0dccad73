#include "mirs/json_io.hpp"

#include "mirs/errors.hpp"

#include <fstream>
#include <set>

#include <fmt/format.h>

namespace mirs::io {

namespace {

[[noreturn]] void schema_error(const std::string& where, const std::string& what)
{
    throw ValidationError(fmt::format("schema error at {}: {}", where, what));
}

const Json& require(const Json& j, const char* key, const std::string& where)
{
    if (!j.is_object()) {
        schema_error(where, "expected an object");
    }
    auto it = j.find(key);
    if (it == j.end()) {
        schema_error(where, fmt::format("missing field \"{}\"", key));
    }
    return *it;
}

int int_from_json(const Json& j, const std::string& where)
{
    if (!j.is_number_integer()) {
        schema_error(where, "expected an integer");
    }
    return j.get<int>();
}

double double_from_json(const Json& j, const std::string& where)
{
    if (j.is_number()) {
        return j.get<double>();
    }
    if (j.is_string()) {
        return to_double(rational_from_json(j, where));
    }
    schema_error(where, "expected a number");
}

} // namespace

Json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ValidationError(fmt::format("cannot open {}", path));
    }
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(fmt::format("{}: malformed JSON: {}", path, e.what()));
    }
}

Rational rational_from_json(const Json& j, const std::string& where)
{
    if (j.is_number_integer()) {
        return Rational(j.get<long>());
    }
    if (j.is_string()) {
        try {
            return parse_rational(j.get<std::string>());
        } catch (const ValidationError& e) {
            schema_error(where, e.what());
        }
    }
    schema_error(where, "expected a rational string \"p/q\" or an integer");
}

Json to_json(const Rational& r)
{
    return to_string(r);
}

StructureParams params_from_json(const Json& j)
{
    if (!j.is_object()) {
        schema_error("params", "expected an object");
    }
    const StructureParams def = StructureParams::defaults();
    const int d = j.contains("d") ? int_from_json(j["d"], "params.d") : def.d();
    const int kmin = j.contains("kmin") ? int_from_json(j["kmin"], "params.kmin") : def.kmin();
    const Rational alpha = j.contains("alpha") ? rational_from_json(j["alpha"], "params.alpha") : def.alpha();
    const Rational kappa = j.contains("kappa") ? rational_from_json(j["kappa"], "params.kappa") : def.kappa();
    std::optional<Rational> pbar;
    if (j.contains("pbar") && !j["pbar"].is_null()) {
        pbar = rational_from_json(j["pbar"], "params.pbar");
    }
    std::optional<int> kmax;
    if (j.contains("kmax") && !j["kmax"].is_null()) {
        kmax = int_from_json(j["kmax"], "params.kmax");
    }
    for (const auto& [key, v] : j.items()) {
        if (key != "d" && key != "kmin" && key != "alpha" && key != "kappa" && key != "pbar" && key != "kmax") {
            schema_error("params", fmt::format("unknown field \"{}\"", key));
        }
    }
    return StructureParams(d, kmin, alpha, kappa, pbar, kmax);
}

Json to_json(const StructureParams& p)
{
    Json j;
    j["d"] = p.d();
    j["kmin"] = p.kmin();
    j["alpha"] = to_json(p.alpha());
    j["kappa"] = to_json(p.kappa());
    if (p.pbar()) {
        j["pbar"] = to_json(*p.pbar());
    }
    if (p.kmax()) {
        j["kmax"] = *p.kmax();
    }
    return j;
}

PolyIndex polyindex_from_json(const Json& j, const StructureParams& p)
{
    if (!j.is_array()) {
        schema_error("idx", "expected an array of nonnegative integers");
    }
    std::vector<int> c;
    for (const auto& v : j) {
        if (!v.is_number_integer() || v.get<long>() < 0) {
            schema_error("idx", "entries must be nonnegative integers");
        }
        c.push_back(v.get<int>());
    }
    if (c.size() != static_cast<std::size_t>(p.d()) + 1) {
        schema_error("idx", fmt::format("expected {} entries, got {}", p.d() + 1, c.size()));
    }
    return PolyIndex(std::move(c));
}

Multiindex multiindex_from_json(const Json& j, const StructureParams& p)
{
    if (!j.is_object()) {
        schema_error("beta", "expected an object with fields \"k\" and \"n\"");
    }
    Multiindex m;
    for (const auto& [key, v] : j.items()) {
        if (key != "k" && key != "n") {
            schema_error("beta", fmt::format("unknown field \"{}\"", key));
        }
    }
    if (j.contains("k")) {
        const Json& k = j["k"];
        if (!k.is_object()) {
            schema_error("beta.k", "expected an object mapping k to multiplicities");
        }
        for (const auto& [key, v] : k.items()) {
            int slot = 0;
            try {
                std::size_t used = 0;
                slot = std::stoi(key, &used);
                if (used != key.size()) {
                    throw std::invalid_argument(key);
                }
            } catch (const std::exception&) {
                schema_error("beta.k", fmt::format("key \"{}\" is not an integer", key));
            }
            const int mult = int_from_json(v, "beta.k." + key);
            if (mult < 0) {
                schema_error("beta.k." + key, "negative multiplicity");
            }
            m.add_k(slot, mult);
        }
    }
    if (j.contains("n")) {
        const Json& n = j["n"];
        if (!n.is_array()) {
            schema_error("beta.n", "expected an array of {\"idx\", \"mult\"} objects");
        }
        for (const auto& e : n) {
            const PolyIndex idx = polyindex_from_json(require(e, "idx", "beta.n[]"), p);
            const int mult = int_from_json(require(e, "mult", "beta.n[]"), "beta.n[].mult");
            if (mult < 0) {
                schema_error("beta.n[].mult", "negative multiplicity");
            }
            m.add_n(idx, mult);
        }
    }
    validate(m, p);
    return m;
}

Json to_json(const Multiindex& m)
{
    Json j;
    Json k = Json::object();
    for (const auto& [slot, mult] : m.kpart()) {
        k[std::to_string(slot)] = mult;
    }
    Json n = Json::array();
    for (const auto& [idx, mult] : m.npart()) {
        n.push_back(Json{{"idx", idx.components()}, {"mult", mult}});
    }
    j["k"] = std::move(k);
    j["n"] = std::move(n);
    return j;
}

Json to_json(const LinearForm& f)
{
    return Json{{"const", to_json(f.c0)}, {"alpha", to_json(f.calpha)}, {"kappa", to_json(f.ckappa)}};
}

Coefficient coefficient_from_json(const Json& j)
{
    if (j.is_string() || j.is_number_integer()) {
        return Coefficient(rational_from_json(j, "coeff"));
    }
    if (!j.is_array()) {
        schema_error("coeff", "expected a list of {\"symbols\", \"rational\"} terms");
    }
    Coefficient out;
    for (const auto& t : j) {
        const Json& syms = require(t, "symbols", "coeff[]");
        if (!syms.is_array()) {
            schema_error("coeff[].symbols", "expected a list of [name, power] pairs");
        }
        std::vector<std::pair<std::string, int>> factors;
        for (const auto& s : syms) {
            if (!s.is_array() || s.size() != 2 || !s[0].is_string() || !s[1].is_number_integer()) {
                schema_error("coeff[].symbols[]", "expected [name, power]");
            }
            factors.emplace_back(s[0].get<std::string>(), s[1].get<int>());
        }
        out += Coefficient::term(Monomial(std::move(factors)), rational_from_json(require(t, "rational", "coeff[]"), "coeff[].rational"));
    }
    return out;
}

Json to_json(const Coefficient& c)
{
    Json out = Json::array();
    for (const auto& [m, r] : c.terms()) {
        Json syms = Json::array();
        for (const auto& [name, power] : m.factors()) {
            syms.push_back(Json::array({name, power}));
        }
        out.push_back(Json{{"symbols", std::move(syms)}, {"rational", to_json(r)}});
    }
    return out;
}

FormalSeries series_from_json(const Json& j, const StructureParams& p)
{
    if (!j.is_array()) {
        schema_error("series", "expected a list of {\"beta\", \"coeff\"} terms");
    }
    FormalSeries s;
    for (const auto& t : j) {
        s.add(multiindex_from_json(require(t, "beta", "series[]"), p), coefficient_from_json(require(t, "coeff", "series[]")));
    }
    return s;
}

Json to_json(const FormalSeries& s)
{
    Json out = Json::array();
    for (const auto& [b, c] : s.terms()) {
        out.push_back(Json{{"beta", to_json(b)}, {"coeff", to_json(c)}});
    }
    return out;
}

namespace {

template <class Spec>
Spec spec_from_json(const Json& j, const StructureParams& p, const char* what)
{
    if (!j.is_object()) {
        schema_error(what, "expected an object with \"entries\"");
    }
    Spec spec;
    const Json& entries = require(j, "entries", what);
    if (!entries.is_array()) {
        schema_error(fmt::format("{}.entries", what), "expected a list");
    }
    for (const auto& e : entries) {
        const PolyIndex n = polyindex_from_json(require(e, "n", what), p);
        const Multiindex b = multiindex_from_json(require(e, "beta", what), p);
        spec.set(n, b, spec.at(n, b) + coefficient_from_json(require(e, "value", what)));
    }
    return spec;
}

} // namespace

PiSpec pispec_from_json(const Json& j, const StructureParams& p)
{
    PiSpec spec = spec_from_json<PiSpec>(j, p, "pi-spec");
    if (j.contains("strict")) {
        if (!j["strict"].is_boolean()) {
            schema_error("pi-spec.strict", "expected a boolean");
        }
        spec.strict_population = j["strict"].get<bool>();
    }
    spec.validate(p);
    return spec;
}

DPiSpec dpispec_from_json(const Json& j, const StructureParams& p)
{
    DPiSpec spec = spec_from_json<DPiSpec>(j, p, "dpi-spec");
    spec.validate(p);
    return spec;
}

MomentSequence moments_from_json(const Json& j)
{
    const Json& m = require(j, "m", "moments");
    if (!m.is_array() || m.empty()) {
        schema_error("moments.m", "expected a nonempty list of rationals");
    }
    MomentSequence out;
    for (std::size_t i = 0; i < m.size(); ++i) {
        out.m.push_back(rational_from_json(m[i], fmt::format("moments.m[{}]", i)));
    }
    validate_moments(out);
    return out;
}

Json to_json(const MomentSequence& m)
{
    Json arr = Json::array();
    for (const auto& v : m.m) {
        arr.push_back(to_json(v));
    }
    return Json{{"m", std::move(arr)}};
}

Json to_json(const AppellPolynomial& w)
{
    Json arr = Json::array();
    for (const auto& c : w.coeffs) {
        arr.push_back(to_json(c));
    }
    return Json{{"degree", w.degree()}, {"coefficients", std::move(arr)}};
}

Json to_json(const PiMinusTerm& t)
{
    Json j;
    j["factor"] = to_json(t.factor);
    j["epsExponent"] = to_json(t.eps_exponent);
    j["w"] = t.w_index ? Json(*t.w_index) : Json(nullptr);
    Json pis = Json::array();
    for (const auto& b : t.pi_factors) {
        pis.push_back(to_json(b));
    }
    j["pi"] = std::move(pis);
    j["monomial"] = t.monomial.components();
    j["counterterm"] = t.counterterm ? Json{{"k", t.counterterm->k}, {"beta", to_json(t.counterterm->beta)}} : Json(nullptr);
    j["xi"] = t.xi;
    j["taylor"] = t.taylor_cutoff ? to_json(*t.taylor_cutoff) : Json(nullptr);
    j["text"] = t.to_string();
    return j;
}

Json to_json(const PiMinusExpr& e)
{
    Json terms = Json::array();
    for (const auto& t : e.terms) {
        terms.push_back(to_json(t));
    }
    return Json{{"terms", std::move(terms)}, {"text", e.to_string()}};
}

Json to_json(const DependencyGraph& g)
{
    Json nodes = Json::array();
    for (const auto& n : g.nodes) {
        nodes.push_back(n.label());
    }
    Json roots = Json::array();
    for (const auto& n : g.roots) {
        roots.push_back(n.label());
    }
    Json edges = Json::array();
    for (const auto& e : g.edges) {
        edges.push_back(Json{{"from", e.from.label()}, {"to", e.to.label()}, {"owned", e.owned}});
    }
    return Json{{"roots", std::move(roots)}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

sim::SimConfig sim_config_from_json(const Json& j)
{
    if (!j.is_object()) {
        schema_error("sim", "expected an object");
    }
    // config and options share one object
    static const std::set<std::string> known{"dsim", "s",     "gridT", "gridX", "dx",     "dt",  "cutoffRho",
                                             "seed", "seeds", "alpha", "kmax",  "blocks", "eps", "note"};
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) {
            schema_error("sim", fmt::format("unknown field \"{}\"", key));
        }
    }
    sim::SimConfig c;
    if (j.contains("dsim")) c.dsim = int_from_json(j["dsim"], "sim.dsim");
    if (j.contains("s")) c.s = double_from_json(j["s"], "sim.s");
    if (j.contains("gridT")) c.gridT = int_from_json(j["gridT"], "sim.gridT");
    if (j.contains("gridX")) c.gridX = int_from_json(j["gridX"], "sim.gridX");
    if (j.contains("dx")) c.dx = double_from_json(j["dx"], "sim.dx");
    c.dt = c.dx * c.dx;
    if (j.contains("dt")) c.dt = double_from_json(j["dt"], "sim.dt");
    if (j.contains("cutoffRho")) c.cutoffRho = double_from_json(j["cutoffRho"], "sim.cutoffRho");
    if (j.contains("seed")) {
        const Json& s = j["seed"];
        if (s.is_number_unsigned() || s.is_number_integer()) {
            c.seed = s.get<std::uint64_t>();
        } else if (s.is_string()) {
            try {
                c.seed = std::stoull(s.get<std::string>());
            } catch (const std::exception&) {
                schema_error("sim.seed", "expected a 64-bit integer");
            }
        } else {
            schema_error("sim.seed", "expected a 64-bit integer");
        }
    }
    c.validate();
    return c;
}

sim::SimOptions sim_options_from_json(const Json& j)
{
    sim::SimOptions o;
    if (!j.is_object()) {
        return o;
    }
    if (j.contains("seeds")) o.seeds = int_from_json(j["seeds"], "sim.seeds");
    if (j.contains("alpha")) o.alpha = double_from_json(j["alpha"], "sim.alpha");
    if (j.contains("kmax")) o.kmax = int_from_json(j["kmax"], "sim.kmax");
    if (j.contains("blocks")) o.blocks = int_from_json(j["blocks"], "sim.blocks");
    if (j.contains("eps")) {
        if (!j["eps"].is_array()) {
            schema_error("sim.eps", "expected a list");
        }
        o.eps.clear();
        for (const auto& e : j["eps"]) {
            o.eps.push_back(double_from_json(e, "sim.eps[]"));
        }
    }
    return o;
}

Json to_json(const sim::SimConfig& c)
{
    return Json{{"dsim", c.dsim}, {"s", c.s},   {"gridT", c.gridT},         {"gridX", c.gridX},
                {"dt", c.dt},     {"dx", c.dx}, {"cutoffRho", c.cutoffRho}, {"seed", c.seed}};
}

Json to_json(const sim::SimReport& r)
{
    Json j;
    j["note"] = fmt::format("simulation lattice dimension dsim = {} is independent of the algebraic dimension d; "
                            "moments and Appell checks use Z / sqrt(Var_theory(Z))",
                            r.cfg.dsim);
    j["config"] = to_json(r.cfg);
    j["seeds"] = r.options.seeds;
    j["slopeFit"] = Json{{"slope", r.slope.slope},
                         {"stderr", r.slope.stderr_},
                         {"expected", -2 * r.cfg.s},
                         {"shells", r.slope.bins},
                         {"qmin", r.slope.qmin},
                         {"qmax", r.slope.qmax}};
    Json moments = Json::array();
    for (std::size_t i = 0; i < r.moments.m.size(); ++i) {
        moments.push_back(Json{{"j", i}, {"value", r.moments.m[i]}, {"se", r.moments.se[i]}});
    }
    j["moments"] = std::move(moments);
    Json cent = Json::array();
    for (const auto& c : r.centredness) {
        cent.push_back(Json{{"k", c.k}, {"mean", c.mean}, {"se", c.se}, {"z", c.z}});
    }
    j["centredness"] = std::move(cent);
    j["sameSampleControl"] = Json{{"k", r.same_sample_k3.k}, {"mean", r.same_sample_k3.mean}, {"z", r.same_sample_k3.z}};
    Json vs = Json::array();
    for (const auto& v : r.variance_scaling) {
        vs.push_back(Json{{"eps", v.eps}, {"ratio", v.ratio}, {"expected", v.expected}, {"se", v.se}});
    }
    j["varianceScaling"] = std::move(vs);
    Json h = Json::array();
    for (const auto& row : r.hermite) {
        h.push_back(Json{{"k", row.k}, {"j", row.j}, {"empirical", row.empirical}, {"hermite", row.hermite}, {"se", row.se}});
    }
    j["hermite"] = std::move(h);
    j["varianceZ"] = Json{{"theory", r.variance_theory}, {"empirical", r.variance_empirical}};
    return j;
}

} // namespace mirs::io
