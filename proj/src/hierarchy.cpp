#include "mirs/hierarchy.hpp"

#include "mirs/errors.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>
#include <set>

#include <fmt/format.h>

namespace mirs {

std::string CountertermKey::to_string() const
{
    return fmt::format("c{}[{}]", k, beta.to_string());
}

bool PiMinusTerm::same_shape(const PiMinusTerm& o) const
{
    return eps_exponent == o.eps_exponent && w_index == o.w_index && pi_factors == o.pi_factors &&
           monomial == o.monomial && counterterm == o.counterterm && xi == o.xi &&
           taylor_cutoff == o.taylor_cutoff;
}

namespace {

std::string shape_string(const PiMinusTerm& t)
{
    std::vector<std::string> parts;
    if (!(t.eps_exponent == LinearForm{})) {
        parts.push_back(fmt::format("eps^({})", t.eps_exponent.to_string()));
    }
    if (t.xi) {
        parts.emplace_back("xi");
    }
    if (t.counterterm) {
        parts.push_back(t.counterterm->to_string());
    }
    std::vector<std::string> inner;
    if (t.w_index) {
        inner.push_back(fmt::format("W_{}(Pi[0])", *t.w_index));
    }
    for (const auto& b : t.pi_factors) {
        inner.push_back(fmt::format("Pi[{}]", b.to_string()));
    }
    if (!t.monomial.is_zero()) {
        inner.push_back(fmt::format("(.-x)^{}", t.monomial.to_string()));
    }
    if (t.taylor_cutoff) {
        parts.push_back(fmt::format("(id-T^{{<{}}})[{}]", t.taylor_cutoff->to_string(),
                                    inner.empty() ? "1" : fmt::format("{}", fmt::join(inner, "*"))));
    } else {
        parts.insert(parts.end(), inner.begin(), inner.end());
    }
    return fmt::format("{}", fmt::join(parts, "*"));
}

} // namespace

std::string PiMinusTerm::to_string() const
{
    const std::string shape = shape_string(*this);
    if (shape.empty()) {
        return mirs::to_string(factor);
    }
    if (factor == 1) {
        return shape;
    }
    if (factor == -1) {
        return "-" + shape;
    }
    return mirs::to_string(factor) + "*" + shape;
}

void PiMinusExpr::normalize()
{
    std::map<std::string, PiMinusTerm> merged;
    for (auto& t : terms) {
        const std::string key = shape_string(t);
        auto [it, inserted] = merged.try_emplace(key, t);
        if (!inserted) {
            it->second.factor += t.factor;
        }
    }
    terms.clear();
    for (auto& [key, t] : merged) {
        if (t.factor != 0) {
            terms.push_back(std::move(t));
        }
    }
}

std::string PiMinusExpr::to_string() const
{
    if (terms.empty()) {
        return "0";
    }
    std::string out;
    for (const auto& t : terms) {
        std::string s = t.to_string();
        if (out.empty()) {
            out = s;
        } else if (s.starts_with("-")) {
            out += " - " + s.substr(1);
        } else {
            out += " + " + s;
        }
    }
    return out;
}

bool counterterm_support(int k, const Multiindex& beta, const StructureParams& p)
{
    if (k < 0 || k >= p.kmin()) {
        throw ValidationError(fmt::format("counterterm index k = {} outside 0 <= k < {}", k, p.kmin()));
    }
    if (k % 2 == 0 || beta.empty() || beta.has_polynomial_part() || beta.k_count() < 2) {
        return false;
    }
    const LinearForm bound{Rational(2), Rational(k), Rational(0)};
    return compare(homogeneity(beta, p), bound, p) < 0;
}

std::optional<LinearForm> taylor_cutoff(const Multiindex& beta, const StructureParams& p)
{
    if (beta.k_count_above(p.kmin()) == 0) {
        return std::nullopt;
    }
    LinearForm r = homogeneity(beta, p) - LinearForm::constant(2);
    if (compare(r, LinearForm{}, p) <= 0) {
        return std::nullopt;
    }
    return r;
}

namespace {

bool pi_nonzero(const Multiindex& b)
{
    return is_purely_polynomial(b) || (!b.empty() && bracket(b) >= 0);
}

struct Shape {
    int l = 0;
    std::vector<Multiindex> pis;
    PolyIndex monomial;
    auto operator<=>(const Shape&) const = default;
};

/// Ordered tuples (b_1, ..., b_l) of nonzero Pi-able indices summing to rest,
/// grouped by the resulting product shape.
class Compositions {
public:
    explicit Compositions(int d) : zero_(PolyIndex::zero(d)) {}

    const std::map<Shape, Integer>& of(const Multiindex& rest)
    {
        if (auto it = memo_.find(rest); it != memo_.end()) {
            return it->second;
        }
        std::map<Shape, Integer> out;
        if (rest.empty()) {
            out.emplace(Shape{0, {}, zero_}, Integer(1));
        } else {
            std::vector<Multiindex> parts;
            rest.for_each_submultiindex([&](const Multiindex& b) {
                if (pi_nonzero(b)) {
                    parts.push_back(b);
                }
            });
            for (const auto& b : parts) {
                for (const auto& [shape, count] : of(rest - b)) {
                    Shape s = shape;
                    ++s.l;
                    if (is_purely_polynomial(b)) {
                        s.monomial = s.monomial + b.npart().begin()->first;
                    } else {
                        s.pis.insert(std::upper_bound(s.pis.begin(), s.pis.end(), b), b);
                    }
                    out[s] += count;
                }
            }
        }
        return memo_.emplace(rest, std::move(out)).first->second;
    }

private:
    PolyIndex zero_;
    std::map<Multiindex, std::map<Shape, Integer>> memo_;
};

} // namespace

PiMinusExpr expand_hierarchy_formula(const Multiindex& beta, const StructureParams& p)
{
    validate(beta, p);
    PiMinusExpr expr;
    Compositions comps(p.d());
    const auto cutoff = taylor_cutoff(beta, p);

    auto add_terms = [&](int k, const Multiindex& rest, const Rational& sign, const LinearForm& eps,
                         const std::optional<CountertermKey>& c, const std::optional<LinearForm>& taylor) {
        for (const auto& [shape, count] : comps.of(rest)) {
            if (shape.l > k) {
                continue;
            }
            PiMinusTerm t;
            t.eps_exponent = eps;
            t.factor = sign * Rational(binomial(k, shape.l)) * Rational(count);
            if (k - shape.l > 0) {
                t.w_index = k - shape.l;
            }
            t.pi_factors = shape.pis;
            t.monomial = shape.monomial;
            t.counterterm = c;
            t.taylor_cutoff = taylor;
            if (taylor && !t.w_index && t.pi_factors.empty() && !t.counterterm) {
                // (id - T^{<r}) acts on a bare monomial (. - x)^m exactly.
                const int deg = parabolic_degree(t.monomial);
                if (compare(LinearForm::constant(deg), *taylor, p) < 0) {
                    continue;
                }
                t.taylor_cutoff.reset();
            }
            expr.terms.push_back(std::move(t));
        }
    };

    for (const auto& [k, mult] : beta.kpart()) {
        const Multiindex rest = beta - Multiindex::f(k);
        add_terms(k, rest, Rational(1), LinearForm::alpha_multiple(Rational(p.kmin() - k)), std::nullopt,
                  cutoff);
    }
    for (int k = 1; k < p.kmin(); k += 2) {
        beta.for_each_submultiindex([&](const Multiindex& b0) {
            if (!counterterm_support(k, b0, p)) {
                return;
            }
            add_terms(k, beta - b0, Rational(-1), LinearForm{}, CountertermKey{k, b0}, std::nullopt);
        });
    }
    if (beta.empty()) {
        PiMinusTerm t;
        t.monomial = PolyIndex::zero(p.d());
        t.xi = true;
        expr.terms.push_back(std::move(t));
    }
    expr.normalize();
    return expr;
}

PiMinusExpr expand_pi_minus(const Multiindex& beta, const StructureParams& p)
{
    validate(beta, p);
    if (!is_populated(beta, p)) {
        throw ValidationError(fmt::format("{} is not populated", beta.to_string()));
    }
    PiMinusExpr expr;
    if (is_purely_polynomial(beta)) {
        return expr;
    }
    if (is_special_form(beta, p)) {
        PiMinusTerm t;
        Rational f(factorial(p.kmin()));
        PolyIndex m = PolyIndex::zero(p.d());
        for (const auto& [n, mult] : beta.npart()) {
            f /= Rational(factorial(mult));
            for (int i = 0; i < mult; ++i) {
                m = m + n;
            }
        }
        t.factor = f;
        t.monomial = m;
        expr.terms.push_back(std::move(t));
        return expr;
    }
    expr = expand_hierarchy_formula(beta, p);
    for (const auto& t : expr.terms) {
        for (const auto& b : t.pi_factors) {
            if (!is_populated(b, p) || !precedes(b, beta, p)) {
                throw LemmaViolation(fmt::format("Pi^-[{}] references Pi[{}], which does not precede it",
                                                 beta.to_string(), b.to_string()));
            }
        }
        if (t.counterterm && (t.counterterm->k % 2 == 0 || t.counterterm->beta.has_polynomial_part())) {
            throw LemmaViolation(fmt::format("Pi^-[{}] references the unsupported {}", beta.to_string(),
                                             t.counterterm->to_string()));
        }
        if (t.xi && !beta.empty()) {
            throw LemmaViolation("xi appears away from the empty multiindex");
        }
    }
    return expr;
}

LinearForm term_homogeneity(const PiMinusTerm& t, const StructureParams& p)
{
    LinearForm h = t.eps_exponent + LinearForm::constant(2);
    if (t.w_index) {
        h += LinearForm::alpha_multiple(Rational(*t.w_index));
    }
    for (const auto& b : t.pi_factors) {
        h += homogeneity(b, p);
    }
    h += LinearForm::constant(parabolic_degree(t.monomial));
    if (t.counterterm) {
        h += homogeneity(t.counterterm->beta, p) - LinearForm::alpha_multiple(Rational(t.counterterm->k)) -
             LinearForm::constant(2);
    }
    if (t.xi) {
        h += LinearForm::alpha_multiple(1) - LinearForm::constant(2);
    }
    return h;
}

std::string DependencyNode::label() const
{
    switch (kind) {
    case Kind::pi:
        return fmt::format("Pi[{}]", beta.to_string());
    case Kind::counterterm:
        return CountertermKey{k, beta}.to_string();
    case Kind::xi:
        break;
    }
    return "xi";
}

LinearForm node_order(const DependencyNode& n, const StructureParams& p)
{
    switch (n.kind) {
    case DependencyNode::Kind::pi:
        return order(n.beta, p);
    case DependencyNode::Kind::counterterm:
        return order(n.beta + Multiindex::e(PolyIndex::zero(p.d()), n.k), p);
    case DependencyNode::Kind::xi:
        break;
    }
    throw ValidationError("the noise node carries no order");
}

namespace {

std::set<DependencyNode> atoms(const PiMinusExpr& e)
{
    std::set<DependencyNode> out;
    for (const auto& t : e.terms) {
        if (t.xi) {
            out.insert(DependencyNode{DependencyNode::Kind::xi, {}, 0});
        }
        if (t.w_index) {
            out.insert(DependencyNode{DependencyNode::Kind::pi, Multiindex(), 0});
        }
        for (const auto& b : t.pi_factors) {
            out.insert(DependencyNode{DependencyNode::Kind::pi, b, 0});
        }
        if (t.counterterm) {
            out.insert(DependencyNode{DependencyNode::Kind::counterterm, t.counterterm->beta, t.counterterm->k});
        }
    }
    return out;
}

std::string dot_quote(const std::string& s)
{
    return "\"" + s + "\"";
}

} // namespace

DependencyGraph dependency_graph(const Multiindex& beta, const StructureParams& p)
{
    using Kind = DependencyNode::Kind;
    DependencyGraph g;
    const PiMinusExpr root = expand_pi_minus(beta, p);
    const auto root_atoms = atoms(root);
    g.roots.assign(root_atoms.begin(), root_atoms.end());
    const PolyIndex zero = PolyIndex::zero(p.d());

    for (const auto& r : g.roots) {
        if (r.kind == Kind::xi) {
            continue;
        }
        const auto c = compare(node_order(r, p), order(beta, p), p);
        if (r.kind == Kind::pi ? c >= 0 : c > 0) {
            throw LemmaViolation(fmt::format("Pi^-[{}] depends on {} of no smaller order", beta.to_string(),
                                             r.label()));
        }
    }

    std::set<DependencyNode> seen(g.roots.begin(), g.roots.end());
    std::vector<DependencyNode> stack(g.roots.begin(), g.roots.end());
    std::map<DependencyNode, std::vector<DependencyEdge>> out_edges;
    while (!stack.empty()) {
        const DependencyNode node = stack.back();
        stack.pop_back();
        if (node.kind == Kind::xi) {
            continue;
        }
        std::optional<DependencyNode> owned;
        std::set<DependencyNode> deps;
        if (node.kind == Kind::pi) {
            deps = atoms(expand_pi_minus(node.beta, p));
            const int k0 = node.beta.n(zero);
            if (k0 < p.kmin()) {
                Multiindex b0 = node.beta;
                if (k0 > 0) {
                    b0 = b0 - Multiindex::e(zero, k0);
                }
                DependencyNode self{Kind::counterterm, b0, k0};
                if (deps.contains(self)) {
                    owned = self;
                }
            }
        } else {
            const Multiindex full = node.beta + Multiindex::e(zero, node.k);
            deps = atoms(expand_pi_minus(full, p));
            deps.erase(node);
        }
        for (const auto& dep : deps) {
            const bool is_owned = owned && dep == *owned;
            if (dep.kind != Kind::xi) {
                const auto c = compare(node_order(dep, p), node_order(node, p), p);
                if (is_owned ? c != 0 : c >= 0) {
                    throw LemmaViolation(fmt::format("edge {} -> {} does not descend in the order", node.label(),
                                                     dep.label()));
                }
            }
            out_edges[node].push_back(DependencyEdge{node, dep, is_owned});
            g.edges.push_back(DependencyEdge{node, dep, is_owned});
            if (seen.insert(dep).second) {
                stack.push_back(dep);
            }
        }
    }

    // Kahn's algorithm, dependencies first, ties broken by (order, node).
    std::map<DependencyNode, int> pending;
    std::map<DependencyNode, std::vector<DependencyNode>> dependents;
    for (const auto& n : seen) {
        pending[n] = 0;
    }
    for (const auto& e : g.edges) {
        ++pending[e.from];
        dependents[e.to].push_back(e.from);
    }
    auto key = [&](const DependencyNode& n) {
        return std::make_pair(n.kind == Kind::xi ? std::optional<Rational>{} : node_order(n, p).evaluate(p), n);
    };
    using Key = decltype(key(DependencyNode{}));
    std::priority_queue<Key, std::vector<Key>, std::greater<>> ready;
    for (const auto& [n, c] : pending) {
        if (c == 0) {
            ready.push(key(n));
        }
    }
    while (!ready.empty()) {
        const DependencyNode n = ready.top().second;
        ready.pop();
        g.nodes.push_back(n);
        for (const auto& m : dependents[n]) {
            if (--pending[m] == 0) {
                ready.push(key(m));
            }
        }
    }
    if (g.nodes.size() != seen.size()) {
        throw LemmaViolation(fmt::format("dependency graph of {} has a cycle", beta.to_string()));
    }
    std::sort(g.edges.begin(), g.edges.end(), [](const DependencyEdge& a, const DependencyEdge& b) {
        return std::tie(a.from, a.to) < std::tie(b.from, b.to);
    });
    return g;
}

std::string DependencyGraph::to_dot() const
{
    std::string out = "digraph dependencies {\n  rankdir=TB;\n  root [label=\"Pi^-\", shape=box];\n";
    for (const auto& n : nodes) {
        out += fmt::format("  {};\n", dot_quote(n.label()));
    }
    for (const auto& r : roots) {
        out += fmt::format("  root -> {};\n", dot_quote(r.label()));
    }
    for (const auto& e : edges) {
        out += fmt::format("  {} -> {}{};\n", dot_quote(e.from.label()), dot_quote(e.to.label()),
                           e.owned ? " [style=dashed]" : "");
    }
    out += "}\n";
    return out;
}

} // namespace mirs
