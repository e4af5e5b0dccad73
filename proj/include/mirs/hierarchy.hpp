#pragma once

#include "mirs/multiindex.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mirs {

/// c^{(k)}_beta, an opaque renormalisation constant.
struct CountertermKey {
    int k = 0;
    Multiindex beta;

    auto operator<=>(const CountertermKey&) const = default;
    bool operator==(const CountertermKey&) const = default;
    /// "c1[2f3]"
    std::string to_string() const;
};

/// One summand of Pi^-_beta:
///   factor * eps^{eps_exponent} * c * W_{w_index}(Pi_0) * Pi_{b_1} ... Pi_{b_l} * (. - x)^monomial,
/// optionally wrapped in (id - T_x^{<taylor_cutoff}). Absent pieces are 1.
struct PiMinusTerm {
    LinearForm eps_exponent;
    Rational factor = 1;
    /// W_m(Pi_0) with m >= 1; W_0 = 1 is never stored.
    std::optional<int> w_index;
    /// Sorted; each has [b] >= 0. Purely polynomial factors are folded into
    /// the monomial instead.
    std::vector<Multiindex> pi_factors;
    PolyIndex monomial;
    std::optional<CountertermKey> counterterm;
    bool xi = false;
    std::optional<LinearForm> taylor_cutoff;

    /// Everything except the rational factor, for combining like terms.
    bool same_shape(const PiMinusTerm& o) const;
    std::string to_string() const;
};

struct PiMinusExpr {
    std::vector<PiMinusTerm> terms;

    bool is_zero() const { return terms.empty(); }
    /// Merges like terms, drops zeros and sorts deterministically.
    void normalize();
    std::string to_string() const;
};

/// c^{(k)}_beta may be nonzero: k odd, beta nonempty without polynomial
/// part, sum beta(k) >= 2 and |beta| < 2 + k alpha. Requires 0 <= k < kmin.
bool counterterm_support(int k, const Multiindex& beta, const StructureParams& p);

/// |beta| - 2 when some k > kmin is present and |beta| - 2 > 0, else none.
std::optional<LinearForm> taylor_cutoff(const Multiindex& beta, const StructureParams& p);

/// Pi^-_beta. Purely polynomial beta give zero, the special forms
/// f_kmin + e_{n_1} + ... + e_{n_kmin} give kmin!/prod beta(n)! (. - x)^{n_1+...},
/// and [beta] >= 0 is expanded by the hierarchy. ValidationError if beta is
/// not populated.
PiMinusExpr expand_pi_minus(const Multiindex& beta, const StructureParams& p);

/// The hierarchy formula applied to any beta, populated or not, with
/// Pi_b = 0 unless [b] >= 0 or b purely polynomial.
PiMinusExpr expand_hierarchy_formula(const Multiindex& beta, const StructureParams& p);

/// |beta| as the sum of the pieces of one term: eps exponent, W_m has m alpha,
/// Pi_b has |b|, the monomial |n|, and c^{(k)}_b has |b| - k alpha - 2; plus 2.
LinearForm term_homogeneity(const PiMinusTerm& t, const StructureParams& p);

struct DependencyNode {
    enum class Kind { pi, counterterm, xi };
    Kind kind = Kind::xi;
    Multiindex beta;
    int k = 0;

    auto operator<=>(const DependencyNode&) const = default;
    bool operator==(const DependencyNode&) const = default;
    std::string label() const;
};

struct DependencyEdge {
    DependencyNode from;
    DependencyNode to;
    /// Pi_{b + k e_0} -> c^{(k)}_b: the constant is fixed together with
    /// Pi^-_{b + k e_0}, so the two share an order.
    bool owned = false;
};

struct DependencyGraph {
    std::vector<DependencyNode> roots;
    /// Topologically sorted: every node after all of its dependencies.
    std::vector<DependencyNode> nodes;
    std::vector<DependencyEdge> edges;

    std::string to_dot() const;
};

/// The nodes Pi^-_beta depends on, closed under Pi_b -> Pi^-_b and
/// c^{(k)}_b -> Pi^-_{b + k e_0}. LemmaViolation if an edge fails to descend
/// in the order or the graph has a cycle.
DependencyGraph dependency_graph(const Multiindex& beta, const StructureParams& p);

/// The order attached to a node: |b|_< for Pi_b, |b + k e_0|_< for c^{(k)}_b.
LinearForm node_order(const DependencyNode& n, const StructureParams& p);

} // namespace mirs
