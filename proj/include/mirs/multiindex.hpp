#pragma once

#include "mirs/linear_form.hpp"
#include "mirs/params.hpp"

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mirs {

/// An element n = (n0, n1, ..., nd) of N^{1+d}; n0 is the time
/// component. Entries must be nonnegative.
class PolyIndex {
public:
    PolyIndex() = default;
    explicit PolyIndex(std::vector<int> components);

    static PolyIndex zero(int d) { return PolyIndex(std::vector<int>(static_cast<std::size_t>(d) + 1, 0)); }
    /// Unit vector: 1 in slot i of an (1+d)-tuple.
    static PolyIndex unit(int d, int i);

    std::size_t arity() const { return c_.size(); }
    int operator[](std::size_t i) const { return c_[i]; }
    const std::vector<int>& components() const { return c_; }
    bool is_zero() const;

    /// Componentwise m <= n.
    bool dominated_by(const PolyIndex& n) const;
    PolyIndex operator+(const PolyIndex& o) const;
    PolyIndex operator-(const PolyIndex& o) const;

    auto operator<=>(const PolyIndex&) const = default;
    bool operator==(const PolyIndex&) const = default;

    /// "(1,0,0,0)"
    std::string to_string() const;

private:
    std::vector<int> c_;
};

/// |n| = 2 n0 + n1 + ... + nd.
int parabolic_degree(const PolyIndex& n);

/// Same, with the arity checked against 1+d (ValidationError otherwise).
int parabolic_degree(const PolyIndex& n, const StructureParams& p);

/// Finitely supported multiplicities on the nonlinearity slots z_k and
/// the polynomial slots z_n. Stored sparse: zero multiplicities are never
/// kept, so structural equality is multiindex equality.
class Multiindex {
public:
    Multiindex() = default;

    static Multiindex f(int k, int mult = 1);
    static Multiindex e(const PolyIndex& n, int mult = 1);

    const std::map<int, int>& kpart() const { return k_; }
    const std::map<PolyIndex, int>& npart() const { return n_; }

    int k(int slot) const;
    int n(const PolyIndex& slot) const;

    /// Sum of beta(k)
    int k_count() const;
    /// Sum of beta(n)
    int n_count() const;
    /// Sum of beta(k) over k > kmin.
    int k_count_above(int kmin) const;

    bool empty() const { return k_.empty() && n_.empty(); }
    bool has_polynomial_part() const { return !n_.empty(); }

    /// Componentwise <=.
    bool contains(const Multiindex& other) const;

    Multiindex& operator+=(const Multiindex& o);
    Multiindex operator+(const Multiindex& o) const;
    /// Requires contains(o).
    Multiindex operator-(const Multiindex& o) const;

    Multiindex& add_k(int slot, int mult = 1);
    Multiindex& add_n(const PolyIndex& slot, int mult = 1);
    /// Removes one copy of e_slot; requires n(slot) >= 1.
    Multiindex& remove_n(const PolyIndex& slot);

    /// Canonical order: k-part first (lexicographic on (k, mult) pairs), then
    /// the polynomial part. This is the deterministic tie-break everywhere.
    auto operator<=>(const Multiindex&) const = default;
    bool operator==(const Multiindex&) const = default;

    /// "0", "f3+2e(0,0,0,0)", "2f5+f7+e(1,0,0,0)"
    std::string to_string() const;

    /// Calls fn on every gamma with gamma <= *this componentwise (including
    /// the empty multiindex and *this).
    void for_each_submultiindex(const std::function<void(const Multiindex&)>& fn) const;

private:
    std::map<int, int> k_;
    std::map<PolyIndex, int> n_;
};

/// Throws ValidationError unless every k-slot is admitted by p and every
/// polynomial slot has arity 1+d.
void validate(const Multiindex& beta, const StructureParams& p);

/// |beta|
LinearForm homogeneity(const Multiindex& beta, const StructureParams& p);
/// [beta] = sum (k-1) beta(k) - sum beta(n)
int bracket(const Multiindex& beta);
/// |beta|_< = |beta| + (D/2)(1 + [beta])
LinearForm order(const Multiindex& beta, const StructureParams& p);
/// <beta> = |beta| - kappa * sum_{k > kmin} beta(k)
LinearForm discounted_homogeneity(const Multiindex& beta, const StructureParams& p);

bool is_purely_polynomial(const Multiindex& beta);
/// beta = f_kmin + e_{n_1} + ... + e_{n_kmin}
bool is_special_form(const Multiindex& beta, const StructureParams& p);
bool is_populated(const Multiindex& beta, const StructureParams& p);

enum class OrderRelation { less, equal, greater };

/// Compares |beta|_< with |beta'|_<; NonGenericParameters on a collision of
/// distinct forms.
OrderRelation compare_order(const Multiindex& beta, const Multiindex& other, const StructureParams& p);

/// beta' < beta in the induction order.
inline bool precedes(const Multiindex& lhs, const Multiindex& rhs, const StructureParams& p)
{
    return compare_order(lhs, rhs, p) == OrderRelation::less;
}

struct EnumerationOptions {
    /// Multiplies the a-priori search bounds; the result must not depend on
    /// it as long as it is >= 1.
    Rational bound_inflation = 1;
    /// Additionally drop beta with |beta| above this value. Homogeneity grows
    /// with every added unit, so this prunes the search instead of filtering
    /// after the fact.
    std::optional<Rational> max_homogeneity;
    bool check_genericity = true;
};

/// Every populated beta with |beta|_< <= cutoff, sorted by (order, canonical
/// order). Runs validate_genericity on the result.
std::vector<Multiindex> enumerate_populated(const Rational& cutoff, const StructureParams& p,
                                            const EnumerationOptions& opts = {});
/// Same with a symbolic cutoff; a collision between an order and the cutoff
/// is a genericity failure.
std::vector<Multiindex> enumerate_populated(const LinearForm& cutoff, const StructureParams& p,
                                            const EnumerationOptions& opts = {});

/// Genericity checks over a finite set of populated multiindices:
///  - equal order values only for coefficient-wise equal order forms;
///  - <beta> not a nonnegative integer whenever [beta] >= 0;
///  - for every integer m: m < |gamma| iff m < <gamma>.
/// Throws NonGenericParameters on the first violation.
void validate_genericity(std::span<const Multiindex> set, const StructureParams& p);

/// The populated beta with |beta|_< <= cutoff and homogeneity exactly 2.
/// Throws LemmaViolation if anything other than e_n with |n| = 2 or
/// f_k + kmin e_0 shows up.
std::vector<Multiindex> classify_degree_two(const Rational& cutoff, const StructureParams& p);

} // namespace mirs

template <>
struct std::hash<mirs::Multiindex> {
    std::size_t operator()(const mirs::Multiindex& m) const noexcept;
};
