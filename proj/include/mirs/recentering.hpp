#pragma once

#include "mirs/formal_series.hpp"

#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mirs {

/// The data pi^{(n)}_beta defining Gamma through
///   Gamma z_k = z_k,  Gamma z_n = z_n + pi^{(n)},  Gamma multiplicative.
struct PiSpec {
    std::map<PolyIndex, std::map<Multiindex, Coefficient>> entries;
    /// Demand pi^{(n)}_beta != 0 only for [beta] >= 0 or beta purely polynomial.
    bool strict_population = false;

    void set(const PolyIndex& n, const Multiindex& beta, const Coefficient& c);
    Coefficient at(const PolyIndex& n, const Multiindex& beta) const;
    std::size_t size() const;

    /// ValidationError unless every nonzero entry has |n| < |beta| (and the
    /// population condition when strict).
    void validate(const StructureParams& p) const;
};

/// The data dpi^{(n)}_beta of the derivation dGamma.
struct DPiSpec {
    std::map<PolyIndex, std::map<Multiindex, Coefficient>> entries;

    void set(const PolyIndex& n, const Multiindex& beta, const Coefficient& c);
    Coefficient at(const PolyIndex& n, const Multiindex& beta) const;
    std::size_t size() const;

    /// ValidationError unless every nonzero entry has |n| < alpha + D/pbar
    /// and [beta] >= 0 (pbar falls back to the default choice).
    void validate(const StructureParams& p) const;
};

struct GammaEntryQuery {
    Multiindex beta;
    Multiindex gamma;
    /// Must be >= |beta|_< when present.
    std::optional<Rational> cutoff;
};

/// Computes Gamma entries for one validated PiSpec. Keeps a memo table for
/// the recursive evaluation; one engine per thread.
class GammaEngine {
public:
    GammaEngine(PiSpec spec, StructureParams p);

    const PiSpec& spec() const { return spec_; }
    const StructureParams& params() const { return p_; }

    /// Gamma_beta^gamma by the exponential formula
    ///   sum_M 1/M! sum pi^{(n_1)}_{beta_1} ... pi^{(n_M)}_{beta_M} (D^{n_1}...D^{n_M} z^gamma)_{beta_{M+1}}.
    Coefficient entry(const Multiindex& beta, const Multiindex& gamma) const;

    /// Gamma_beta^gamma from multiplicativity, peeling one unit u off gamma:
    ///   Gamma_beta^{u+gamma'} = sum_b Gamma_b^u Gamma_{beta-b}^{gamma'}.
    Coefficient entry_recursive(const Multiindex& beta, const Multiindex& gamma);

    /// (Gamma a)_beta = sum_gamma a_gamma Gamma_beta^gamma, computed as the
    /// product of the images of the units; truncated at cutoff if given.
    FormalSeries apply(const FormalSeries& a, const std::optional<Rational>& cutoff) const;

    /// Gamma z_{e_n} = z_n + pi^{(n)}.
    FormalSeries image_of_unit(const PolyIndex& n) const;

private:
    PiSpec spec_;
    StructureParams p_;
    /// memo_[gamma][beta]
    std::unordered_map<Multiindex, std::unordered_map<Multiindex, Coefficient>> memo_;
};

Coefficient gamma_entry(const PiSpec& spec, const GammaEntryQuery& q, const StructureParams& p);
Coefficient gamma_entry_recursive(const PiSpec& spec, const GammaEntryQuery& q, const StructureParams& p);

/// dGamma_beta^gamma = sum_n gamma(n) sum_b dpi^{(n)}_b Gamma_{beta-b}^{gamma-e_n}.
Coefficient dgamma_entry(const PiSpec& spec, const DPiSpec& dspec, const GammaEntryQuery& q,
                         const StructureParams& p);

FormalSeries gamma_apply(const PiSpec& spec, const FormalSeries& a, const std::optional<Rational>& cutoff,
                         const StructureParams& p);
/// dGamma a = sum_n dpi^{(n)} Gamma(D^n a).
FormalSeries dgamma_apply(const PiSpec& spec, const DPiSpec& dspec, const FormalSeries& a,
                          const std::optional<Rational>& cutoff, const StructureParams& p);

/// A spec entry (n, beta').
using SpecSlot = std::pair<PolyIndex, Multiindex>;

/// The spec entries occurring in the symbolic Gamma_beta^gamma, found by
/// replacing every entry with a fresh symbol.
std::set<SpecSlot> gamma_dependencies(const PiSpec& spec, const Multiindex& beta, const Multiindex& gamma,
                                      const StructureParams& p);

struct DGammaDependencies {
    std::set<SpecSlot> pi;
    std::set<SpecSlot> dpi;
};
DGammaDependencies dgamma_dependencies(const PiSpec& spec, const DPiSpec& dspec, const Multiindex& beta,
                                       const Multiindex& gamma, const StructureParams& p);

using Point = std::vector<Rational>;

/// (Gamma_xy)_{e_n}^{e_m} = binom(n, m) (y - x)^{n-m}, zero unless m <= n.
Rational polynomial_sector_gamma(const Point& x, const Point& y, const PolyIndex& n, const PolyIndex& m);
/// Same with the displacement y - x kept symbolic, component i named
/// displacement_names[i].
Coefficient polynomial_sector_gamma(const std::vector<std::string>& displacement_names, const PolyIndex& n,
                                    const PolyIndex& m);

/// The base-case spec pi^{(m)}_{xy, e_n} = binom(n, m) (y-x)^{n-m} for m != n,
/// over all |n| <= max_degree. Strictly population respecting.
PiSpec polynomial_pi_spec(const Point& x, const Point& y, int max_degree, const StructureParams& p);
PiSpec polynomial_pi_spec(const std::vector<std::string>& displacement_names, int max_degree,
                          const StructureParams& p);

} // namespace mirs
