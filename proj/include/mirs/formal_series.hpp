#pragma once

#include "mirs/coefficient.hpp"
#include "mirs/multiindex.hpp"

#include <functional>
#include <map>
#include <optional>

namespace mirs {

/// Finitely supported formal power series sum_beta c_beta z^beta.
///
/// An optional cutoff on the order value |beta|_< declares up to where the
/// series is faithful; terms above it are never stored.
class FormalSeries {
public:
    FormalSeries() = default;
    explicit FormalSeries(std::optional<Rational> cutoff) : cutoff_(std::move(cutoff)) {}

    static FormalSeries one();
    static FormalSeries monomial(const Multiindex& beta, const Coefficient& c = Coefficient(1));

    const std::map<Multiindex, Coefficient>& terms() const { return t_; }
    const std::optional<Rational>& cutoff() const { return cutoff_; }
    bool is_zero() const { return t_.empty(); }
    std::size_t size() const { return t_.size(); }

    /// Coefficient at beta (zero if absent).
    Coefficient at(const Multiindex& beta) const;

    /// Adds c z^beta. Terms beyond the cutoff are dropped, which requires p.
    void add(const Multiindex& beta, const Coefficient& c, const StructureParams& p);
    /// Adds c z^beta without cutoff checks (series without cutoff only).
    void add(const Multiindex& beta, const Coefficient& c);

    FormalSeries& operator+=(const FormalSeries& o);
    FormalSeries& operator-=(const FormalSeries& o);
    FormalSeries& operator*=(const Coefficient& s);

    friend bool operator==(const FormalSeries& a, const FormalSeries& b) { return a.t_ == b.t_; }

    /// Drops every term with |beta|_< > cutoff and records the cutoff.
    FormalSeries truncated(const Rational& cutoff, const StructureParams& p) const;

    /// Same cutoff, only the terms whose index passes keep.
    FormalSeries filtered(const std::function<bool(const Multiindex&)>& keep) const;

    std::string to_string() const;

private:
    std::map<Multiindex, Coefficient> t_;
    std::optional<Rational> cutoff_;
};

FormalSeries operator+(FormalSeries a, const FormalSeries& b);
FormalSeries operator-(FormalSeries a, const FormalSeries& b);

/// Cauchy product, truncated at the smaller of the operand cutoffs.
FormalSeries series_mul(const FormalSeries& a, const FormalSeries& b, const StructureParams& p);
/// (D^n a)_beta = (beta(n)+1) a_{beta+e_n}
FormalSeries series_derivative(const FormalSeries& a, const PolyIndex& n);
/// Keeps coefficients at populated beta.
FormalSeries project_T(const FormalSeries& a, const StructureParams& p);
/// Keeps coefficients at [beta] >= 0.
FormalSeries project_Ttilde(const FormalSeries& a);

} // namespace mirs
