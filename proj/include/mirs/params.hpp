#pragma once

#include "mirs/rational.hpp"

#include <optional>
#include <string>

namespace mirs {

/// Structural parameters of the index set and of the homogeneity.
///
/// alpha < 0 is the homogeneity of the linear solution, kmin the odd
/// degree of the surviving nonlinearity, kappa the discount attached to
/// every nonlinearity slot k > kmin. All quantities are exact rationals;
/// genericity (which an irrational alpha would give for free) is checked
/// dynamically wherever two values are compared.
class StructureParams {
public:
    /// Throws ValidationError if any constraint fails:
    ///  d >= 3, kmin odd >= 3, -2/(kmin-1) < alpha < 0,
    ///  0 < kappa < min(a, -2 alpha), and when pbar is given
    ///  pbar > 2, kmin alpha + D/pbar > 0, alpha - 2 + D/pbar < 0.
    StructureParams(int d, int kmin, Rational alpha, Rational kappa,
                    std::optional<Rational> pbar = std::nullopt,
                    std::optional<int> kmax = std::nullopt);

    /// d = 3, kmin = 3, alpha = -11/20, kappa = 1/100.
    static StructureParams defaults();

    int d() const { return d_; }
    int kmin() const { return kmin_; }
    const Rational& alpha() const { return alpha_; }
    const Rational& kappa() const { return kappa_; }
    int D() const { return d_ + 2; }
    Rational a() const { return Rational(2) + Rational(kmin_ - 1) * alpha_; }
    const std::optional<Rational>& pbar() const { return pbar_; }

    /// Optional upper bound on the nonlinearity slots (a restricted index
    /// set; kmax == kmin keeps only z_kmin).
    const std::optional<int>& kmax() const { return kmax_; }

    /// pbar if configured, else the canonical default (see default_pbar).
    Rational pbar_or_default() const;

    /// Smallest rational > 2 with denominator <= 100 satisfying both pbar
    /// windows, with D/pbar not an integer. Throws ValidationError if the
    /// window contains no such rational.
    Rational default_pbar() const;

    StructureParams with_kmax(std::optional<int> kmax) const;
    StructureParams with_alpha(Rational alpha) const;

    bool admits_k(int k) const;

    std::string describe() const;

private:
    int d_;
    int kmin_;
    Rational alpha_;
    Rational kappa_;
    std::optional<Rational> pbar_;
    std::optional<int> kmax_;
    std::optional<Rational> resolved_pbar_;
};

} // namespace mirs
