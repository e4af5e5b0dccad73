#pragma once

#include "mirs/rational.hpp"

#include <compare>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace mirs {

/// Product of opaque symbols with positive integer powers, sorted by name.
class Monomial {
public:
    Monomial() = default;
    /// Factors may repeat and contain zero powers; they are merged.
    explicit Monomial(std::vector<std::pair<std::string, int>> factors);
    static Monomial symbol(std::string name, int power = 1);

    const std::vector<std::pair<std::string, int>>& factors() const { return f_; }
    bool is_one() const { return f_.empty(); }
    int degree() const;
    int power_of(const std::string& name) const;

    Monomial operator*(const Monomial& o) const;

    auto operator<=>(const Monomial&) const = default;
    bool operator==(const Monomial&) const = default;

    /// "1", "p", "p^2*q"
    std::string to_string() const;

private:
    std::vector<std::pair<std::string, int>> f_;
};

/// Multivariate polynomial over opaque symbols with exact rational
/// coefficients, kept in normal form (no zero terms).
class Coefficient {
public:
    Coefficient() = default;
    Coefficient(const Rational& c); // NOLINT: implicit scalar embedding
    Coefficient(long c) : Coefficient(Rational(c)) {} // NOLINT
    static Coefficient symbol(const std::string& name, int power = 1);
    static Coefficient term(const Monomial& m, const Rational& c);

    const std::map<Monomial, Rational>& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    bool is_constant() const;
    /// Coefficient of the empty monomial.
    Rational constant_term() const;
    std::set<std::string> symbols() const;

    Coefficient& operator+=(const Coefficient& o);
    Coefficient& operator-=(const Coefficient& o);
    Coefficient& operator*=(const Coefficient& o);
    Coefficient& operator*=(const Rational& s);
    Coefficient operator-() const;

    friend Coefficient operator+(Coefficient a, const Coefficient& b) { return a += b; }
    friend Coefficient operator-(Coefficient a, const Coefficient& b) { return a -= b; }
    friend Coefficient operator*(const Coefficient& a, const Coefficient& b);
    friend Coefficient operator*(Coefficient a, const Rational& s) { return a *= s; }
    friend Coefficient operator*(const Rational& s, Coefficient a) { return a *= s; }

    friend bool operator==(const Coefficient& a, const Coefficient& b) { return a.t_ == b.t_; }

    Coefficient pow(int e) const;

    /// Replaces every occurrence of each symbol in the map by its image.
    Coefficient substitute(const std::map<std::string, Coefficient>& images) const;

    /// Evaluates with every symbol replaced by values.at(name).
    Rational evaluate(const std::map<std::string, Rational>& values) const;

    /// "0", "3/2", "2*p*q - q^2"
    std::string to_string() const;

private:
    void add_term(const Monomial& m, const Rational& c);
    std::map<Monomial, Rational> t_;
};

} // namespace mirs
