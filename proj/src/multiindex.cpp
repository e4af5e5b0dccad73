#include "mirs/multiindex.hpp"

#include "mirs/errors.hpp"

#include <fmt/format.h>

namespace mirs {

PolyIndex::PolyIndex(std::vector<int> components) : c_(std::move(components))
{
    for (int v : c_) {
        if (v < 0) {
            throw ValidationError("polynomial index entries must be nonnegative");
        }
    }
}

PolyIndex PolyIndex::unit(int d, int i)
{
    std::vector<int> c(static_cast<std::size_t>(d) + 1, 0);
    c.at(static_cast<std::size_t>(i)) = 1;
    return PolyIndex(std::move(c));
}

bool PolyIndex::is_zero() const
{
    for (int v : c_) {
        if (v != 0) {
            return false;
        }
    }
    return true;
}

bool PolyIndex::dominated_by(const PolyIndex& n) const
{
    if (n.arity() != arity()) {
        return false;
    }
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] > n.c_[i]) {
            return false;
        }
    }
    return true;
}

PolyIndex PolyIndex::operator+(const PolyIndex& o) const
{
    if (o.arity() != arity()) {
        throw ValidationError("polynomial index arity mismatch");
    }
    std::vector<int> c(c_);
    for (std::size_t i = 0; i < c.size(); ++i) {
        c[i] += o.c_[i];
    }
    return PolyIndex(std::move(c));
}

PolyIndex PolyIndex::operator-(const PolyIndex& o) const
{
    if (!o.dominated_by(*this)) {
        throw ValidationError("polynomial index difference is not componentwise nonnegative");
    }
    std::vector<int> c(c_);
    for (std::size_t i = 0; i < c.size(); ++i) {
        c[i] -= o.c_[i];
    }
    return PolyIndex(std::move(c));
}

std::string PolyIndex::to_string() const
{
    return fmt::format("({})", fmt::join(c_, ","));
}

int parabolic_degree(const PolyIndex& n)
{
    int out = 0;
    for (std::size_t i = 0; i < n.arity(); ++i) {
        out += (i == 0 ? 2 : 1) * n[i];
    }
    return out;
}

int parabolic_degree(const PolyIndex& n, const StructureParams& p)
{
    if (n.arity() != static_cast<std::size_t>(p.d()) + 1) {
        throw ValidationError(fmt::format("polynomial index {} has arity {}, expected {}", n.to_string(),
                                          n.arity(), p.d() + 1));
    }
    return parabolic_degree(n);
}

Multiindex Multiindex::f(int k, int mult)
{
    Multiindex m;
    m.add_k(k, mult);
    return m;
}

Multiindex Multiindex::e(const PolyIndex& n, int mult)
{
    Multiindex m;
    m.add_n(n, mult);
    return m;
}

int Multiindex::k(int slot) const
{
    auto it = k_.find(slot);
    return it == k_.end() ? 0 : it->second;
}

int Multiindex::n(const PolyIndex& slot) const
{
    auto it = n_.find(slot);
    return it == n_.end() ? 0 : it->second;
}

int Multiindex::k_count() const
{
    int s = 0;
    for (const auto& [k, m] : k_) {
        s += m;
    }
    return s;
}

int Multiindex::n_count() const
{
    int s = 0;
    for (const auto& [n, m] : n_) {
        s += m;
    }
    return s;
}

int Multiindex::k_count_above(int kmin) const
{
    int s = 0;
    for (const auto& [k, m] : k_) {
        if (k > kmin) {
            s += m;
        }
    }
    return s;
}

bool Multiindex::contains(const Multiindex& other) const
{
    for (const auto& [k, m] : other.k_) {
        if (this->k(k) < m) {
            return false;
        }
    }
    for (const auto& [n, m] : other.n_) {
        if (this->n(n) < m) {
            return false;
        }
    }
    return true;
}

Multiindex& Multiindex::operator+=(const Multiindex& o)
{
    for (const auto& [k, m] : o.k_) {
        k_[k] += m;
    }
    for (const auto& [n, m] : o.n_) {
        n_[n] += m;
    }
    return *this;
}

Multiindex Multiindex::operator+(const Multiindex& o) const
{
    Multiindex out(*this);
    out += o;
    return out;
}

Multiindex Multiindex::operator-(const Multiindex& o) const
{
    if (!contains(o)) {
        throw ValidationError(fmt::format("{} - {} is not a multiindex", to_string(), o.to_string()));
    }
    Multiindex out(*this);
    for (const auto& [k, m] : o.k_) {
        auto it = out.k_.find(k);
        if ((it->second -= m) == 0) {
            out.k_.erase(it);
        }
    }
    for (const auto& [n, m] : o.n_) {
        auto it = out.n_.find(n);
        if ((it->second -= m) == 0) {
            out.n_.erase(it);
        }
    }
    return out;
}

Multiindex& Multiindex::add_k(int slot, int mult)
{
    if (mult < 0) {
        throw ValidationError("negative multiplicity");
    }
    if (mult > 0) {
        k_[slot] += mult;
    }
    return *this;
}

Multiindex& Multiindex::add_n(const PolyIndex& slot, int mult)
{
    if (mult < 0) {
        throw ValidationError("negative multiplicity");
    }
    if (mult > 0) {
        n_[slot] += mult;
    }
    return *this;
}

Multiindex& Multiindex::remove_n(const PolyIndex& slot)
{
    auto it = n_.find(slot);
    if (it == n_.end()) {
        throw ValidationError("remove_n on an absent slot");
    }
    if (--it->second == 0) {
        n_.erase(it);
    }
    return *this;
}

std::string Multiindex::to_string() const
{
    if (empty()) {
        return "0";
    }
    std::string out;
    auto sep = [&out] {
        if (!out.empty()) {
            out += "+";
        }
    };
    for (const auto& [k, m] : k_) {
        sep();
        out += m == 1 ? fmt::format("f{}", k) : fmt::format("{}f{}", m, k);
    }
    for (const auto& [n, m] : n_) {
        sep();
        out += m == 1 ? "e" + n.to_string() : fmt::format("{}e{}", m, n.to_string());
    }
    return out;
}

void Multiindex::for_each_submultiindex(const std::function<void(const Multiindex&)>& fn) const
{
    std::vector<std::pair<int, int>> ks(k_.begin(), k_.end());
    std::vector<std::pair<PolyIndex, int>> ns(n_.begin(), n_.end());
    Multiindex current;
    std::function<void(std::size_t)> rec_n;
    std::function<void(std::size_t)> rec_k = [&](std::size_t i) {
        if (i == ks.size()) {
            rec_n(0);
            return;
        }
        for (int m = 0; m <= ks[i].second; ++m) {
            if (m > 0) {
                current.k_[ks[i].first] = m;
            }
            rec_k(i + 1);
        }
        current.k_.erase(ks[i].first);
    };
    rec_n = [&](std::size_t i) {
        if (i == ns.size()) {
            fn(current);
            return;
        }
        for (int m = 0; m <= ns[i].second; ++m) {
            if (m > 0) {
                current.n_[ns[i].first] = m;
            }
            rec_n(i + 1);
        }
        current.n_.erase(ns[i].first);
    };
    rec_k(0);
}

void validate(const Multiindex& beta, const StructureParams& p)
{
    for (const auto& [k, m] : beta.kpart()) {
        if (!p.admits_k(k)) {
            throw ValidationError(fmt::format("nonlinearity slot k={} is not an admitted odd k >= {}{}", k,
                                              p.kmin(),
                                              p.kmax() ? fmt::format(" and <= {}", *p.kmax()) : ""));
        }
        if (m <= 0) {
            throw ValidationError("stored multiplicities must be positive");
        }
    }
    for (const auto& [n, m] : beta.npart()) {
        parabolic_degree(n, p);
        if (m <= 0) {
            throw ValidationError("stored multiplicities must be positive");
        }
    }
}

LinearForm homogeneity(const Multiindex& beta, const StructureParams& p)
{
    const int K = beta.k_count();
    const int N = beta.n_count();
    long poly_degree = 0;
    for (const auto& [n, m] : beta.npart()) {
        poly_degree += static_cast<long>(parabolic_degree(n)) * m;
    }
    LinearForm out;
    out.calpha = Rational(1 + (p.kmin() - 1) * K - N);
    out.c0 = Rational(2 * K + poly_degree);
    out.ckappa = 0;
    return out;
}

int bracket(const Multiindex& beta)
{
    int b = 0;
    for (const auto& [k, m] : beta.kpart()) {
        b += (k - 1) * m;
    }
    return b - beta.n_count();
}

LinearForm order(const Multiindex& beta, const StructureParams& p)
{
    LinearForm out = homogeneity(beta, p);
    out.c0 += ratio(p.D(), 2) * Rational(1 + bracket(beta));
    return out;
}

LinearForm discounted_homogeneity(const Multiindex& beta, const StructureParams& p)
{
    LinearForm out = homogeneity(beta, p);
    out.ckappa = -Rational(beta.k_count_above(p.kmin()));
    return out;
}

bool is_purely_polynomial(const Multiindex& beta)
{
    return beta.kpart().empty() && beta.npart().size() == 1 && beta.npart().begin()->second == 1;
}

bool is_special_form(const Multiindex& beta, const StructureParams& p)
{
    return beta.kpart().size() == 1 && beta.kpart().begin()->first == p.kmin() &&
           beta.kpart().begin()->second == 1 && beta.n_count() == p.kmin();
}

bool is_populated(const Multiindex& beta, const StructureParams& p)
{
    return is_purely_polynomial(beta) || is_special_form(beta, p) || bracket(beta) >= 0;
}

OrderRelation compare_order(const Multiindex& beta, const Multiindex& other, const StructureParams& p)
{
    auto c = compare(order(beta, p), order(other, p), p);
    if (c < 0) {
        return OrderRelation::less;
    }
    if (c > 0) {
        return OrderRelation::greater;
    }
    return OrderRelation::equal;
}

} // namespace mirs

std::size_t std::hash<mirs::Multiindex>::operator()(const mirs::Multiindex& m) const noexcept
{
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    for (const auto& [k, mult] : m.kpart()) {
        mix(static_cast<std::size_t>(k));
        mix(static_cast<std::size_t>(mult));
    }
    mix(0xabcdefULL);
    for (const auto& [n, mult] : m.npart()) {
        for (int c : n.components()) {
            mix(static_cast<std::size_t>(c));
        }
        mix(static_cast<std::size_t>(mult) * 31u);
    }
    return h;
}
