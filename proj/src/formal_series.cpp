#include "mirs/formal_series.hpp"

#include "mirs/errors.hpp"

#include <algorithm>

namespace mirs {

FormalSeries FormalSeries::one()
{
    return monomial(Multiindex());
}

FormalSeries FormalSeries::monomial(const Multiindex& beta, const Coefficient& c)
{
    FormalSeries s;
    s.add(beta, c);
    return s;
}

Coefficient FormalSeries::at(const Multiindex& beta) const
{
    auto it = t_.find(beta);
    return it == t_.end() ? Coefficient() : it->second;
}

void FormalSeries::add(const Multiindex& beta, const Coefficient& c, const StructureParams& p)
{
    if (cutoff_ && order(beta, p).evaluate(p) > *cutoff_) {
        return;
    }
    if (c.is_zero()) {
        return;
    }
    auto [it, inserted] = t_.try_emplace(beta, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) {
            t_.erase(it);
        }
    }
}

void FormalSeries::add(const Multiindex& beta, const Coefficient& c)
{
    if (cutoff_) {
        throw ValidationError("adding to a truncated series needs the structure parameters");
    }
    if (c.is_zero()) {
        return;
    }
    auto [it, inserted] = t_.try_emplace(beta, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) {
            t_.erase(it);
        }
    }
}

namespace {

void merge_into(std::map<Multiindex, Coefficient>& t, const Multiindex& beta, const Coefficient& c)
{
    auto [it, inserted] = t.try_emplace(beta, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) {
            t.erase(it);
        }
    }
}

std::optional<Rational> min_cutoff(const std::optional<Rational>& a, const std::optional<Rational>& b)
{
    if (a && b) {
        return std::min<Rational>(*a, *b);
    }
    return a ? a : b;
}

} // namespace

FormalSeries& FormalSeries::operator+=(const FormalSeries& o)
{
    if (o.cutoff_ && cutoff_ && *o.cutoff_ != *cutoff_) {
        throw ValidationError("adding series with different cutoffs");
    }
    if (!cutoff_) {
        cutoff_ = o.cutoff_;
    }
    for (const auto& [b, c] : o.t_) {
        merge_into(t_, b, c);
    }
    return *this;
}

FormalSeries& FormalSeries::operator-=(const FormalSeries& o)
{
    if (o.cutoff_ && cutoff_ && *o.cutoff_ != *cutoff_) {
        throw ValidationError("subtracting series with different cutoffs");
    }
    if (!cutoff_) {
        cutoff_ = o.cutoff_;
    }
    for (const auto& [b, c] : o.t_) {
        merge_into(t_, b, -c);
    }
    return *this;
}

FormalSeries& FormalSeries::operator*=(const Coefficient& s)
{
    for (auto it = t_.begin(); it != t_.end();) {
        it->second *= s;
        if (it->second.is_zero()) {
            it = t_.erase(it);
        } else {
            ++it;
        }
    }
    return *this;
}

FormalSeries FormalSeries::truncated(const Rational& cutoff, const StructureParams& p) const
{
    FormalSeries out(min_cutoff(cutoff_, cutoff));
    for (const auto& [b, c] : t_) {
        if (order(b, p).evaluate(p) <= *out.cutoff_) {
            out.t_.emplace(b, c);
        }
    }
    return out;
}

FormalSeries FormalSeries::filtered(const std::function<bool(const Multiindex&)>& keep) const
{
    FormalSeries out(cutoff_);
    for (const auto& [b, c] : t_) {
        if (keep(b)) {
            out.t_.emplace(b, c);
        }
    }
    return out;
}

std::string FormalSeries::to_string() const
{
    if (t_.empty()) {
        return "0";
    }
    std::string out;
    for (const auto& [b, c] : t_) {
        if (!out.empty()) {
            out += " + ";
        }
        out += "(" + c.to_string() + ")*z^[" + b.to_string() + "]";
    }
    return out;
}

FormalSeries operator+(FormalSeries a, const FormalSeries& b)
{
    return a += b;
}

FormalSeries operator-(FormalSeries a, const FormalSeries& b)
{
    return a -= b;
}

FormalSeries series_mul(const FormalSeries& a, const FormalSeries& b, const StructureParams& p)
{
    FormalSeries out(min_cutoff(a.cutoff(), b.cutoff()));
    const auto& cut = out.cutoff();
    std::map<Multiindex, Coefficient> acc;
    if (!cut) {
        for (const auto& [ba, ca] : a.terms()) {
            for (const auto& [bb, cb] : b.terms()) {
                merge_into(acc, ba + bb, ca * cb);
            }
        }
    } else {
        // |beta + gamma|_< - |0|_< is additive, so the product order is known
        // before forming the product.
        const Rational empty_order = order(Multiindex(), p).evaluate(p);
        std::vector<std::pair<Rational, const std::pair<const Multiindex, Coefficient>*>> bs;
        for (const auto& term : b.terms()) {
            bs.emplace_back(order(term.first, p).evaluate(p) - empty_order, &term);
        }
        std::sort(bs.begin(), bs.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        for (const auto& [ba, ca] : a.terms()) {
            const Rational room = *cut - order(ba, p).evaluate(p);
            for (const auto& [ob, term] : bs) {
                if (ob > room) {
                    break;
                }
                merge_into(acc, ba + term->first, ca * term->second);
            }
        }
    }
    for (auto& [beta, c] : acc) {
        if (cut) {
            out.add(beta, c, p);
        } else {
            out.add(beta, c);
        }
    }
    return out;
}

FormalSeries series_derivative(const FormalSeries& a, const PolyIndex& n)
{
    FormalSeries out;
    std::map<Multiindex, Coefficient> acc;
    for (const auto& [beta, c] : a.terms()) {
        const int m = beta.n(n);
        if (m == 0) {
            continue;
        }
        Multiindex lowered(beta);
        lowered.remove_n(n);
        merge_into(acc, lowered, c * Rational(m));
    }
    for (auto& [beta, c] : acc) {
        out.add(beta, c);
    }
    return out;
}

FormalSeries project_T(const FormalSeries& a, const StructureParams& p)
{
    return a.filtered([&p](const Multiindex& beta) { return is_populated(beta, p); });
}

FormalSeries project_Ttilde(const FormalSeries& a)
{
    return a.filtered([](const Multiindex& beta) { return bracket(beta) >= 0; });
}

} // namespace mirs
