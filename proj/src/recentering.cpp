#include "mirs/recentering.hpp"

#include "mirs/errors.hpp"

#include <algorithm>
#include <functional>

#include <fmt/format.h>

namespace mirs {

namespace {

void set_entry(std::map<PolyIndex, std::map<Multiindex, Coefficient>>& entries, const PolyIndex& n,
               const Multiindex& beta, const Coefficient& c)
{
    if (c.is_zero()) {
        auto it = entries.find(n);
        if (it != entries.end()) {
            it->second.erase(beta);
            if (it->second.empty()) {
                entries.erase(it);
            }
        }
        return;
    }
    entries[n][beta] = c;
}

Coefficient get_entry(const std::map<PolyIndex, std::map<Multiindex, Coefficient>>& entries,
                      const PolyIndex& n, const Multiindex& beta)
{
    auto it = entries.find(n);
    if (it == entries.end()) {
        return {};
    }
    auto jt = it->second.find(beta);
    return jt == it->second.end() ? Coefficient() : jt->second;
}

std::size_t count_entries(const std::map<PolyIndex, std::map<Multiindex, Coefficient>>& entries)
{
    std::size_t s = 0;
    for (const auto& [n, row] : entries) {
        s += row.size();
    }
    return s;
}

std::string slot_name(const PolyIndex& n, const Multiindex& beta)
{
    return fmt::format("(n={}, beta={})", n.to_string(), beta.to_string());
}

Rational relative_order(const Multiindex& beta, const StructureParams& p)
{
    return order(beta, p).evaluate(p) - order(Multiindex(), p).evaluate(p);
}

void check_query(const GammaEntryQuery& q, const StructureParams& p)
{
    validate(q.beta, p);
    validate(q.gamma, p);
    if (q.cutoff && order(q.beta, p).evaluate(p) > *q.cutoff) {
        throw ValidationError(fmt::format("query cutoff {} lies below |{}|_<", to_string(*q.cutoff),
                                          q.beta.to_string()));
    }
}

} // namespace

void PiSpec::set(const PolyIndex& n, const Multiindex& beta, const Coefficient& c)
{
    set_entry(entries, n, beta, c);
}

Coefficient PiSpec::at(const PolyIndex& n, const Multiindex& beta) const
{
    return get_entry(entries, n, beta);
}

std::size_t PiSpec::size() const
{
    return count_entries(entries);
}

void PiSpec::validate(const StructureParams& p) const
{
    for (const auto& [n, row] : entries) {
        const int nd = parabolic_degree(n, p);
        for (const auto& [beta, c] : row) {
            mirs::validate(beta, p);
            if (c.is_zero()) {
                continue;
            }
            if (compare(LinearForm::constant(nd), homogeneity(beta, p), p) >= 0) {
                throw ValidationError(fmt::format("pi entry {} violates |n| < |beta|", slot_name(n, beta)));
            }
            if (strict_population && !(bracket(beta) >= 0 || is_purely_polynomial(beta))) {
                throw ValidationError(
                    fmt::format("pi entry {} violates the population condition", slot_name(n, beta)));
            }
        }
    }
}

void DPiSpec::set(const PolyIndex& n, const Multiindex& beta, const Coefficient& c)
{
    set_entry(entries, n, beta, c);
}

Coefficient DPiSpec::at(const PolyIndex& n, const Multiindex& beta) const
{
    return get_entry(entries, n, beta);
}

std::size_t DPiSpec::size() const
{
    return count_entries(entries);
}

void DPiSpec::validate(const StructureParams& p) const
{
    const Rational bound = p.alpha() + Rational(p.D()) / p.pbar_or_default();
    for (const auto& [n, row] : entries) {
        const int nd = parabolic_degree(n, p);
        for (const auto& [beta, c] : row) {
            mirs::validate(beta, p);
            if (c.is_zero()) {
                continue;
            }
            if (!(Rational(nd) < bound)) {
                throw ValidationError(
                    fmt::format("dpi entry {} violates |n| < alpha + D/pbar = {}", slot_name(n, beta),
                                to_string(bound)));
            }
            if (bracket(beta) < 0) {
                throw ValidationError(fmt::format("dpi entry {} violates [beta] >= 0", slot_name(n, beta)));
            }
        }
    }
}

GammaEngine::GammaEngine(PiSpec spec, StructureParams p) : spec_(std::move(spec)), p_(std::move(p))
{
    spec_.validate(p_);
}

Coefficient GammaEngine::entry(const Multiindex& beta, const Multiindex& gamma) const
{
    // Ordered tuples (n_1, beta_1), ..., (n_M, beta_M); the derivatives act
    // on z^gamma one at a time, so the remaining monomial after M steps is
    // prod gamma(n)^{falling} z^{gamma - sum e_{n_i}}.
    Coefficient total;
    std::vector<Rational> inv_factorial{Rational(1)};
    std::function<void(const Multiindex&, const Multiindex&, const Coefficient&, int)> rec =
        [&](const Multiindex& rest, const Multiindex& reduced, const Coefficient& factor, int M) {
            if (rest == reduced) {
                while (static_cast<int>(inv_factorial.size()) <= M) {
                    inv_factorial.push_back(inv_factorial.back() / Rational(static_cast<long>(inv_factorial.size())));
                }
                total += factor * inv_factorial[static_cast<std::size_t>(M)];
            }
            for (const auto& [n, mult] : reduced.npart()) {
                auto row = spec_.entries.find(n);
                if (row == spec_.entries.end()) {
                    continue;
                }
                Multiindex next_reduced(reduced);
                next_reduced.remove_n(n);
                for (const auto& [b, c] : row->second) {
                    if (!rest.contains(b)) {
                        continue;
                    }
                    rec(rest - b, next_reduced, factor * c * Rational(mult), M + 1);
                }
            }
        };
    rec(beta, gamma, Coefficient(1), 0);
    return total;
}

Coefficient GammaEngine::entry_recursive(const Multiindex& beta, const Multiindex& gamma)
{
    // Gamma z_k = z_k: the k-units of gamma pass straight through.
    if (!gamma.kpart().empty()) {
        Multiindex kunits;
        for (const auto& [k, m] : gamma.kpart()) {
            kunits.add_k(k, m);
        }
        if (!beta.contains(kunits)) {
            return Coefficient();
        }
        return entry_recursive(beta - kunits, gamma - kunits);
    }
    if (gamma.empty()) {
        return beta.empty() ? Coefficient(1) : Coefficient();
    }
    auto& column = memo_[gamma];
    if (auto it = column.find(beta); it != column.end()) {
        return it->second;
    }
    const PolyIndex n = gamma.npart().begin()->first;
    const Multiindex u = Multiindex::e(n);
    const Multiindex rest_gamma = gamma - u;
    Coefficient out;
    if (beta.contains(u)) {
        out += entry_recursive(beta - u, rest_gamma);
    }
    if (auto row = spec_.entries.find(n); row != spec_.entries.end()) {
        for (const auto& [b, c] : row->second) {
            if (beta.contains(b)) {
                out += c * entry_recursive(beta - b, rest_gamma);
            }
        }
    }
    column.emplace(beta, out);
    return out;
}

FormalSeries GammaEngine::image_of_unit(const PolyIndex& n) const
{
    FormalSeries s = FormalSeries::monomial(Multiindex::e(n));
    if (auto row = spec_.entries.find(n); row != spec_.entries.end()) {
        for (const auto& [b, c] : row->second) {
            s.add(b, c);
        }
    }
    return s;
}

FormalSeries GammaEngine::apply(const FormalSeries& a, const std::optional<Rational>& cutoff) const
{
    std::map<PolyIndex, FormalSeries> images;
    std::map<Multiindex, Coefficient> acc;
    const std::optional<Rational> rel_cut =
        cutoff ? std::optional<Rational>(*cutoff - order(Multiindex(), p_).evaluate(p_)) : std::nullopt;

    for (const auto& [gamma, coeff] : a.terms()) {
        std::vector<const FormalSeries*> factors;
        Multiindex kpart;
        for (const auto& [k, m] : gamma.kpart()) {
            kpart.add_k(k, m);
        }
        for (const auto& [n, m] : gamma.npart()) {
            auto it = images.find(n);
            if (it == images.end()) {
                it = images.emplace(n, image_of_unit(n)).first;
            }
            for (int i = 0; i < m; ++i) {
                factors.push_back(&it->second);
            }
        }
        // suffix[i]: smallest relative order the factors i.. can still add.
        std::vector<Rational> suffix(factors.size() + 1, Rational(0));
        for (std::size_t i = factors.size(); i-- > 0;) {
            Rational lo;
            bool first = true;
            for (const auto& [b, c] : factors[i]->terms()) {
                Rational r = relative_order(b, p_);
                if (first || r < lo) {
                    lo = r;
                    first = false;
                }
            }
            suffix[i] = suffix[i + 1] + lo;
        }
        std::map<Multiindex, Coefficient> partial{{kpart, coeff}};
        for (std::size_t i = 0; i < factors.size(); ++i) {
            std::map<Multiindex, Coefficient> next;
            for (const auto& [b1, c1] : partial) {
                const Rational r1 = relative_order(b1, p_);
                for (const auto& [b2, c2] : factors[i]->terms()) {
                    if (rel_cut && r1 + relative_order(b2, p_) + suffix[i + 1] > *rel_cut) {
                        continue;
                    }
                    Coefficient& slot = next[b1 + b2];
                    slot += c1 * c2;
                }
            }
            partial.clear();
            for (auto& [b, c] : next) {
                if (!c.is_zero()) {
                    partial.emplace(b, std::move(c));
                }
            }
        }
        for (auto& [b, c] : partial) {
            acc[b] += c;
        }
    }
    FormalSeries out(cutoff);
    for (const auto& [b, c] : acc) {
        if (cutoff) {
            out.add(b, c, p_);
        } else {
            out.add(b, c);
        }
    }
    return out;
}

Coefficient gamma_entry(const PiSpec& spec, const GammaEntryQuery& q, const StructureParams& p)
{
    check_query(q, p);
    return GammaEngine(spec, p).entry(q.beta, q.gamma);
}

Coefficient gamma_entry_recursive(const PiSpec& spec, const GammaEntryQuery& q, const StructureParams& p)
{
    check_query(q, p);
    return GammaEngine(spec, p).entry_recursive(q.beta, q.gamma);
}

namespace {

Coefficient dgamma_with(const GammaEngine& engine, const DPiSpec& dspec, const Multiindex& beta,
                        const Multiindex& gamma)
{
    Coefficient out;
    for (const auto& [n, mult] : gamma.npart()) {
        auto row = dspec.entries.find(n);
        if (row == dspec.entries.end()) {
            continue;
        }
        Multiindex lowered(gamma);
        lowered.remove_n(n);
        for (const auto& [b, c] : row->second) {
            if (beta.contains(b)) {
                out += c * engine.entry(beta - b, lowered) * Rational(mult);
            }
        }
    }
    return out;
}

} // namespace

Coefficient dgamma_entry(const PiSpec& spec, const DPiSpec& dspec, const GammaEntryQuery& q,
                         const StructureParams& p)
{
    check_query(q, p);
    dspec.validate(p);
    const GammaEngine engine(spec, p);
    return dgamma_with(engine, dspec, q.beta, q.gamma);
}

FormalSeries gamma_apply(const PiSpec& spec, const FormalSeries& a, const std::optional<Rational>& cutoff,
                         const StructureParams& p)
{
    return GammaEngine(spec, p).apply(a, cutoff);
}

FormalSeries dgamma_apply(const PiSpec& spec, const DPiSpec& dspec, const FormalSeries& a,
                          const std::optional<Rational>& cutoff, const StructureParams& p)
{
    dspec.validate(p);
    const GammaEngine engine(spec, p);
    FormalSeries total;
    for (const auto& [n, row] : dspec.entries) {
        FormalSeries dpi;
        for (const auto& [b, c] : row) {
            dpi.add(b, c);
        }
        const FormalSeries image = engine.apply(series_derivative(a, n), std::nullopt);
        total += series_mul(dpi, image, p);
    }
    return cutoff ? total.truncated(*cutoff, p) : total;
}

namespace {

struct SymbolicSpecs {
    PiSpec pi;
    DPiSpec dpi;
    std::map<std::string, SpecSlot> pi_names;
    std::map<std::string, SpecSlot> dpi_names;
};

template <class Spec>
void symbolize(const Spec& in, Spec& out, std::map<std::string, SpecSlot>& names, const char* prefix)
{
    std::size_t i = 0;
    for (const auto& [n, row] : in.entries) {
        for (const auto& [b, c] : row) {
            if (c.is_zero()) {
                continue;
            }
            std::string name = fmt::format("{}#{}", prefix, i++);
            out.set(n, b, Coefficient::symbol(name));
            names.emplace(std::move(name), SpecSlot{n, b});
        }
    }
}

std::set<SpecSlot> lookup(const Coefficient& c, const std::map<std::string, SpecSlot>& names)
{
    std::set<SpecSlot> out;
    for (const auto& s : c.symbols()) {
        if (auto it = names.find(s); it != names.end()) {
            out.insert(it->second);
        }
    }
    return out;
}

} // namespace

std::set<SpecSlot> gamma_dependencies(const PiSpec& spec, const Multiindex& beta, const Multiindex& gamma,
                                      const StructureParams& p)
{
    spec.validate(p);
    SymbolicSpecs s;
    s.pi.strict_population = spec.strict_population;
    symbolize(spec, s.pi, s.pi_names, "pi");
    return lookup(GammaEngine(s.pi, p).entry(beta, gamma), s.pi_names);
}

DGammaDependencies dgamma_dependencies(const PiSpec& spec, const DPiSpec& dspec, const Multiindex& beta,
                                       const Multiindex& gamma, const StructureParams& p)
{
    spec.validate(p);
    dspec.validate(p);
    SymbolicSpecs s;
    s.pi.strict_population = spec.strict_population;
    symbolize(spec, s.pi, s.pi_names, "pi");
    symbolize(dspec, s.dpi, s.dpi_names, "dpi");
    const Coefficient c = dgamma_with(GammaEngine(s.pi, p), s.dpi, beta, gamma);
    return {lookup(c, s.pi_names), lookup(c, s.dpi_names)};
}

Rational polynomial_sector_gamma(const Point& x, const Point& y, const PolyIndex& n, const PolyIndex& m)
{
    if (x.size() != n.arity() || y.size() != n.arity() || m.arity() != n.arity()) {
        throw ValidationError("point and polynomial index arities differ");
    }
    if (!m.dominated_by(n)) {
        return 0;
    }
    Rational out = 1;
    for (std::size_t i = 0; i < n.arity(); ++i) {
        out *= Rational(binomial(n[i], m[i])) * pow(y[i] - x[i], n[i] - m[i]);
    }
    return out;
}

Coefficient polynomial_sector_gamma(const std::vector<std::string>& displacement_names, const PolyIndex& n,
                                    const PolyIndex& m)
{
    if (displacement_names.size() != n.arity() || m.arity() != n.arity()) {
        throw ValidationError("displacement and polynomial index arities differ");
    }
    if (!m.dominated_by(n)) {
        return {};
    }
    Rational scalar = 1;
    std::vector<std::pair<std::string, int>> factors;
    for (std::size_t i = 0; i < n.arity(); ++i) {
        scalar *= Rational(binomial(n[i], m[i]));
        factors.emplace_back(displacement_names[i], n[i] - m[i]);
    }
    return Coefficient::term(Monomial(std::move(factors)), scalar);
}

namespace {

PiSpec polynomial_spec_from(const std::function<Coefficient(const PolyIndex&, const PolyIndex&)>& entry,
                            int max_degree, const StructureParams& p)
{
    PiSpec spec;
    spec.strict_population = true;
    const auto all = enumerate_populated(Rational(max_degree), p, {1, Rational(max_degree), false});
    for (const auto& beta : all) {
        if (!is_purely_polynomial(beta)) {
            continue;
        }
        const PolyIndex& n = beta.npart().begin()->first;
        for (const auto& mu : all) {
            if (!is_purely_polynomial(mu)) {
                continue;
            }
            const PolyIndex& m = mu.npart().begin()->first;
            if (m != n && m.dominated_by(n)) {
                spec.set(m, beta, entry(n, m));
            }
        }
    }
    return spec;
}

} // namespace

PiSpec polynomial_pi_spec(const Point& x, const Point& y, int max_degree, const StructureParams& p)
{
    if (x.size() != static_cast<std::size_t>(p.d()) + 1 || y.size() != x.size()) {
        throw ValidationError("points must have 1+d coordinates");
    }
    return polynomial_spec_from(
        [&](const PolyIndex& n, const PolyIndex& m) { return Coefficient(polynomial_sector_gamma(x, y, n, m)); },
        max_degree, p);
}

PiSpec polynomial_pi_spec(const std::vector<std::string>& displacement_names, int max_degree,
                          const StructureParams& p)
{
    if (displacement_names.size() != static_cast<std::size_t>(p.d()) + 1) {
        throw ValidationError("displacement must have 1+d components");
    }
    return polynomial_spec_from(
        [&](const PolyIndex& n, const PolyIndex& m) {
            return polynomial_sector_gamma(displacement_names, n, m);
        },
        max_degree, p);
}

} // namespace mirs
