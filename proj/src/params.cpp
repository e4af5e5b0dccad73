#include "mirs/params.hpp"

#include "mirs/errors.hpp"

#include <algorithm>
#include <vector>

#include <fmt/format.h>

namespace mirs {

namespace {

bool pbar_window_ok(int kmin, int D, const Rational& alpha, const Rational& pbar)
{
    Rational dp = Rational(D) / pbar;
    return pbar > 2 && Rational(kmin) * alpha + dp > 0 && alpha - 2 + dp < 0;
}

} // namespace

StructureParams::StructureParams(int d, int kmin, Rational alpha, Rational kappa,
                                 std::optional<Rational> pbar, std::optional<int> kmax)
    : d_(d), kmin_(kmin), alpha_(std::move(alpha)), kappa_(std::move(kappa)),
      pbar_(std::move(pbar)), kmax_(kmax)
{
    if (d_ < 3) {
        throw ValidationError(fmt::format("spatial dimension must be >= 3, got {}", d_));
    }
    if (kmin_ < 3 || kmin_ % 2 == 0) {
        throw ValidationError(fmt::format("kmin must be an odd integer >= 3, got {}", kmin_));
    }
    if (!(alpha_ < 0) || !(alpha_ > ratio(-2, kmin_ - 1))) {
        throw ValidationError(fmt::format("alpha = {} violates subcriticality -2/(kmin-1) < alpha < 0",
                                          to_string(alpha_)));
    }
    Rational bound = std::min(a(), Rational(-2 * alpha_));
    if (!(kappa_ > 0) || !(kappa_ < bound)) {
        throw ValidationError(fmt::format("kappa = {} must lie in (0, {})", to_string(kappa_),
                                          to_string(bound)));
    }
    if (pbar_ && !pbar_window_ok(kmin_, D(), alpha_, *pbar_)) {
        throw ValidationError(fmt::format(
            "pbar = {} must satisfy pbar > 2, kmin*alpha + D/pbar > 0 and alpha - 2 + D/pbar < 0",
            to_string(*pbar_)));
    }
    if (kmax_ && (*kmax_ < kmin_ || *kmax_ % 2 == 0)) {
        throw ValidationError(fmt::format("kmax must be odd and >= kmin, got {}", *kmax_));
    }
    if (!pbar_) {
        try {
            resolved_pbar_ = default_pbar();
        } catch (const ValidationError&) {
            // reported by pbar_or_default() when somebody needs it
        }
    }
}

StructureParams StructureParams::defaults()
{
    return StructureParams(3, 3, Rational(-11, 20), Rational(1, 100));
}

Rational StructureParams::pbar_or_default() const
{
    if (pbar_) {
        return *pbar_;
    }
    return resolved_pbar_ ? *resolved_pbar_ : default_pbar();
}

Rational StructureParams::default_pbar() const
{
    // kmin alpha + D/pbar > 0 bounds pbar from above by D / (-kmin alpha).
    Rational upper = Rational(D()) / (Rational(-kmin_) * alpha_);
    std::vector<Rational> candidates;
    for (long q = 1; q <= 100; ++q) {
        // numerators p with 2 < p/q < upper
        Integer pstart = 2 * q + 1;
        for (Integer p = pstart; ratio(p, q) < upper; ++p) {
            Rational c(p, q);
            c.canonicalize();
            if (c.get_den() != q) {
                continue; // already seen with a smaller denominator
            }
            candidates.push_back(c);
        }
    }
    std::sort(candidates.begin(), candidates.end());
    for (const auto& c : candidates) {
        if (pbar_window_ok(kmin_, D(), alpha_, c) && !is_integer(Rational(D()) / c)) {
            return c;
        }
    }
    throw ValidationError("no rational pbar with denominator <= 100 fits the admissible window");
}

StructureParams StructureParams::with_kmax(std::optional<int> kmax) const
{
    return StructureParams(d_, kmin_, alpha_, kappa_, pbar_, kmax);
}

StructureParams StructureParams::with_alpha(Rational alpha) const
{
    return StructureParams(d_, kmin_, std::move(alpha), kappa_, std::nullopt, kmax_);
}

bool StructureParams::admits_k(int k) const
{
    return k >= kmin_ && k % 2 == 1 && (!kmax_ || k <= *kmax_);
}

std::string StructureParams::describe() const
{
    std::string out = fmt::format("d={} kmin={} alpha={} kappa={} D={} a={}", d_, kmin_,
                                  to_string(alpha_), to_string(kappa_), D(), to_string(a()));
    if (pbar_) {
        out += " pbar=" + to_string(*pbar_);
    }
    if (kmax_) {
        out += fmt::format(" kmax={}", *kmax_);
    }
    return out;
}

} // namespace mirs
