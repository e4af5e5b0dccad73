#include "mirs/noise_sim.hpp"

#include "mirs/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include <fftw3.h>
#include <fmt/format.h>
#include <json.hpp>

namespace mirs::sim {

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

using Spectrum = std::vector<std::complex<double>>;

std::size_t half_size(const SimConfig& cfg)
{
    std::size_t n = static_cast<std::size_t>(cfg.gridT);
    for (int i = 0; i + 1 < cfg.dsim; ++i) {
        n *= static_cast<std::size_t>(cfg.gridX);
    }
    return n * static_cast<std::size_t>(cfg.gridX / 2 + 1);
}

Spectrum forward(const SimConfig& cfg, const std::vector<double>& values)
{
    const auto shape = cfg.shape();
    std::vector<double> in(values);
    Spectrum out(half_size(cfg));
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_r2c(static_cast<int>(shape.size()), shape.data(), in.data(),
                                 reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

/// Unnormalised inverse transform.
std::vector<double> inverse(const SimConfig& cfg, Spectrum spec)
{
    const auto shape = cfg.shape();
    std::vector<double> out(cfg.size());
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_c2r(static_cast<int>(shape.size()), shape.data(),
                                 reinterpret_cast<fftw_complex*>(spec.data()), out.data(), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

struct Mode {
    std::size_t index;
    double q0;
    double qsp2;
    /// How many modes of the full spectrum this half-spectrum entry stands for.
    double weight;
    bool removed;
};

int signed_frequency(int j, int n)
{
    return j <= n / 2 ? j : j - n;
}

template <class Fn>
void for_each_mode(const SimConfig& cfg, Fn&& fn)
{
    const int T = cfg.gridT;
    const int X = cfg.gridX;
    const int half = X / 2 + 1;
    std::vector<int> idx(static_cast<std::size_t>(cfg.dsim), 0);
    std::size_t lin = 0;
    for (int j = 0; j < T; ++j) {
        const double q0 = two_pi * signed_frequency(j, T) / (T * cfg.dt);
        std::fill(idx.begin(), idx.end(), 0);
        bool done = false;
        while (!done) {
            double qsp2 = 0;
            bool removed = j == T / 2;
            bool zero = j == 0;
            for (int i = 0; i < cfg.dsim; ++i) {
                const double qi = two_pi * signed_frequency(idx[static_cast<std::size_t>(i)], X) / (X * cfg.dx);
                qsp2 += qi * qi;
                removed = removed || idx[static_cast<std::size_t>(i)] == X / 2;
                zero = zero && idx[static_cast<std::size_t>(i)] == 0;
            }
            const int last = idx.back();
            const double weight = (last == 0 || last == X / 2) ? 1.0 : 2.0;
            fn(Mode{lin++, q0, qsp2, weight, removed || zero});
            // advance the spatial multi-index, last coordinate fastest
            for (int i = cfg.dsim - 1;; --i) {
                const int limit = i == cfg.dsim - 1 ? half : X;
                if (++idx[static_cast<std::size_t>(i)] < limit) {
                    break;
                }
                idx[static_cast<std::size_t>(i)] = 0;
                if (i == 0) {
                    done = true;
                    break;
                }
            }
        }
    }
}

/// Unit-variance amplitudes sqrt(rho^(q) |q|_p^{-2s}) on the half spectrum.
std::vector<double> amplitudes(const SimConfig& cfg)
{
    std::vector<double> a(half_size(cfg), 0.0);
    double total = 0;
    const double rho4 = std::pow(cfg.cutoffRho, 4);
    for_each_mode(cfg, [&](const Mode& m) {
        if (m.removed) {
            return;
        }
        const double qp = parabolic_frequency(m.q0, m.qsp2);
        const double density = std::exp(-rho4 * (m.q0 * m.q0 + m.qsp2 * m.qsp2)) * std::pow(qp, -2 * cfg.s);
        a[m.index] = std::sqrt(density);
        total += m.weight * density;
    });
    const double norm = std::sqrt(total / static_cast<double>(cfg.size()));
    if (!(norm > 0) || !std::isfinite(norm)) {
        throw ValidationError("spectrum vanishes on this lattice");
    }
    for (auto& v : a) {
        v /= norm;
    }
    return a;
}

template <class Fn>
void parallel_for(int n, int jobs, Fn&& fn)
{
    jobs = std::max(1, std::min(jobs, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) {
        pool.emplace_back([&, w] {
            for (int i = w; i < n; i += jobs) {
                fn(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

std::vector<double> power_means(const LatticeField& f, int K, double scale)
{
    std::vector<double> m(static_cast<std::size_t>(K) + 1, 0.0);
    for (double v : f.values) {
        const double x = v * scale;
        double p = 1;
        for (int j = 0; j <= K; ++j) {
            m[static_cast<std::size_t>(j)] += p;
            p *= x;
        }
    }
    for (auto& v : m) {
        v /= static_cast<double>(f.values.size());
    }
    return m;
}

std::vector<double> average(const std::vector<std::vector<double>>& rows, std::size_t skip = SIZE_MAX)
{
    std::vector<double> out(rows.front().size(), 0.0);
    std::size_t n = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (r == skip) {
            continue;
        }
        for (std::size_t j = 0; j < out.size(); ++j) {
            out[j] += rows[r][j];
        }
        ++n;
    }
    for (auto& v : out) {
        v /= static_cast<double>(n);
    }
    return out;
}

MomentSequence rationalize_values(const std::vector<double>& m)
{
    MomentSequence out;
    out.m.emplace_back(1);
    for (std::size_t j = 1; j < m.size(); ++j) {
        out.m.push_back(limit_denominator(m[j], 1000000));
    }
    return out;
}

std::vector<double> to_doubles(const AppellPolynomial& w)
{
    std::vector<double> out;
    for (const auto& c : w.coeffs) {
        out.push_back(to_double(c));
    }
    return out;
}

double dot(const std::vector<double>& c, const std::vector<double>& m)
{
    double s = 0;
    for (std::size_t j = 0; j < c.size(); ++j) {
        s += c[j] * m[j];
    }
    return s;
}

/// Jackknife variance of the leave-one-out replicates.
double jackknife_variance(const std::vector<double>& reps)
{
    const double n = static_cast<double>(reps.size());
    if (reps.size() < 2) {
        return 0;
    }
    const double mean = std::accumulate(reps.begin(), reps.end(), 0.0) / n;
    double ss = 0;
    for (double r : reps) {
        ss += (r - mean) * (r - mean);
    }
    return (n - 1) / n * ss;
}

constexpr double se_floor = 1e-9;

} // namespace

void SimConfig::validate() const
{
    if (dsim < 1 || dsim > 3) {
        throw ValidationError(fmt::format("dsim must be 1, 2 or 3, got {}", dsim));
    }
    const double Dsim = dsim + 2;
    if (!(s > 0) || !(s < Dsim / 2)) {
        throw ValidationError(fmt::format("s = {} must lie in (0, {})", s, Dsim / 2));
    }
    if (gridT < 4 || gridX < 4 || gridT % 2 != 0 || gridX % 2 != 0) {
        throw ValidationError("gridT and gridX must be even and at least 4");
    }
    if (!(dt > 0) || !(dx > 0) || !(cutoffRho > 0)) {
        throw ValidationError("dt, dx and cutoffRho must be positive");
    }
}

std::size_t SimConfig::size() const
{
    std::size_t n = static_cast<std::size_t>(gridT);
    for (int i = 0; i < dsim; ++i) {
        n *= static_cast<std::size_t>(gridX);
    }
    return n;
}

std::vector<int> SimConfig::shape() const
{
    std::vector<int> s{gridT};
    for (int i = 0; i < dsim; ++i) {
        s.push_back(gridX);
    }
    return s;
}

double LatticeField::mean() const
{
    return values.empty() ? 0.0 : std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t i)
{
    // splitmix64 of base + i
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (i + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double parabolic_frequency(double q0, double qsp2)
{
    return std::pow(q0 * q0 + qsp2 * qsp2, 0.25);
}

LatticeField synthesize_noise(const SimConfig& cfg, std::uint64_t seed)
{
    cfg.validate();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> white(cfg.size());
    for (auto& v : white) {
        v = normal(rng);
    }
    Spectrum spec = forward(cfg, white);
    const auto amp = amplitudes(cfg);
    for (std::size_t i = 0; i < spec.size(); ++i) {
        spec[i] *= amp[i];
    }
    auto values = inverse(cfg, std::move(spec));
    const double n = static_cast<double>(cfg.size());
    for (auto& v : values) {
        v /= n;
    }
    return LatticeField{std::move(values), cfg, "zeta"};
}

LatticeField solve_linear(const LatticeField& zeta)
{
    const SimConfig& cfg = zeta.cfg;
    cfg.validate();
    if (zeta.values.size() != cfg.size()) {
        throw ValidationError("field size does not match its lattice");
    }
    Spectrum spec = forward(cfg, zeta.values);
    for_each_mode(cfg, [&](const Mode& m) {
        if (m.removed) {
            spec[m.index] = 0;
            return;
        }
        spec[m.index] /= std::complex<double>(m.qsp2, m.q0);
    });
    auto values = inverse(cfg, std::move(spec));
    const double n = static_cast<double>(cfg.size());
    for (auto& v : values) {
        v /= n;
    }
    return LatticeField{std::move(values), cfg, "Z"};
}

double theoretical_variance(const SimConfig& cfg, bool solved)
{
    cfg.validate();
    if (!solved) {
        return 1.0;
    }
    const auto amp = amplitudes(cfg);
    double total = 0;
    for_each_mode(cfg, [&](const Mode& m) {
        if (m.removed) {
            return;
        }
        total += m.weight * amp[m.index] * amp[m.index] / (m.q0 * m.q0 + m.qsp2 * m.qsp2);
    });
    return total / static_cast<double>(cfg.size());
}

SlopeFit fit_spectral_slope(std::span<const LatticeField> fields, int bins)
{
    if (fields.empty()) {
        throw ValidationError("slope fit needs at least one field");
    }
    const SimConfig& cfg = fields.front().cfg;
    double qlow = INFINITY;
    for_each_mode(cfg, [&](const Mode& m) {
        if (!m.removed) {
            qlow = std::min(qlow, parabolic_frequency(m.q0, m.qsp2));
        }
    });
    SlopeFit fit;
    fit.qmin = 2 * qlow;
    fit.qmax = 0.3 / cfg.cutoffRho;
    if (!(fit.qmax > fit.qmin)) {
        throw ValidationError("empty fitting window: lattice too small for the cutoff");
    }
    const double lmin = std::log(fit.qmin);
    const double lmax = std::log(fit.qmax);
    // Modes inside the window, each weighted equally per log-shell so that
    // the densely populated outer shells do not dominate the fit.
    struct Sample {
        std::size_t index;
        double logq;
        double weight;
    };
    std::vector<Sample> samples;
    std::vector<double> shell_count(static_cast<std::size_t>(bins), 0.0);
    std::vector<int> shell_of;
    for_each_mode(cfg, [&](const Mode& m) {
        if (m.removed) {
            return;
        }
        const double lq = std::log(parabolic_frequency(m.q0, m.qsp2));
        if (lq < lmin || lq >= lmax) {
            return;
        }
        const int b = std::min(bins - 1, static_cast<int>((lq - lmin) / (lmax - lmin) * bins));
        samples.push_back(Sample{m.index, lq, m.weight});
        shell_of.push_back(b);
        shell_count[static_cast<std::size_t>(b)] += m.weight;
    });
    int used = 0;
    for (double c : shell_count) {
        used += c > 0 ? 1 : 0;
    }
    if (used < 3) {
        throw ValidationError("too few populated frequency shells for a slope fit");
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
        samples[i].weight /= shell_count[static_cast<std::size_t>(shell_of[i])];
    }
    // power[f][i]: periodogram of field f at sample i
    std::vector<std::vector<double>> power(fields.size());
    const double n = static_cast<double>(cfg.size());
    for (std::size_t f = 0; f < fields.size(); ++f) {
        const Spectrum spec = forward(cfg, fields[f].values);
        power[f].reserve(samples.size());
        for (const auto& smp : samples) {
            power[f].push_back(std::norm(spec[smp.index]) / n);
        }
    }
    // The log of a seed-averaged periodogram has a bias that does not depend
    // on the mode, so it cancels from the slope.
    auto slope_of = [&](std::size_t skip) {
        double sw = 0;
        double sx = 0;
        double sy = 0;
        std::vector<double> y(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            double s = 0;
            double k = 0;
            for (std::size_t f = 0; f < fields.size(); ++f) {
                if (f != skip) {
                    s += power[f][i];
                    k += 1;
                }
            }
            y[i] = std::log(s / k);
            sw += samples[i].weight;
            sx += samples[i].weight * samples[i].logq;
            sy += samples[i].weight * y[i];
        }
        const double mx = sx / sw;
        const double my = sy / sw;
        double sxy = 0;
        double sxx = 0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const double dx = samples[i].logq - mx;
            sxy += samples[i].weight * dx * (y[i] - my);
            sxx += samples[i].weight * dx * dx;
        }
        return sxy / sxx;
    };
    fit.slope = slope_of(SIZE_MAX);
    fit.bins = used;
    if (fields.size() > 1) {
        std::vector<double> reps;
        for (std::size_t f = 0; f < fields.size(); ++f) {
            reps.push_back(slope_of(f));
        }
        fit.stderr_ = std::sqrt(jackknife_variance(reps));
    }
    return fit;
}

MomentEstimate estimate_moments(const LatticeField& field, int K, int blockCount)
{
    if (K < 0 || K > 8) {
        throw ValidationError("moment order must lie in 0..8");
    }
    const SimConfig& cfg = field.cfg;
    if (blockCount < 1 || blockCount > cfg.gridT) {
        throw ValidationError("block count must lie in 1..gridT");
    }
    const std::size_t slab = field.values.size() / static_cast<std::size_t>(cfg.gridT);
    std::vector<std::vector<double>> sums(static_cast<std::size_t>(blockCount),
                                          std::vector<double>(static_cast<std::size_t>(K) + 1, 0.0));
    std::vector<double> counts(static_cast<std::size_t>(blockCount), 0.0);
    for (int t = 0; t < cfg.gridT; ++t) {
        const auto b = static_cast<std::size_t>(static_cast<long>(t) * blockCount / cfg.gridT);
        for (std::size_t i = 0; i < slab; ++i) {
            const double x = field.values[static_cast<std::size_t>(t) * slab + i];
            double p = 1;
            for (int j = 0; j <= K; ++j) {
                sums[b][static_cast<std::size_t>(j)] += p;
                p *= x;
            }
        }
        counts[b] += static_cast<double>(slab);
    }
    MomentEstimate est;
    est.m.assign(static_cast<std::size_t>(K) + 1, 0.0);
    est.se.assign(static_cast<std::size_t>(K) + 1, 0.0);
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    for (int j = 0; j <= K; ++j) {
        double s = 0;
        for (const auto& row : sums) {
            s += row[static_cast<std::size_t>(j)];
        }
        est.m[static_cast<std::size_t>(j)] = s / total;
    }
    if (blockCount >= 2) {
        constexpr int resamples = 200;
        std::mt19937_64 rng(0x5eed);
        std::uniform_int_distribution<int> pick(0, blockCount - 1);
        std::vector<std::vector<double>> reps(static_cast<std::size_t>(K) + 1);
        for (int r = 0; r < resamples; ++r) {
            std::vector<double> s(static_cast<std::size_t>(K) + 1, 0.0);
            double c = 0;
            for (int b = 0; b < blockCount; ++b) {
                const auto chosen = static_cast<std::size_t>(pick(rng));
                for (int j = 0; j <= K; ++j) {
                    s[static_cast<std::size_t>(j)] += sums[chosen][static_cast<std::size_t>(j)];
                }
                c += counts[chosen];
            }
            for (int j = 0; j <= K; ++j) {
                reps[static_cast<std::size_t>(j)].push_back(s[static_cast<std::size_t>(j)] / c);
            }
        }
        for (int j = 0; j <= K; ++j) {
            const auto& v = reps[static_cast<std::size_t>(j)];
            const double mean = std::accumulate(v.begin(), v.end(), 0.0) / resamples;
            double ss = 0;
            for (double x : v) {
                ss += (x - mean) * (x - mean);
            }
            est.se[static_cast<std::size_t>(j)] = std::sqrt(ss / (resamples - 1));
        }
    }
    return est;
}

MomentEstimate estimate_moments_pooled(std::span<const LatticeField> fields, int K, double scale)
{
    if (fields.empty()) {
        throw ValidationError("no fields to pool");
    }
    std::vector<std::vector<double>> rows;
    for (const auto& f : fields) {
        rows.push_back(power_means(f, K, scale));
    }
    MomentEstimate est;
    est.m = average(rows);
    est.se.assign(est.m.size(), 0.0);
    const double n = static_cast<double>(rows.size());
    if (rows.size() > 1) {
        for (std::size_t j = 0; j < est.m.size(); ++j) {
            double ss = 0;
            for (const auto& r : rows) {
                ss += (r[j] - est.m[j]) * (r[j] - est.m[j]);
            }
            est.se[j] = std::sqrt(ss / (n - 1) / n);
        }
    }
    return est;
}

MomentSequence rationalize(const MomentEstimate& est)
{
    return rationalize_values(est.m);
}

CentrednessResult centredness_test(std::span<const LatticeField> group_a, std::span<const LatticeField> group_b,
                                   int k, double scale)
{
    if (group_a.empty() || group_b.empty()) {
        throw ValidationError("centredness test needs two nonempty groups");
    }
    if (k < 1 || k > 8) {
        throw ValidationError("centredness degree must lie in 1..8");
    }
    std::vector<std::vector<double>> ma;
    std::vector<std::vector<double>> mb;
    for (const auto& f : group_a) {
        ma.push_back(power_means(f, k, scale));
    }
    for (const auto& f : group_b) {
        mb.push_back(power_means(f, k, scale));
    }
    auto statistic = [&](std::size_t skip_a, std::size_t skip_b) {
        const auto w = to_doubles(appell_from_moments(rationalize_values(average(ma, skip_a)), k));
        return dot(w, average(mb, skip_b));
    };
    CentrednessResult r;
    r.k = k;
    r.mean = statistic(SIZE_MAX, SIZE_MAX);
    double var = 0;
    const bool same = group_a.data() == group_b.data() && group_a.size() == group_b.size();
    if (same) {
        std::vector<double> reps;
        for (std::size_t i = 0; i < ma.size(); ++i) {
            reps.push_back(statistic(i, i));
        }
        var = jackknife_variance(reps);
    } else {
        std::vector<double> reps_a;
        std::vector<double> reps_b;
        for (std::size_t i = 0; i < ma.size(); ++i) {
            reps_a.push_back(statistic(i, SIZE_MAX));
        }
        for (std::size_t i = 0; i < mb.size(); ++i) {
            reps_b.push_back(statistic(SIZE_MAX, i));
        }
        var = jackknife_variance(reps_a) + jackknife_variance(reps_b);
    }
    r.se = std::max(std::sqrt(var), se_floor);
    r.z = r.mean / r.se;
    return r;
}

std::vector<VarianceScalingRow> variance_scaling_check(std::span<const LatticeField> fields, double alpha,
                                                       const std::vector<double>& eps_list)
{
    if (fields.empty()) {
        throw ValidationError("variance scaling needs at least one field");
    }
    const SimConfig& cfg = fields.front().cfg;
    std::vector<VarianceScalingRow> rows;
    for (double eps : eps_list) {
        if (!(eps > 0) || eps > 1) {
            throw ValidationError(fmt::format("eps = {} must lie in (0, 1]", eps));
        }
        const double inv = 1.0 / eps;
        const long step = std::lround(inv);
        if (std::abs(inv - static_cast<double>(step)) > 1e-12 || (step & (step - 1)) != 0) {
            throw ValidationError(fmt::format("eps = {} is not a dyadic ratio 2^-j", eps));
        }
        const long tstep = step * step;
        if (cfg.gridT % tstep != 0 || cfg.gridX % step != 0) {
            throw ValidationError(fmt::format("eps = {} does not fit the {}x{} lattice", eps, cfg.gridT, cfg.gridX));
        }
        std::vector<double> ratios;
        for (const auto& f : fields) {
            double full = 0;
            double sub = 0;
            std::size_t nsub = 0;
            const auto shape = cfg.shape();
            std::vector<int> idx(shape.size(), 0);
            for (std::size_t lin = 0; lin < f.values.size(); ++lin) {
                const double v = f.values[lin];
                full += v * v;
                bool on = idx[0] % tstep == 0;
                for (std::size_t i = 1; i < idx.size() && on; ++i) {
                    on = idx[i] % step == 0;
                }
                if (on) {
                    sub += v * v;
                    ++nsub;
                }
                for (std::size_t i = idx.size(); i-- > 0;) {
                    if (++idx[i] < shape[i]) {
                        break;
                    }
                    idx[i] = 0;
                }
            }
            full /= static_cast<double>(f.values.size());
            sub /= static_cast<double>(nsub);
            ratios.push_back(sub / full);
        }
        const double n = static_cast<double>(ratios.size());
        const double mean = std::accumulate(ratios.begin(), ratios.end(), 0.0) / n;
        double ss = 0;
        for (double r : ratios) {
            ss += (r - mean) * (r - mean);
        }
        const double factor = std::pow(eps, 2 * alpha);
        VarianceScalingRow row;
        row.eps = eps;
        row.expected = factor;
        row.ratio = factor * mean;
        row.se = ratios.size() > 1 ? factor * std::sqrt(ss / (n - 1) / n) : 0.0;
        row.deviation = row.ratio - row.expected;
        rows.push_back(row);
    }
    return rows;
}

std::vector<HermiteRow> hermite_consistency(std::span<const LatticeField> fields, int kmax, double scale)
{
    if (fields.empty()) {
        throw ValidationError("Hermite consistency needs at least one field");
    }
    std::vector<std::vector<double>> rows;
    for (const auto& f : fields) {
        rows.push_back(power_means(f, kmax, scale));
    }
    auto coefficients = [&](std::size_t skip, int k) {
        const MomentSequence m = rationalize_values(average(rows, skip));
        const auto w = to_doubles(appell_from_moments(m, k));
        const auto h = to_doubles(hermite(k, m.m.at(2)));
        return std::make_pair(w, h);
    };
    std::vector<HermiteRow> out;
    for (int k = 1; k <= kmax; ++k) {
        const auto [w, h] = coefficients(SIZE_MAX, k);
        std::vector<std::vector<double>> reps(static_cast<std::size_t>(k) + 1);
        for (std::size_t i = 0; i < rows.size() && rows.size() > 1; ++i) {
            const auto [wi, hi] = coefficients(i, k);
            for (int j = 0; j <= k; ++j) {
                reps[static_cast<std::size_t>(j)].push_back(wi[static_cast<std::size_t>(j)] - hi[static_cast<std::size_t>(j)]);
            }
        }
        for (int j = 0; j <= k; ++j) {
            HermiteRow r;
            r.k = k;
            r.j = j;
            r.empirical = w[static_cast<std::size_t>(j)];
            r.hermite = h[static_cast<std::size_t>(j)];
            r.se = std::max(std::sqrt(jackknife_variance(reps[static_cast<std::size_t>(j)])), se_floor);
            out.push_back(r);
        }
    }
    return out;
}

SimReport run_simulation(const SimConfig& cfg, const SimOptions& options)
{
    cfg.validate();
    if (options.seeds < 4) {
        throw ValidationError("the statistical suite needs at least 4 seeds");
    }
    if (options.kmax < 1 || options.kmax > 8) {
        throw ValidationError("kmax must lie in 1..8");
    }
    SimReport rep;
    rep.cfg = cfg;
    rep.options = options;
    const auto n = static_cast<std::size_t>(options.seeds);
    rep.zeta.resize(n);
    rep.Z.resize(n);
    parallel_for(options.seeds, options.jobs, [&](int i) {
        const auto idx = static_cast<std::size_t>(i);
        rep.zeta[idx] = synthesize_noise(cfg, derive_seed(cfg.seed, idx));
        rep.Z[idx] = solve_linear(rep.zeta[idx]);
    });
    rep.slope = fit_spectral_slope(rep.zeta);
    rep.variance_theory = theoretical_variance(cfg, true);
    const double scale = 1.0 / std::sqrt(rep.variance_theory);
    rep.variance_empirical = estimate_moments_pooled(rep.Z, 2).m[2];
    rep.moments = estimate_moments_pooled(rep.Z, std::max(4, options.kmax), scale);
    std::span<const LatticeField> all(rep.Z);
    const auto a = all.first(n / 2);
    const auto b = all.subspan(n / 2);
    for (int k = 1; k <= options.kmax; ++k) {
        rep.centredness.push_back(centredness_test(a, b, k, scale));
    }
    rep.same_sample_k3 = centredness_test(a, a, 3, scale);
    rep.variance_scaling = variance_scaling_check(rep.Z, options.alpha, options.eps);
    rep.hermite = hermite_consistency(rep.Z, std::min(4, options.kmax), scale);
    return rep;
}

void dump_field(const LatticeField& f, const std::string& path, const std::string& sidecar_path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError(fmt::format("cannot write {}", path));
    }
    for (double v : f.values) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        if constexpr (std::endian::native == std::endian::big) {
            bits = __builtin_bswap64(bits);
        }
        out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
    nlohmann::ordered_json side;
    side["format"] = "float64-le";
    side["tag"] = f.tag;
    side["shape"] = f.cfg.shape();
    side["dt"] = f.cfg.dt;
    side["dx"] = f.cfg.dx;
    side["dsim"] = f.cfg.dsim;
    side["s"] = f.cfg.s;
    side["cutoffRho"] = f.cfg.cutoffRho;
    side["mean"] = f.mean();
    std::ofstream s(sidecar_path);
    if (!s) {
        throw ValidationError(fmt::format("cannot write {}", sidecar_path));
    }
    s << side.dump(2) << "\n";
}

} // namespace mirs::sim
