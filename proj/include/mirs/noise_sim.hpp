#pragma once

#include "mirs/appell.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mirs::sim {

/// Periodic space-time lattice of gridT x gridX^dsim points.
struct SimConfig {
    int dsim = 1;
    /// Spectral decay: the noise has spectral density ~ |q|_p^{-2s}.
    double s = 0.25;
    int gridT = 256;
    int gridX = 256;
    double dt = 1.0;
    double dx = 1.0;
    /// Width rho of the spectral cutoff exp(-(rho |q|_p)^4).
    double cutoffRho = 0.5;
    std::uint64_t seed = 20240601;

    /// ValidationError on out-of-range values.
    void validate() const;
    std::size_t size() const;
    /// {gridT, gridX, ..., gridX}
    std::vector<int> shape() const;
};

struct LatticeField {
    std::vector<double> values;
    SimConfig cfg;
    /// "zeta", "Z" or "Zeps"
    std::string tag;

    double mean() const;
};

/// Seed of the i-th field of a run seeded with base.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t i);

/// |q|_p = (q0^2 + |q_sp|^4)^{1/4}
double parabolic_frequency(double q0, double qsp2);

/// Gaussian field with spectral density proportional to
/// exp(-(rho |q|_p)^4) |q|_p^{-2s}, normalised to unit variance. The zero mode
/// and the Nyquist modes are removed, so every realisation has mean zero.
LatticeField synthesize_noise(const SimConfig& cfg, std::uint64_t seed);

/// Stationary periodic solution of (d_t - Laplace) Z = zeta:
/// Z^(q) = zeta^(q) / (i q0 + |q_sp|^2), zero and Nyquist modes set to zero.
LatticeField solve_linear(const LatticeField& zeta);

/// Exact pointwise variance of synthesize_noise (1) or of solve_linear
/// applied to it (solved = true), from the spectrum.
double theoretical_variance(const SimConfig& cfg, bool solved);

struct SlopeFit {
    double slope = 0;
    double stderr_ = 0;
    int bins = 0;
    double qmin = 0;
    double qmax = 0;
};

/// Weighted least-squares slope of the log seed-averaged periodogram against
/// log |q|_p over [2 * lowest |q|_p, 0.3 / rho]; modes are weighted so that
/// every log-shell counts once. Standard error by jackknife over fields.
SlopeFit fit_spectral_slope(std::span<const LatticeField> fields, int bins = 16);

struct MomentEstimate {
    std::vector<double> m;
    std::vector<double> se;
};

/// m_j = mean of x^j for j = 0..K, with block-bootstrap standard errors over
/// blockCount contiguous time slabs.
MomentEstimate estimate_moments(const LatticeField& field, int K, int blockCount = 16);

/// Moments averaged over independent fields, standard errors from the spread
/// between fields. Values are multiplied by scale first.
MomentEstimate estimate_moments_pooled(std::span<const LatticeField> fields, int K, double scale = 1.0);

/// Rounds estimated moments to rationals with denominator <= 10^6 and pins m_0 = 1.
MomentSequence rationalize(const MomentEstimate& est);

struct CentrednessResult {
    int k = 0;
    double mean = 0;
    double se = 0;
    double z = 0;
};

/// W_k from the pooled moments of group_a, averaged over group_b; the
/// standard error is a grouped jackknife over the fields of both groups.
/// Values are multiplied by scale first (the identity is scale invariant).
CentrednessResult centredness_test(std::span<const LatticeField> group_a, std::span<const LatticeField> group_b,
                                   int k, double scale = 1.0);

struct VarianceScalingRow {
    double eps = 1;
    double ratio = 1;
    double expected = 1;
    double se = 0;
    double deviation = 0;
};

/// For dyadic eps = 2^{-j}: Z_eps(x) = eps^alpha Z(x0/eps^2, x/eps) read off
/// by subsampling every 4^j-th time and 2^j-th space point. Reports
/// eps^{2 alpha} Var(subsample)/Var(full) averaged over fields.
std::vector<VarianceScalingRow> variance_scaling_check(std::span<const LatticeField> fields, double alpha,
                                                       const std::vector<double>& eps_list);

struct HermiteRow {
    int k = 0;
    int j = 0;
    double empirical = 0;
    double hermite = 0;
    double se = 0;
};

/// Coefficients of W_k built from the pooled moments against those of
/// hermite(k, m2), with jackknife errors over fields.
std::vector<HermiteRow> hermite_consistency(std::span<const LatticeField> fields, int kmax, double scale = 1.0);

struct SimOptions {
    int seeds = 32;
    double alpha = -0.55;
    std::vector<double> eps = {1.0, 0.5, 0.25};
    int kmax = 5;
    int blocks = 16;
    int jobs = 1;
};

struct SimReport {
    SimConfig cfg;
    SimOptions options;
    SlopeFit slope;
    MomentEstimate moments;
    std::vector<CentrednessResult> centredness;
    CentrednessResult same_sample_k3;
    std::vector<VarianceScalingRow> variance_scaling;
    std::vector<HermiteRow> hermite;
    double variance_theory = 0;
    double variance_empirical = 0;
    std::vector<LatticeField> zeta;
    std::vector<LatticeField> Z;
};

/// Runs the whole statistical suite; keeps the generated fields.
SimReport run_simulation(const SimConfig& cfg, const SimOptions& options);

/// Raw little-endian float64 values at path, with a JSON sidecar at sidecar_path.
void dump_field(const LatticeField& f, const std::string& path, const std::string& sidecar_path);

} // namespace mirs::sim
