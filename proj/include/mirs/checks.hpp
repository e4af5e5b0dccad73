#pragma once

#include "mirs/noise_sim.hpp"
#include "mirs/recentering.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace mirs {

struct AxiomReport {
    std::string axiom;
    bool passed = true;
    std::size_t cases = 0;
    std::optional<std::string> counterexample;
};

/// Exact model axioms. The polynomial sector is checked on every ordered
/// triple of points for |n|, |m| <= max_degree; the general axioms
/// (multiplicativity, Gamma z_k = z_k, population, triangularity) run on spec
/// when given, else on the polynomial spec between the first two points, over
/// the populated indices of order <= cutoff.
std::vector<AxiomReport> check_model_axioms(const std::vector<Point>& points, int max_degree,
                                            const StructureParams& p, const PiSpec* spec = nullptr,
                                            const Rational& cutoff = Rational(4));

namespace gen {

using Rng = std::mt19937_64;

/// Nonzero p/q with |p| <= 3, 1 <= q <= 3.
Rational small_rational(Rng& rng);
Point random_point(Rng& rng, int d);

/// Population-respecting spec with up to max_entries entries drawn from
/// pool (entries need |n| < |beta|, and [beta] >= 0 or beta polynomial).
PiSpec random_pi_spec(Rng& rng, const std::vector<Multiindex>& pool, const StructureParams& p,
                      int max_entries = 5);
/// dpi entries with |n| < alpha + D/pbar and [beta] >= 0.
DPiSpec random_dpi_spec(Rng& rng, const std::vector<Multiindex>& pool, const StructureParams& p,
                        int max_entries = 3);
/// Up to max_terms terms drawn from pool with small rational coefficients.
FormalSeries random_series(Rng& rng, const std::vector<Multiindex>& pool, int max_terms = 3);
MomentSequence random_moments(Rng& rng, int K);

/// All PolyIndex of arity 1+d with |n| <= max_degree.
std::vector<PolyIndex> polyindices_up_to(int d, int max_degree);

} // namespace gen

struct CheckRow {
    std::string suite;
    std::string property;
    bool passed = true;
    std::size_t cases = 0;
    std::string detail;
};

struct CheckOptions {
    Rational max_order = 6;
    std::uint64_t seed = 0x6d697273;
    int trials = 100;
    int jobs = 1;
    bool with_sim = false;
    sim::SimConfig sim_config;
    sim::SimOptions sim_options;
};

std::vector<CheckRow> multiindex_suite(const StructureParams& p, const CheckOptions& o);
std::vector<CheckRow> series_suite(const StructureParams& p, const CheckOptions& o);
std::vector<CheckRow> gamma_suite(const StructureParams& p, const CheckOptions& o);
std::vector<CheckRow> hierarchy_suite(const StructureParams& p, const CheckOptions& o);
std::vector<CheckRow> appell_suite(const StructureParams& p, const CheckOptions& o);
std::vector<CheckRow> simulation_suite(const CheckOptions& o);

/// Every suite in order; the simulation suite only when o.with_sim.
std::vector<CheckRow> run_all_checks(const StructureParams& p, const CheckOptions& o);

std::string format_check_table(const std::vector<CheckRow>& rows);

} // namespace mirs
