// lg_analysis.hpp
// Leggett-Garg assembly, bound checks for non-invasive realist ensembles, and
// invasiveness / detectability reports for interventions on the bead model.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lgsim/ensemble_mc.hpp"
#include "lgsim/hv_model.hpp"
#include "lgsim/quantum_core.hpp"

namespace lgsim {

/// Violation tolerance for analytic sources.
inline constexpr double kViolationTolerance = 1e-9;
/// Number of standard errors allowed for statistical sources.
inline constexpr double kStdErrorMultiplier = 4.0;

/// The four two-time correlators E(t1,t2), E(t2,t3), E(t3,t4), E(t1,t4).
struct CorrelatorSet {
    double e12 = 0.0;
    double e23 = 0.0;
    double e34 = 0.0;
    double e14 = 0.0;
    /// Standard errors in the same order; absent for analytic sources.
    std::optional<std::array<double, 4>> std_errors;

    std::array<double, 4> values() const { return {e12, e23, e34, e14}; }

    /// Throws std::invalid_argument if an entry leaves [-1 - eps, 1 + eps],
    /// eps = 4 std_error (statistical) or 1e-12 (analytic).
    void validate() const;
};

struct LGResult {
    double l_value = 0.0;
    bool violated = false;
    /// |l_value| - 2 when positive, else 0.
    double margin = 0.0;
    double tolerance = kViolationTolerance;
};

/// L = e12 + e23 + e34 - e14; violated iff |L| > 2 + tol, where tol is 1e-9
/// for analytic sets and 4 * sqrt(sum se^2) for statistical ones.
LGResult lg_quantity(const CorrelatorSet& c);

enum class Source { quantum, hv_analytic, hv_mc };

std::string_view to_string(Source s);

struct McParams {
    std::size_t n_beads = 100000;
    std::uint64_t seed = 42;
    unsigned workers = 1;
};

struct ScanPoint {
    double t = 0.0;
    CorrelatorSet correlators;
    LGResult lg;
};

/// Correlators for the equally spaced protocol t, 2t, 3t, 4t. Each correlator
/// is taken on a fresh preparation; `with_measurement` only affects the bead
/// model (the quantum source always measures).
CorrelatorSet protocol_correlators(RabiFrequency omega, double t, Source source,
                                   bool with_measurement, const McParams& mc = {},
                                   std::uint64_t point_index = 0);

/// Evaluates `protocol_correlators` and `lg_quantity` at every t > 0 of the grid.
std::vector<ScanPoint> lg_scan(RabiFrequency omega, std::span<const double> t_grid, Source source,
                               bool with_measurement, const McParams& mc = {});

/// n_points equally spaced values from t_min to t_max inclusive.
std::vector<double> linear_grid(double t_min, double t_max, std::size_t n_points);

/// A realist ensemble that does not depend on which measurements are made:
/// weights over members, each with fixed values Q(lambda, t_i) in {-1, +1}.
class GenericRealistEnsemble {
public:
    using QRow = std::array<int, 4>;

    /// Validates: nonnegative weights summing to 1 (1e-12), entries +-1, equal sizes.
    GenericRealistEnsemble(std::vector<double> weights, std::vector<QRow> q_table);

    const std::vector<double>& weights() const { return weights_; }
    const std::vector<QRow>& q_table() const { return q_table_; }

    /// sum_k w_k Q_k(t_i) Q_k(t_j); times indexed 0..3.
    double correlator(std::size_t i, std::size_t j) const;
    CorrelatorSet correlators() const;

private:
    std::vector<double> weights_;
    std::vector<QRow> q_table_;
};

struct GenericBoundCheck {
    LGResult lg;
    /// |e12 - e14| <= 2 + (e23 + e34)
    bool plus_variant_holds = false;
    /// |e12 - e14| <= 2 - (e23 + e34)
    bool minus_variant_holds = false;

    bool all_hold() const { return plus_variant_holds && minus_variant_holds && !lg.violated; }
};

/// Two-sided triangle-inequality bound and |L| <= 2 for a non-invasive ensemble.
GenericBoundCheck check_lg_bound_generic(const GenericRealistEnsemble& ens);

/// All 16 deterministic single-member ensembles, in binary order of (Q1..Q4).
std::vector<GenericRealistEnsemble::QRow> deterministic_q_tables();

enum class InterventionChoice { none, measure_q, phantom_permutation };
enum class Classification { non_invasive, invasive_detectable, invasive_undetectable };

std::string_view to_string(InterventionChoice i);
std::string_view to_string(Classification c);

struct InvasivenessReport {
    InterventionChoice intervention = InterventionChoice::none;
    double t0 = 0.0;
    std::size_t n_beads = 0;
    /// Fraction of labels whose abacus position (region and order within the
    /// region) at t0 differs between the intervened and untouched ensembles.
    double ontic_distance = 0.0;
    /// Largest deviation of p(1,t) and of two-time correlators over the probe set.
    double observable_distance = 0.0;
    Classification classification = Classification::non_invasive;
    double ontic_tolerance = 0.0;
    double probe_tolerance = kAnalyticTolerance;
    /// The ontic notions above are meaningful only relative to a hidden-variable
    /// theory; the report is scoped to the bead model.
    std::string model_scope = "four-region no-crossing bead model";
};

/// Compares a stratified n-bead preparation with the same preparation
/// subjected to `intervention` at t0, probing p(1,t) at every probe time and
/// E(ti,tj) for every ordered pair of probe times. Throws std::invalid_argument
/// for an empty probe set or a probe time not after t0.
InvasivenessReport invasiveness_report(InterventionChoice intervention, double t0,
                                       std::span<const double> probe_times, std::size_t n,
                                       RabiFrequency omega);

/// Fraction of labels whose (region, order-within-region) at t differs.
double ontic_distance(const OnticEnsemble& reference, const OnticEnsemble& other, double t);

}  // namespace lgsim
