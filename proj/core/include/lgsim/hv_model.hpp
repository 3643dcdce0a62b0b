// hv_model.hpp
// Four-region realist "abacus" model of a two-level system.
//
// The ontic state space has regions a, b, c, d grouped into two sectors
// (AB and CD). Free evolution moves trajectories between the upper (a, c)
// and lower (b, d) region of a sector; a measurement reads out
// (psi_a + psi_c) - (psi_b + psi_d) and swaps the trajectories in a with those in c.
//
// Trajectories are beads with a fixed intra-sector rank. A bead sits in the
// upper region of its sector at time t iff rank < f(t), where f(t) is the
// sector's upper-region fraction. Beads therefore never cross or coalesce.

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "lgsim/quantum_core.hpp"

namespace lgsim {

enum class Region { a, b, c, d };
enum class Sector { AB = 0, CD = 1 };

/// Upper regions (a, c) correspond to quantum state 1, lower regions (b, d) to state 2.
enum class RegionClass { upper, lower };

constexpr bool is_upper(Region r) { return r == Region::a || r == Region::c; }
constexpr int q_value(Region r) { return is_upper(r) ? +1 : -1; }
constexpr int q_value(RegionClass rc) { return rc == RegionClass::upper ? +1 : -1; }
constexpr std::size_t index_of(Sector s) { return static_cast<std::size_t>(s); }
constexpr Region region_of(Sector s, RegionClass rc) {
    if (s == Sector::AB) return rc == RegionClass::upper ? Region::a : Region::b;
    return rc == RegionClass::upper ? Region::c : Region::d;
}
std::string_view to_string(Region r);
std::string_view to_string(Sector s);

/// One trajectory: label u, sector, intra-sector order coordinate and
/// the time of its sector's last phase reset.
struct OnticBead {
    double u = 0.0;
    Sector sector = Sector::AB;
    double rank = 0.0;
    double epoch = 0.0;
};

/// Closed-form state of one sector between interventions: the sector holds
/// `mass` of the probability and its upper-region fraction solves
/// f'' = -omega^2 (f - 1/2) with f(epoch) = upper_at_epoch and f'(epoch) = 0.
struct SectorState {
    double mass = 0.0;
    double upper_at_epoch = 1.0;
    double epoch = 0.0;
};

/// Analytic part of an ensemble: both sectors plus the driving frequency.
class SectorDynamics {
public:
    SectorDynamics(RabiFrequency omega, std::array<SectorState, 2> sectors);

    RabiFrequency omega() const { return omega_; }
    const SectorState& sector(Sector s) const { return sectors_[index_of(s)]; }
    const std::array<SectorState, 2>& sectors() const { return sectors_; }

    /// Fraction of the sector's trajectories in its upper region at t.
    double upper_fraction(Sector s, double t) const;

    Region region_at(const OnticBead& bead, double t) const {
        const RegionClass rc =
            bead.rank < upper_fraction(bead.sector, t) ? RegionClass::upper : RegionClass::lower;
        return region_of(bead.sector, rc);
    }

private:
    RabiFrequency omega_;
    std::array<SectorState, 2> sectors_;
};

/// Effect of a measurement at a given time: post-measurement sector states
/// and the bead map that performs the a <-> c swap with rank re-anchoring.
class MeasurementMap {
public:
    MeasurementMap(const SectorDynamics& before, double t);

    const SectorDynamics& after() const { return after_; }
    double time() const { return time_; }

    /// Moves a bead according to its region at the measurement time.
    /// Relative order among beads that share a destination is preserved.
    OnticBead apply(const OnticBead& bead) const;
    /// Same, with the bead's region class at the measurement time already known.
    OnticBead apply(const OnticBead& bead, RegionClass at_measurement) const;

private:
    struct Interval {
        double lo = 0.0;
        double hi = 0.0;
    };
    struct Route {
        Sector to = Sector::AB;
        Interval from;
        Interval onto;
    };

    // routes_[sector][0 = upper, 1 = lower]
    std::array<std::array<Route, 2>, 2> routes_{};
    SectorDynamics before_;
    SectorDynamics after_;
    double time_;
};

enum class InterventionKind { measurement, phantom_permutation };

struct Intervention {
    InterventionKind kind;
    double time;
};

struct OccupationVector {
    double psi_a = 0.0;
    double psi_b = 0.0;
    double psi_c = 0.0;
    double psi_d = 0.0;

    double sum() const { return psi_a + psi_b + psi_c + psi_d; }
    /// Probability of quantum state 1: psi_a + psi_c.
    double p_state1() const { return psi_a + psi_c; }
    /// Measured value (psi_a + psi_c) - (psi_b + psi_d).
    double q_readout() const { return (psi_a + psi_c) - (psi_b + psi_d); }
};

/// A finite ordered collection of beads together with the analytic sector
/// state and the list of interventions that conditioned it. Immutable.
class OnticEnsemble {
public:
    /// Validates: N >= 1, distinct labels, ranks in [0,1), bead sectors carry
    /// mass, sector masses sum to 1, strictly increasing history.
    OnticEnsemble(SectorDynamics dynamics, std::vector<OnticBead> beads,
                  std::vector<Intervention> history = {});

    const SectorDynamics& dynamics() const { return dynamics_; }
    RabiFrequency omega() const { return dynamics_.omega(); }
    std::span<const OnticBead> beads() const { return beads_; }
    std::size_t size() const { return beads_.size(); }
    const std::vector<Intervention>& history() const { return history_; }

    /// Time of the last intervention, 0 for a fresh ensemble.
    double last_time() const { return history_.empty() ? 0.0 : history_.back().time; }
    bool has_measurement() const;

    /// Throws std::invalid_argument if t precedes the last intervention.
    void require_not_before_last(double t) const;

private:
    struct Unchecked {};
    OnticEnsemble(Unchecked, SectorDynamics dynamics, std::vector<OnticBead> beads,
                  std::vector<Intervention> history);

    friend std::pair<double, OnticEnsemble> measure_q(const OnticEnsemble&, double);
    friend OnticEnsemble phantom_permutation(const OnticEnsemble&, double);
    friend OnticEnsemble init_ensemble(std::size_t, RabiFrequency);
    friend OnticEnsemble fresh_ensemble_from_labels(std::vector<double>, RabiFrequency);

    SectorDynamics dynamics_;
    std::vector<OnticBead> beads_;
    std::vector<Intervention> history_;
};

/// Sector dynamics of the prepared state: all mass in AB, all of it in a, at rest.
SectorDynamics fresh_dynamics(RabiFrequency omega);

/// Stratified fresh ensemble: u_k = rank_k = (k + 1/2) / N, all in region a.
/// Throws std::invalid_argument for n_beads = 0.
OnticEnsemble init_ensemble(std::size_t n_beads, RabiFrequency omega);

/// Fresh ensemble with caller-supplied labels (rank = u). Labels must be
/// distinct and lie in [0, 1).
OnticEnsemble fresh_ensemble_from_labels(std::vector<double> labels, RabiFrequency omega);

/// Analytic region occupations at t >= last intervention.
OccupationVector occupation(const OnticEnsemble& ens, double t);

/// Region of one bead at t; the bead is interpreted under `ens`'s sector state.
Region bead_region(const OnticBead& bead, const OnticEnsemble& ens, double t);

/// Reads out Q at t and applies the a <-> c swap. Returns the readout value
/// and the conditioned ensemble. The model is valid for a single intermediate
/// measurement, so an ensemble that has already been measured is rejected.
std::pair<double, OnticEnsemble> measure_q(const OnticEnsemble& ens, double t);

/// No-crossing joint probabilities for one sector whose upper fraction is
/// p_upper_t1 at the earlier time and p_upper_t2 at the later one.
double no_crossing_joint(double p_upper_t1, double p_upper_t2, RegionClass r1, RegionClass r2);

/// Two-time region-class probability under free evolution (no measurement
/// between t1 and t2). For a single occupied sector this is exactly the
/// min/max form evaluated on the endpoint occupations; with both sectors
/// occupied each sector contributes its own mass-weighted term.
double two_time_prob_free(const OnticEnsemble& ens, double t1, double t2,
                          RegionClass r1, RegionClass r2);

/// Analytic <Q(t2) Q(t1)>. With measurement, Q is measured at t1 (swap applied)
/// and read out at t2; without, the free no-crossing joint law is used.
double correlator_hv(const OnticEnsemble& ens, double t1, double t2, bool with_measurement);

/// Same, on a freshly prepared ensemble.
double correlator_hv(RabiFrequency omega, double t1, double t2, bool with_measurement);

/// Bead-level average of q(t1) q(t2) over the ensemble, applying a measurement
/// at t1 first when requested.
double bead_correlator(const OnticEnsemble& ens, double t1, double t2, bool with_measurement);

/// Bead-level fraction of beads in an upper region at t.
double bead_p_state1(const OnticEnsemble& ens, double t);

/// Reverses the order of bead labels inside every region occupied at t while
/// leaving sectors, ranks and epochs untouched. Every observable is unchanged;
/// the label -> trajectory assignment is not.
OnticEnsemble phantom_permutation(const OnticEnsemble& ens, double t);

}  // namespace lgsim
