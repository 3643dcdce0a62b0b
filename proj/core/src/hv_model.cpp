#include "lgsim/hv_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lgsim {

namespace {

constexpr double kMassTolerance = 1e-12;

bool interval_contains(double lo, double hi, double x) { return lo <= x && x < hi; }

}  // namespace

std::string_view to_string(Region r) {
    switch (r) {
        case Region::a: return "a";
        case Region::b: return "b";
        case Region::c: return "c";
        case Region::d: return "d";
    }
    return "?";
}

std::string_view to_string(Sector s) { return s == Sector::AB ? "AB" : "CD"; }

// ---------------------------------------------------------------------------
// SectorDynamics

SectorDynamics::SectorDynamics(RabiFrequency omega, std::array<SectorState, 2> sectors)
    : omega_(omega), sectors_(sectors) {
    double total = 0.0;
    for (const auto& s : sectors_) {
        if (!(s.mass >= 0.0 && s.mass <= 1.0 + kMassTolerance)) {
            throw std::invalid_argument("sector mass must lie in [0, 1]");
        }
        if (!(s.upper_at_epoch >= 0.0 && s.upper_at_epoch <= 1.0)) {
            throw std::invalid_argument("sector upper fraction must lie in [0, 1]");
        }
        if (!(s.epoch >= 0.0) || !std::isfinite(s.epoch)) {
            throw std::invalid_argument("sector epoch must be finite and >= 0");
        }
        total += s.mass;
    }
    if (std::abs(total - 1.0) > kMassTolerance) {
        throw std::invalid_argument("sector masses must sum to 1");
    }
}

double SectorDynamics::upper_fraction(Sector s, double t) const {
    const SectorState& st = sectors_[index_of(s)];
    if (t == st.epoch) return st.upper_at_epoch;
    const double f =
        0.5 + (st.upper_at_epoch - 0.5) * std::cos(omega_.value() * (t - st.epoch));
    return std::clamp(f, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// MeasurementMap

MeasurementMap::MeasurementMap(const SectorDynamics& before, double t)
    : before_(before), after_(before), time_(t) {
    const SectorState& ab = before.sector(Sector::AB);
    const SectorState& cd = before.sector(Sector::CD);
    const double f_ab = before.upper_fraction(Sector::AB, t);
    const double f_cd = before.upper_fraction(Sector::CD, t);

    const double in_a = ab.mass * f_ab;
    const double in_b = ab.mass * (1.0 - f_ab);
    const double in_c = cd.mass * f_cd;
    const double in_d = cd.mass * (1.0 - f_cd);

    // After the swap: AB holds the old c (upper) and b (lower) trajectories,
    // CD holds the old a (upper) and d (lower) trajectories. Each sector restarts
    // at rest from its post-swap configuration.
    const double ab_mass = in_c + in_b;
    const double cd_mass = in_a + in_d;
    const double ab_upper = ab_mass > 0.0 ? in_c / ab_mass : 1.0;
    const double cd_upper = cd_mass > 0.0 ? in_a / cd_mass : 1.0;

    after_ = SectorDynamics(before.omega(),
                            {SectorState{ab_mass, ab_upper, t}, SectorState{cd_mass, cd_upper, t}});

    auto& from_ab = routes_[index_of(Sector::AB)];
    auto& from_cd = routes_[index_of(Sector::CD)];
    from_ab[0] = Route{Sector::CD, {0.0, f_ab}, {0.0, cd_upper}};  // a -> c
    from_ab[1] = Route{Sector::AB, {f_ab, 1.0}, {ab_upper, 1.0}};  // b stays
    from_cd[0] = Route{Sector::AB, {0.0, f_cd}, {0.0, ab_upper}};  // c -> a
    from_cd[1] = Route{Sector::CD, {f_cd, 1.0}, {cd_upper, 1.0}};  // d stays
}

OnticBead MeasurementMap::apply(const OnticBead& bead) const {
    return apply(bead, is_upper(before_.region_at(bead, time_)) ? RegionClass::upper : RegionClass::lower);
}

OnticBead MeasurementMap::apply(const OnticBead& bead, RegionClass at_measurement) const {
    const Route& route = routes_[index_of(bead.sector)][at_measurement == RegionClass::upper ? 0 : 1];

    const double width = route.from.hi - route.from.lo;
    double s = width > 0.0 ? (bead.rank - route.from.lo) / width : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    double rank = route.onto.lo + s * (route.onto.hi - route.onto.lo);
    if (!interval_contains(route.onto.lo, route.onto.hi, rank)) {
        rank = route.onto.hi > route.onto.lo ? std::nextafter(route.onto.hi, route.onto.lo)
                                             : route.onto.lo;
    }
    return OnticBead{bead.u, route.to, rank, time_};
}

// ---------------------------------------------------------------------------
// OnticEnsemble

OnticEnsemble::OnticEnsemble(SectorDynamics dynamics, std::vector<OnticBead> beads,
                             std::vector<Intervention> history)
    : OnticEnsemble(Unchecked{}, std::move(dynamics), std::move(beads), std::move(history)) {
    if (beads_.empty()) throw std::invalid_argument("an ensemble needs at least one bead");

    std::vector<double> labels;
    labels.reserve(beads_.size());
    for (const auto& b : beads_) {
        if (!(b.u >= 0.0 && b.u < 1.0)) throw std::invalid_argument("bead label outside [0, 1)");
        if (!(b.rank >= 0.0 && b.rank < 1.0)) throw std::invalid_argument("bead rank outside [0, 1)");
        if (!(dynamics_.sector(b.sector).mass > 0.0)) {
            throw std::invalid_argument("bead placed in a sector with zero mass");
        }
        labels.push_back(b.u);
    }
    std::sort(labels.begin(), labels.end());
    if (std::adjacent_find(labels.begin(), labels.end()) != labels.end()) {
        throw std::invalid_argument("bead labels must be distinct");
    }
    for (std::size_t i = 1; i < history_.size(); ++i) {
        if (!(history_[i].time > history_[i - 1].time)) {
            throw std::invalid_argument("intervention history must be strictly increasing in time");
        }
    }
}

OnticEnsemble::OnticEnsemble(Unchecked, SectorDynamics dynamics, std::vector<OnticBead> beads,
                             std::vector<Intervention> history)
    : dynamics_(std::move(dynamics)), beads_(std::move(beads)), history_(std::move(history)) {}

bool OnticEnsemble::has_measurement() const {
    return std::any_of(history_.begin(), history_.end(), [](const Intervention& i) {
        return i.kind == InterventionKind::measurement;
    });
}

void OnticEnsemble::require_not_before_last(double t) const {
    if (t < last_time()) {
        throw std::invalid_argument("time " + std::to_string(t) +
                                    " precedes the last intervention at " +
                                    std::to_string(last_time()));
    }
}

SectorDynamics fresh_dynamics(RabiFrequency omega) {
    return SectorDynamics(omega, {SectorState{1.0, 1.0, 0.0}, SectorState{0.0, 1.0, 0.0}});
}

OnticEnsemble init_ensemble(std::size_t n_beads, RabiFrequency omega) {
    if (n_beads == 0) throw std::invalid_argument("init_ensemble: n_beads must be >= 1");
    std::vector<OnticBead> beads(n_beads);
    const double n = static_cast<double>(n_beads);
    for (std::size_t k = 0; k < n_beads; ++k) {
        const double u = (static_cast<double>(k) + 0.5) / n;
        beads[k] = OnticBead{u, Sector::AB, u, 0.0};
    }
    return OnticEnsemble(OnticEnsemble::Unchecked{}, fresh_dynamics(omega), std::move(beads), {});
}

OnticEnsemble fresh_ensemble_from_labels(std::vector<double> labels, RabiFrequency omega) {
    std::vector<OnticBead> beads;
    beads.reserve(labels.size());
    for (double u : labels) beads.push_back(OnticBead{u, Sector::AB, u, 0.0});
    return OnticEnsemble(fresh_dynamics(omega), std::move(beads), {});
}

// ---------------------------------------------------------------------------
// Operations

OccupationVector occupation(const OnticEnsemble& ens, double t) {
    ens.require_not_before_last(t);
    const SectorDynamics& dyn = ens.dynamics();
    const double m_ab = dyn.sector(Sector::AB).mass;
    const double m_cd = dyn.sector(Sector::CD).mass;
    const double f_ab = dyn.upper_fraction(Sector::AB, t);
    const double f_cd = dyn.upper_fraction(Sector::CD, t);
    return OccupationVector{m_ab * f_ab, m_ab * (1.0 - f_ab), m_cd * f_cd, m_cd * (1.0 - f_cd)};
}

Region bead_region(const OnticBead& bead, const OnticEnsemble& ens, double t) {
    return ens.dynamics().region_at(bead, t);
}

std::pair<double, OnticEnsemble> measure_q(const OnticEnsemble& ens, double t) {
    ens.require_not_before_last(t);
    if (ens.has_measurement()) {
        throw std::logic_error(
            "measure_q: the ensemble was already measured; a second intermediate "
            "measurement is outside the model's validity");
    }
    if (!ens.history().empty() && !(t > ens.last_time())) {
        throw std::invalid_argument("measure_q: interventions must be strictly time-ordered");
    }
    const double value = occupation(ens, t).q_readout();

    const MeasurementMap map(ens.dynamics(), t);
    std::vector<OnticBead> beads;
    beads.reserve(ens.size());
    for (const auto& b : ens.beads()) beads.push_back(map.apply(b));

    auto history = ens.history();
    history.push_back({InterventionKind::measurement, t});
    return {value, OnticEnsemble(OnticEnsemble::Unchecked{}, map.after(), std::move(beads),
                                 std::move(history))};
}

double no_crossing_joint(double p_upper_t1, double p_upper_t2, RegionClass r1, RegionClass r2) {
    const double pa1 = p_upper_t1;
    const double pa2 = p_upper_t2;
    const double pb1 = 1.0 - p_upper_t1;
    const double pb2 = 1.0 - p_upper_t2;
    if (r1 == RegionClass::upper && r2 == RegionClass::upper) return std::min(pa1, pa2);
    if (r1 == RegionClass::upper && r2 == RegionClass::lower) return std::max(pa1 - pa2, 0.0);
    if (r1 == RegionClass::lower && r2 == RegionClass::upper) return std::max(pb1 - pb2, 0.0);
    return std::min(pb1, pb2);
}

double two_time_prob_free(const OnticEnsemble& ens, double t1, double t2,
                          RegionClass r1, RegionClass r2) {
    if (t2 < t1) throw std::invalid_argument("two_time_prob_free: requires t1 <= t2");
    ens.require_not_before_last(t1);
    const SectorDynamics& dyn = ens.dynamics();
    double p = 0.0;
    for (Sector s : {Sector::AB, Sector::CD}) {
        const double mass = dyn.sector(s).mass;
        if (mass == 0.0) continue;
        p += mass * no_crossing_joint(dyn.upper_fraction(s, t1), dyn.upper_fraction(s, t2), r1, r2);
    }
    return p;
}

namespace {

double free_correlator(const OnticEnsemble& ens, double t1, double t2) {
    double e = 0.0;
    for (RegionClass r1 : {RegionClass::upper, RegionClass::lower}) {
        for (RegionClass r2 : {RegionClass::upper, RegionClass::lower}) {
            e += q_value(r1) * q_value(r2) * two_time_prob_free(ens, t1, t2, r1, r2);
        }
    }
    return e;
}

}  // namespace

double correlator_hv(const OnticEnsemble& ens, double t1, double t2, bool with_measurement) {
    if (t2 < t1) throw std::invalid_argument("correlator_hv: requires t1 <= t2");
    if (!with_measurement) return free_correlator(ens, t1, t2);
    const auto measured = measure_q(ens, t1);
    // The swap preserves Q at t1, so q(t1) is read off the conditioned ensemble.
    return free_correlator(measured.second, t1, t2);
}

double correlator_hv(RabiFrequency omega, double t1, double t2, bool with_measurement) {
    return correlator_hv(init_ensemble(1, omega), t1, t2, with_measurement);
}

double bead_correlator(const OnticEnsemble& ens, double t1, double t2, bool with_measurement) {
    if (t2 < t1) throw std::invalid_argument("bead_correlator: requires t1 <= t2");
    ens.require_not_before_last(t1);
    const SectorDynamics& before = ens.dynamics();
    long long sum = 0;
    if (with_measurement) {
        if (ens.has_measurement()) {
            throw std::logic_error("bead_correlator: ensemble already measured");
        }
        const MeasurementMap map(before, t1);
        for (const auto& b : ens.beads()) {
            const int q1 = q_value(before.region_at(b, t1));
            const int q2 = q_value(map.after().region_at(map.apply(b), t2));
            sum += q1 * q2;
        }
    } else {
        for (const auto& b : ens.beads()) {
            sum += q_value(before.region_at(b, t1)) * q_value(before.region_at(b, t2));
        }
    }
    return static_cast<double>(sum) / static_cast<double>(ens.size());
}

double bead_p_state1(const OnticEnsemble& ens, double t) {
    ens.require_not_before_last(t);
    std::size_t upper = 0;
    for (const auto& b : ens.beads()) {
        if (is_upper(ens.dynamics().region_at(b, t))) ++upper;
    }
    return static_cast<double>(upper) / static_cast<double>(ens.size());
}

OnticEnsemble phantom_permutation(const OnticEnsemble& ens, double t) {
    ens.require_not_before_last(t);
    if (!ens.history().empty() && !(t > ens.last_time())) {
        throw std::invalid_argument("phantom_permutation: interventions must be strictly time-ordered");
    }
    std::vector<OnticBead> beads(ens.beads().begin(), ens.beads().end());

    std::array<std::vector<std::size_t>, 4> by_region;
    for (std::size_t i = 0; i < beads.size(); ++i) {
        by_region[static_cast<std::size_t>(ens.dynamics().region_at(beads[i], t))].push_back(i);
    }
    for (auto& idx : by_region) {
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t l, std::size_t r) { return beads[l].rank < beads[r].rank; });
        std::vector<double> labels;
        labels.reserve(idx.size());
        for (std::size_t i : idx) labels.push_back(beads[i].u);
        for (std::size_t j = 0; j < idx.size(); ++j) {
            beads[idx[j]].u = labels[idx.size() - 1 - j];
        }
    }

    auto history = ens.history();
    history.push_back({InterventionKind::phantom_permutation, t});
    return OnticEnsemble(OnticEnsemble::Unchecked{}, ens.dynamics(), std::move(beads),
                         std::move(history));
}

}  // namespace lgsim
