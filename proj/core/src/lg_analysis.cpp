#include "lgsim/lg_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <cstdint>

namespace lgsim {

void CorrelatorSet::validate() const {
    const auto v = values();
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double eps = std_errors ? kStdErrorMultiplier * (*std_errors)[k] : kAnalyticTolerance;
        if (std_errors && !((*std_errors)[k] >= 0.0)) {
            throw std::invalid_argument("CorrelatorSet: negative standard error");
        }
        if (!(v[k] >= -1.0 - eps && v[k] <= 1.0 + eps)) {
            throw std::invalid_argument("CorrelatorSet: correlator outside [-1, 1]");
        }
    }
}

LGResult lg_quantity(const CorrelatorSet& c) {
    LGResult r;
    r.l_value = c.e12 + c.e23 + c.e34 - c.e14;
    if (c.std_errors) {
        double var = 0.0;
        for (double se : *c.std_errors) var += se * se;
        r.tolerance = kStdErrorMultiplier * std::sqrt(var);
    } else {
        r.tolerance = kViolationTolerance;
    }
    r.violated = std::abs(r.l_value) > 2.0 + r.tolerance;
    r.margin = std::max(std::abs(r.l_value) - 2.0, 0.0);
    return r;
}

std::string_view to_string(Source s) {
    switch (s) {
        case Source::quantum: return "quantum";
        case Source::hv_analytic: return "hv-analytic";
        case Source::hv_mc: return "hv-mc";
    }
    return "?";
}

CorrelatorSet protocol_correlators(RabiFrequency omega, double t, Source source,
                                   bool with_measurement, const McParams& mc,
                                   std::uint64_t point_index) {
    if (!(t > 0.0)) throw std::invalid_argument("protocol time step must be > 0");
    const std::array<std::pair<double, double>, 4> pairs{
        {{t, 2 * t}, {2 * t, 3 * t}, {3 * t, 4 * t}, {t, 4 * t}}};

    CorrelatorSet c;
    std::array<double, 4> e{};
    switch (source) {
        case Source::quantum: {
            const QubitState psi0 = QubitState::ground();
            for (std::size_t k = 0; k < 4; ++k) {
                e[k] = correlator(psi0, omega, pairs[k].first, pairs[k].second);
            }
            break;
        }
        case Source::hv_analytic: {
            for (std::size_t k = 0; k < 4; ++k) {
                e[k] = correlator_hv(omega, pairs[k].first, pairs[k].second, with_measurement);
            }
            break;
        }
        case Source::hv_mc: {
            const SeededSampler root(mc.seed);
            std::array<double, 4> se{};
            for (std::size_t k = 0; k < 4; ++k) {
                const auto est = estimate_correlator(root.substream(4 * point_index + k), mc.n_beads,
                                                     omega, pairs[k].first, pairs[k].second,
                                                     with_measurement, mc.workers);
                e[k] = est.mean;
                se[k] = est.std_error;
            }
            c.std_errors = se;
            break;
        }
    }
    c.e12 = e[0];
    c.e23 = e[1];
    c.e34 = e[2];
    c.e14 = e[3];
    return c;
}

std::vector<ScanPoint> lg_scan(RabiFrequency omega, std::span<const double> t_grid, Source source,
                               bool with_measurement, const McParams& mc) {
    for (double t : t_grid) {
        if (!(t > 0.0)) throw std::invalid_argument("lg_scan: grid times must be > 0");
    }
    std::vector<ScanPoint> out(t_grid.size());
    auto eval = [&](std::size_t i, const McParams& params) {
        ScanPoint p;
        p.t = t_grid[i];
        p.correlators = protocol_correlators(omega, p.t, source, with_measurement, params, i);
        p.lg = lg_quantity(p.correlators);
        out[i] = p;
    };

    const std::size_t workers = std::min<std::size_t>(std::max(mc.workers, 1u), t_grid.size());
    if (source != Source::hv_mc || workers <= 1) {
        for (std::size_t i = 0; i < t_grid.size(); ++i) eval(i, mc);
        return out;
    }
    // One grid slice per worker; each estimate runs serially inside its slice.
    McParams serial = mc;
    serial.workers = 1;
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            for (std::size_t i = w; i < t_grid.size(); i += workers) eval(i, serial);
        });
    }
    for (auto& th : threads) th.join();
    return out;
}

std::vector<double> linear_grid(double t_min, double t_max, std::size_t n_points) {
    if (n_points < 2) throw std::invalid_argument("linear_grid: need at least 2 points");
    if (!(t_max > t_min)) throw std::invalid_argument("linear_grid: t_max must exceed t_min");
    std::vector<double> grid(n_points);
    const double step = (t_max - t_min) / static_cast<double>(n_points - 1);
    for (std::size_t i = 0; i < n_points; ++i) grid[i] = t_min + step * static_cast<double>(i);
    grid.back() = t_max;
    return grid;
}

// ---------------------------------------------------------------------------
// Generic realist ensembles

GenericRealistEnsemble::GenericRealistEnsemble(std::vector<double> weights,
                                               std::vector<QRow> q_table)
    : weights_(std::move(weights)), q_table_(std::move(q_table)) {
    if (weights_.empty() || weights_.size() != q_table_.size()) {
        throw std::invalid_argument("GenericRealistEnsemble: weights and q_table sizes differ");
    }
    double total = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0)) throw std::invalid_argument("GenericRealistEnsemble: negative weight");
        total += w;
    }
    if (std::abs(total - 1.0) > kAnalyticTolerance) {
        throw std::invalid_argument("GenericRealistEnsemble: weights must sum to 1");
    }
    for (const auto& row : q_table_) {
        for (int q : row) {
            if (q != 1 && q != -1) throw std::invalid_argument("GenericRealistEnsemble: Q must be +-1");
        }
    }
}

double GenericRealistEnsemble::correlator(std::size_t i, std::size_t j) const {
    if (i >= 4 || j >= 4) throw std::out_of_range("GenericRealistEnsemble: time index");
    double e = 0.0;
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        e += weights_[k] * q_table_[k][i] * q_table_[k][j];
    }
    return e;
}

CorrelatorSet GenericRealistEnsemble::correlators() const {
    CorrelatorSet c;
    c.e12 = correlator(0, 1);
    c.e23 = correlator(1, 2);
    c.e34 = correlator(2, 3);
    c.e14 = correlator(0, 3);
    return c;
}

GenericBoundCheck check_lg_bound_generic(const GenericRealistEnsemble& ens) {
    const CorrelatorSet c = ens.correlators();
    GenericBoundCheck out;
    out.lg = lg_quantity(c);
    const double lhs = std::abs(c.e12 - c.e14);
    const double inner = c.e23 + c.e34;
    out.plus_variant_holds = lhs <= 2.0 + inner + kViolationTolerance;
    out.minus_variant_holds = lhs <= 2.0 - inner + kViolationTolerance;
    return out;
}

std::vector<GenericRealistEnsemble::QRow> deterministic_q_tables() {
    std::vector<GenericRealistEnsemble::QRow> tables;
    for (unsigned bits = 0; bits < 16; ++bits) {
        GenericRealistEnsemble::QRow row{};
        for (unsigned i = 0; i < 4; ++i) row[i] = (bits >> (3 - i)) & 1u ? -1 : 1;
        tables.push_back(row);
    }
    return tables;
}

// ---------------------------------------------------------------------------
// Invasiveness

std::string_view to_string(InterventionChoice i) {
    switch (i) {
        case InterventionChoice::none: return "none";
        case InterventionChoice::measure_q: return "measure";
        case InterventionChoice::phantom_permutation: return "phantom";
    }
    return "?";
}

std::string_view to_string(Classification c) {
    switch (c) {
        case Classification::non_invasive: return "non-invasive";
        case Classification::invasive_detectable: return "invasive-detectable";
        case Classification::invasive_undetectable: return "invasive-undetectable";
    }
    return "?";
}

namespace {

struct AbacusPosition {
    double u;
    Region region;
    std::size_t order;

    bool same_place(const AbacusPosition& o) const { return region == o.region && order == o.order; }
};

// (label, region, index within region by rank) for every bead, sorted by label.
std::vector<AbacusPosition> abacus_positions(const OnticEnsemble& ens, double t) {
    const auto beads = ens.beads();
    std::array<std::vector<std::size_t>, 4> by_region;
    for (std::size_t i = 0; i < beads.size(); ++i) {
        by_region[static_cast<std::size_t>(bead_region(beads[i], ens, t))].push_back(i);
    }
    std::vector<AbacusPosition> pos;
    pos.reserve(beads.size());
    for (std::size_t r = 0; r < by_region.size(); ++r) {
        auto& idx = by_region[r];
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return beads[a].rank < beads[b].rank; });
        for (std::size_t j = 0; j < idx.size(); ++j) {
            pos.push_back({beads[idx[j]].u, static_cast<Region>(r), j});
        }
    }
    std::sort(pos.begin(), pos.end(),
              [](const AbacusPosition& a, const AbacusPosition& b) { return a.u < b.u; });
    return pos;
}

// q(t) of every bead at every probe time, probe-major.
std::vector<std::int8_t> q_matrix(const OnticEnsemble& ens, std::span<const double> probes) {
    std::vector<std::int8_t> q(probes.size() * ens.size());
    const auto beads = ens.beads();
    for (std::size_t i = 0; i < probes.size(); ++i) {
        for (std::size_t k = 0; k < beads.size(); ++k) {
            q[i * beads.size() + k] = static_cast<std::int8_t>(q_value(bead_region(beads[k], ens, probes[i])));
        }
    }
    return q;
}

}  // namespace

double ontic_distance(const OnticEnsemble& reference, const OnticEnsemble& other, double t) {
    const auto ref = abacus_positions(reference, t);
    const auto oth = abacus_positions(other, t);
    if (ref.size() != oth.size()) throw std::invalid_argument("ontic_distance: ensemble sizes differ");
    std::size_t moved = 0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        if (ref[i].u != oth[i].u) throw std::invalid_argument("ontic_distance: label sets differ");
        if (!ref[i].same_place(oth[i])) ++moved;
    }
    return static_cast<double>(moved) / static_cast<double>(ref.size());
}

InvasivenessReport invasiveness_report(InterventionChoice intervention, double t0,
                                       std::span<const double> probe_times, std::size_t n,
                                       RabiFrequency omega) {
    if (probe_times.empty()) throw std::invalid_argument("invasiveness_report: empty probe set");
    if (!(t0 >= 0.0)) throw std::invalid_argument("invasiveness_report: t0 must be >= 0");
    std::vector<double> probes(probe_times.begin(), probe_times.end());
    std::sort(probes.begin(), probes.end());
    if (!(probes.front() > t0)) {
        throw std::invalid_argument("invasiveness_report: probe times must be after t0");
    }

    const OnticEnsemble reference = init_ensemble(n, omega);
    const OnticEnsemble other = [&] {
        switch (intervention) {
            case InterventionChoice::measure_q: return measure_q(reference, t0).second;
            case InterventionChoice::phantom_permutation: return phantom_permutation(reference, t0);
            case InterventionChoice::none: break;
        }
        return reference;
    }();

    InvasivenessReport rep;
    rep.intervention = intervention;
    rep.t0 = t0;
    rep.n_beads = n;
    rep.ontic_distance = ontic_distance(reference, other, t0);

    const auto q_ref = q_matrix(reference, probes);
    const auto q_oth = q_matrix(other, probes);
    const std::size_t beads = reference.size();
    const double inv_n = 1.0 / static_cast<double>(beads);

    double obs = 0.0;
    for (std::size_t i = 0; i < probes.size(); ++i) {
        const std::int8_t* ri = &q_ref[i * beads];
        const std::int8_t* oi = &q_oth[i * beads];
        long long up_ref = 0, up_oth = 0;
        for (std::size_t k = 0; k < beads; ++k) {
            up_ref += ri[k] > 0;
            up_oth += oi[k] > 0;
        }
        obs = std::max(obs, std::abs(static_cast<double>(up_ref - up_oth)) * inv_n);
        for (std::size_t j = i + 1; j < probes.size(); ++j) {
            const std::int8_t* rj = &q_ref[j * beads];
            const std::int8_t* oj = &q_oth[j * beads];
            long long sum_ref = 0, sum_oth = 0;
            for (std::size_t k = 0; k < beads; ++k) {
                sum_ref += ri[k] * rj[k];
                sum_oth += oi[k] * oj[k];
            }
            obs = std::max(obs, std::abs(static_cast<double>(sum_ref - sum_oth)) * inv_n);
        }
    }
    rep.observable_distance = obs;

    if (rep.observable_distance > rep.probe_tolerance) {
        rep.classification = Classification::invasive_detectable;
    } else if (rep.ontic_distance > rep.ontic_tolerance) {
        rep.classification = Classification::invasive_undetectable;
    } else {
        rep.classification = Classification::non_invasive;
    }
    return rep;
}

}  // namespace lgsim
