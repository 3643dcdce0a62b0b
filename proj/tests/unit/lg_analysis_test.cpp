#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "lgsim/lg_analysis.hpp"
#include "test_util.hpp"

using namespace lgsim;
using lgsim::test::kPi;
using lgsim::test::near;

namespace {

const RabiFrequency kOmega(1.0);

CorrelatorSet analytic(double e12, double e23, double e34, double e14) {
    CorrelatorSet c;
    c.e12 = e12;
    c.e23 = e23;
    c.e34 = e34;
    c.e14 = e14;
    return c;
}

GenericRealistEnsemble random_ensemble(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> members(1, 12);
    std::exponential_distribution<double> w;
    std::bernoulli_distribution coin;
    const int m = members(rng);
    std::vector<double> weights(m);
    double total = 0.0;
    for (auto& x : weights) total += (x = w(rng));
    for (auto& x : weights) x /= total;
    std::vector<GenericRealistEnsemble::QRow> table(m);
    for (auto& row : table)
        for (int& q : row) q = coin(rng) ? 1 : -1;
    return {weights, table};
}

}  // namespace

TEST_CASE("lg_quantity examples") {
    const auto q = protocol_correlators(kOmega, kPi / 4, Source::quantum, true);
    const auto r = lg_quantity(q);
    CHECK(near(r.l_value, 2 * std::sqrt(2.0), 1e-12));
    CHECK(r.violated);
    CHECK(near(r.margin, 2 * std::sqrt(2.0) - 2, 1e-12));

    const auto ones = lg_quantity(analytic(1, 1, 1, 1));
    CHECK(ones.l_value == 2.0);
    CHECK_FALSE(ones.violated);
    CHECK(ones.margin == 0.0);

    CHECK(lg_quantity(analytic(-1, -1, -1, 1)).l_value == -4.0);
    CHECK(lg_quantity(analytic(-1, -1, -1, 1)).violated);
}

TEST_CASE("lg_quantity uses the combined statistical tolerance") {
    CorrelatorSet c = analytic(0.8, 0.8, 0.8, 0.39);
    CHECK(lg_quantity(c).violated);  // 2.01 > 2 + 1e-9
    c.std_errors = std::array<double, 4>{0.01, 0.01, 0.01, 0.01};
    const auto r = lg_quantity(c);
    CHECK(near(r.tolerance, 4.0 * 0.02, 1e-15));
    CHECK_FALSE(r.violated);
}

TEST_CASE("CorrelatorSet::validate") {
    CHECK_NOTHROW(analytic(1, -1, 0.5, 0).validate());
    CHECK_THROWS_AS(analytic(1.1, 0, 0, 0).validate(), std::invalid_argument);
    CorrelatorSet c = analytic(1.01, 0, 0, 0);
    c.std_errors = std::array<double, 4>{0.01, 0, 0, 0};
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("lg_scan: quantum source reproduces 3cos - cos3") {
    const auto grid = linear_grid(0.01, kPi, 1000);
    const auto scan = lg_scan(kOmega, grid, Source::quantum, true);
    REQUIRE(scan.size() == grid.size());
    double best = -10, best_t = 0;
    for (const auto& p : scan) {
        CHECK(near(p.lg.l_value, 3 * std::cos(p.t) - std::cos(3 * p.t), 1e-12));
        if (p.lg.l_value > best) best = p.lg.l_value, best_t = p.t;
    }
    const double dt = grid[1] - grid[0];
    CHECK(near(best_t, kPi / 4, dt));
    CHECK(near(best, 2 * std::sqrt(2.0), 1e-4));
}

TEST_CASE("lg_scan: bead model without measurement respects the bound") {
    const auto grid = linear_grid(kPi / 1000, kPi, 1000);
    for (const auto& p : lg_scan(kOmega, grid, Source::hv_analytic, false)) {
        CHECK(std::abs(p.lg.l_value) <= 2.0 + 1e-9);
        CHECK_FALSE(p.lg.violated);
    }
}

TEST_CASE("property: quantum and measured bead model coincide pointwise") {
    const auto grid = linear_grid(0.01, 2 * kPi, 300);
    const auto q = lg_scan(kOmega, grid, Source::quantum, true);
    const auto h = lg_scan(kOmega, grid, Source::hv_analytic, true);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(near(q[i].lg.l_value, h[i].lg.l_value, 1e-12));
        const auto a = q[i].correlators.values();
        const auto b = h[i].correlators.values();
        for (std::size_t k = 0; k < 4; ++k) CHECK(near(a[k], b[k], 1e-12));
    }
}

TEST_CASE("lg_scan: Monte Carlo with measurement tracks the quantum curve") {
    const auto grid = linear_grid(0.05, kPi, 25);
    McParams mc;
    mc.n_beads = 100000;
    mc.seed = 17;
    const auto scan = lg_scan(kOmega, grid, Source::hv_mc, true, mc);
    int exceed = 0;
    for (const auto& p : scan) {
        REQUIRE(p.correlators.std_errors.has_value());
        if (std::abs(p.lg.l_value - lg_quantity_quantum(kOmega, p.t)) > p.lg.tolerance + 1e-12) ++exceed;
    }
    CHECK(exceed <= 1);
}

TEST_CASE("lg_scan: parallel Monte Carlo scan is identical to serial") {
    const auto grid = linear_grid(0.1, 2.0, 9);
    McParams serial;
    serial.n_beads = 5000;
    McParams parallel = serial;
    parallel.workers = 4;
    const auto a = lg_scan(kOmega, grid, Source::hv_mc, true, serial);
    const auto b = lg_scan(kOmega, grid, Source::hv_mc, true, parallel);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(a[i].lg.l_value == b[i].lg.l_value);
        CHECK(a[i].correlators.std_errors == b[i].correlators.std_errors);
    }
}

TEST_CASE("lg_scan rejects non-positive times") {
    const std::vector<double> grid{0.0, 1.0};
    CHECK_THROWS_AS(lg_scan(kOmega, grid, Source::quantum, true), std::invalid_argument);
}

TEST_CASE("linear_grid") {
    const auto g = linear_grid(0.01, kPi, 200);
    CHECK(g.size() == 200);
    CHECK(g.front() == 0.01);
    CHECK(g.back() == kPi);
    CHECK_THROWS_AS(linear_grid(1.0, 1.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(linear_grid(0.0, 1.0, 1), std::invalid_argument);
}

TEST_CASE("GenericRealistEnsemble validation") {
    CHECK_THROWS_AS(GenericRealistEnsemble({0.5, 0.4}, {{1, 1, 1, 1}, {1, 1, 1, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(GenericRealistEnsemble({1.0}, {{1, 0, 1, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(GenericRealistEnsemble({1.0}, {}), std::invalid_argument);
    CHECK_THROWS_AS(GenericRealistEnsemble({1.5, -0.5}, {{1, 1, 1, 1}, {1, 1, 1, 1}}),
                    std::invalid_argument);
}

TEST_CASE("check_lg_bound_generic: single all-plus member is tight") {
    const auto r = check_lg_bound_generic(GenericRealistEnsemble({1.0}, {{1, 1, 1, 1}}));
    CHECK(r.lg.l_value == 2.0);
    CHECK(r.all_hold());
}

TEST_CASE("check_lg_bound_generic: exhaustive deterministic tables") {
    const auto tables = deterministic_q_tables();
    REQUIRE(tables.size() == 16);
    // Independent tally of L over the 16 tables.
    std::map<int, int> histogram;
    double max_l = -10;
    for (const auto& row : tables) {
        const int l = row[0] * row[1] + row[1] * row[2] + row[2] * row[3] - row[0] * row[3];
        ++histogram[l];
        const auto r = check_lg_bound_generic(GenericRealistEnsemble({1.0}, {row}));
        CHECK(r.lg.l_value == l);
        CHECK(r.all_hold());
        max_l = std::max(max_l, r.lg.l_value);
    }
    CHECK(max_l == 2.0);
    CHECK(histogram[2] == 8);
    CHECK(histogram[-2] == 8);
}

TEST_CASE("property: random non-invasive ensembles never violate") {
    auto rng = lgsim::test::property_rng(21);
    int violations = 0;
    for (int i = 0; i < 10000; ++i) {
        if (!check_lg_bound_generic(random_ensemble(rng)).all_hold()) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("property: commutativity of adjacent products under one weight vector") {
    auto rng = lgsim::test::property_rng(22);
    for (int i = 0; i < 500; ++i) {
        const auto ens = random_ensemble(rng);
        for (std::size_t a = 0; a < 4; ++a)
            for (std::size_t b = 0; b < 4; ++b) CHECK(ens.correlator(a, b) == ens.correlator(b, a));
    }
}

TEST_CASE("ontic_distance counts relocated labels") {
    const auto ens = init_ensemble(10, kOmega);
    CHECK(ontic_distance(ens, ens, 0.7) == 0.0);
    const auto m = measure_q(ens, kPi / 2).second;
    CHECK(ontic_distance(ens, m, kPi / 2) == 0.5);
    CHECK_THROWS_AS(ontic_distance(ens, init_ensemble(11, kOmega), 0.1), std::invalid_argument);
}

TEST_CASE("invasiveness_report: measurement is detectable") {
    const std::vector<double> probes{3 * kPi / 4, kPi, 5 * kPi / 4};
    const auto rep = invasiveness_report(InterventionChoice::measure_q, kPi / 2, probes, 1000000, kOmega);
    CHECK(rep.ontic_distance == 0.5);
    CHECK(rep.classification == Classification::invasive_detectable);

    // p(1, 3pi/4): 1/2 (1 - sqrt2/2) unmeasured vs 1/2 measured, from bead counts.
    const double unmeasured = 0.5 * (1 - std::sqrt(2.0) / 2);
    CHECK(near(bead_p_state1(init_ensemble(1000000, kOmega), 3 * kPi / 4), unmeasured, 1e-6));
    const auto measured = measure_q(init_ensemble(1000000, kOmega), kPi / 2).second;
    CHECK(near(bead_p_state1(measured, 3 * kPi / 4), 0.5, 1e-6));
    CHECK(rep.observable_distance >= 0.5 - unmeasured - 1e-6);
}

TEST_CASE("invasiveness_report: phantom permutation is undetectable") {
    const auto probes = linear_grid(3.0, 9.0, 12);
    for (double t0 : {0.0, 0.3, kPi / 2, 2.9}) {
        const auto rep =
            invasiveness_report(InterventionChoice::phantom_permutation, t0, probes, 10000, kOmega);
        CHECK(rep.ontic_distance > 0.0);
        CHECK(rep.observable_distance <= 1e-12);
        CHECK(rep.classification == Classification::invasive_undetectable);
        CHECK_FALSE(rep.model_scope.empty());
    }
}

TEST_CASE("phantom permutation relocates every label at omega t = pi/2, N = 10^4") {
    // Brute-force count: a label keeps its place only if it maps to itself
    // under the in-region reversal; both regions hold 5000 beads.
    const std::size_t n = 10000;
    const auto ens = init_ensemble(n, kOmega);
    const auto p = phantom_permutation(ens, kPi / 2);
    std::size_t moved = 0;
    for (std::size_t i = 0; i < n; ++i) moved += p.beads()[i].u != ens.beads()[i].u ? 1 : 0;
    CHECK(moved == n);
    CHECK(ontic_distance(ens, p, kPi / 2) == 1.0);
}

TEST_CASE("property: phantom permutation is never non-invasive once a region holds two beads") {
    const std::vector<double> probes{4.0, 5.0};
    for (std::size_t n = 3; n <= 40; ++n) {
        for (double t0 : {0.0, 0.5, 1.2, kPi / 2, 2.2, 3.0}) {
            const auto rep = invasiveness_report(InterventionChoice::phantom_permutation, t0, probes, n, kOmega);
            CHECK(rep.classification != Classification::non_invasive);
        }
    }
}

TEST_CASE("invasiveness_report: no intervention") {
    const std::vector<double> probes{1.0, 2.0};
    const auto rep = invasiveness_report(InterventionChoice::none, 0.5, probes, 1000, kOmega);
    CHECK(rep.ontic_distance == 0.0);
    CHECK(rep.observable_distance == 0.0);
    CHECK(rep.classification == Classification::non_invasive);
}

TEST_CASE("invasiveness_report rejects bad probe sets") {
    CHECK_THROWS_AS(invasiveness_report(InterventionChoice::none, 0.5, {}, 100, kOmega), std::invalid_argument);
    const std::vector<double> early{0.4, 1.0};
    CHECK_THROWS_AS(invasiveness_report(InterventionChoice::none, 0.5, early, 100, kOmega), std::invalid_argument);
}
