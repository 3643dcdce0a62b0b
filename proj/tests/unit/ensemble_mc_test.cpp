#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bead_oracle.hpp"
#include "lgsim/ensemble_mc.hpp"
#include "test_util.hpp"

using namespace lgsim;
using lgsim::test::kPi;
using lgsim::test::near;

namespace {

const RabiFrequency kOmega(1.0);

double free_closed_form(double wt1, double wt2) {
    return 1.0 - std::abs(std::cos(wt1) - std::cos(wt2));
}

}  // namespace

TEST_CASE("SeededSampler is a pure function of (seed, index)") {
    const SeededSampler s(42);
    const double first = s.label(12345);
    for (int i = 0; i < 1000; ++i) (void)s.label(static_cast<std::uint64_t>(i));
    CHECK(s.label(12345) == first);
    CHECK(SeededSampler(42).label(12345) == first);
    CHECK(SeededSampler(43).label(12345) != first);
    CHECK(s.substream(3).seed() == s.substream(3).seed());
    CHECK(s.substream(3).seed() != s.substream(4).seed());
    for (std::uint64_t i = 0; i < 10000; ++i) {
        const double u = s.label(i);
        CHECK((u >= 0.0 && u < 1.0));
    }
}

TEST_CASE("summarize_signs") {
    const auto all_plus = summarize_signs(10, 10);
    CHECK(all_plus.mean == 1.0);
    CHECK(all_plus.std_error == 0.0);
    const auto all_minus = summarize_signs(0, 10);
    CHECK(all_minus.mean == -1.0);
    CHECK(all_minus.std_error == 0.0);

    // explicit +-1 samples: 3 plus, 1 minus
    const std::vector<double> xs{1, 1, 1, -1};
    double mean = 0.0;
    for (double x : xs) mean += x / xs.size();
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double se = std::sqrt(ss / (xs.size() - 1)) / std::sqrt(double(xs.size()));
    const auto r = summarize_signs(3, 4);
    CHECK(near(r.mean, mean, 1e-15));
    CHECK(near(r.std_error, se, 1e-15));
    CHECK(r.n_samples == 4);

    CHECK_THROWS_AS(summarize_signs(0, 0), std::invalid_argument);
    CHECK_THROWS_AS(summarize_signs(5, 4), std::invalid_argument);
}

TEST_CASE("sample_ensemble") {
    const SeededSampler s(7);
    CHECK_THROWS_AS(sample_ensemble(s, 0, kOmega), std::invalid_argument);

    const auto a = sample_ensemble(s, 1000, kOmega);
    const auto b = sample_ensemble(s, 1000, kOmega);
    bool identical = true;
    for (std::size_t i = 0; i < a.size(); ++i) identical &= a.beads()[i].u == b.beads()[i].u;
    CHECK(identical);

    const auto c = sample_ensemble(SeededSampler(8), 1000, kOmega);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.size(); ++i) any_diff |= a.beads()[i].u != c.beads()[i].u;
    CHECK(any_diff);

    const std::size_t n = 100000;
    const auto big = sample_ensemble(SeededSampler(2024), n, kOmega);
    std::size_t below = 0;
    for (const auto& bead : big.beads()) below += bead.u < 0.5 ? 1 : 0;
    const double frac = static_cast<double>(below) / n;
    CHECK(std::abs(frac - 0.5) <= 4.0 * 0.5 / std::sqrt(double(n)));
}

TEST_CASE("estimate_correlator examples") {
    const SeededSampler s(99);
    const std::size_t n = 100000;

    const auto m = estimate_correlator(s, n, kOmega, 0.4, 0.4 + kPi / 3, true);
    CHECK(m.n_samples == n);
    CHECK(std::abs(m.mean - 0.5) <= 4.0 * m.std_error);

    const auto same = estimate_correlator(s, n, kOmega, 1.3, 1.3, true);
    CHECK(same.mean == 1.0);
    CHECK(same.std_error == 0.0);

    const auto f = estimate_correlator(s, n, kOmega, kPi / 4, kPi / 2, false);
    CHECK(std::abs(f.mean - (1.0 - std::sqrt(2.0) / 2)) <= 4.0 * f.std_error);

    CHECK_THROWS_AS(estimate_correlator(s, n, kOmega, 2.0, 1.0, true), std::invalid_argument);
    CHECK_THROWS_AS(estimate_correlator(s, 0, kOmega, 1.0, 2.0, true), std::invalid_argument);
}

TEST_CASE("estimate_correlator equals the ensemble-level path") {
    const SeededSampler s(5);
    const std::size_t n = 20000;
    const auto ens = sample_ensemble(s, n, kOmega);
    for (double t1 : {0.0, 0.5, 1.7}) {
        for (double dt : {0.0, 0.9, 2.2}) {
            for (bool m : {false, true}) {
                const auto est = estimate_correlator(s, n, kOmega, t1, t1 + dt, m);
                CHECK(est.mean == bead_correlator(ens, t1, t1 + dt, m));
            }
        }
    }
}

TEST_CASE("property: serial and parallel estimation are bit-identical") {
    const SeededSampler s(31337);
    for (unsigned workers : {2u, 3u, 8u}) {
        for (bool m : {false, true}) {
            const auto serial = estimate_correlator(s, 54321, kOmega, 0.7, 2.1, m, 1);
            const auto parallel = estimate_correlator(s, 54321, kOmega, 0.7, 2.1, m, workers);
            CHECK(serial.mean == parallel.mean);
            CHECK(serial.std_error == parallel.std_error);
            CHECK(enumerate_oracle(10007, kOmega, 0.7, 2.1, m, 1) ==
                  enumerate_oracle(10007, kOmega, 0.7, 2.1, m, workers));
        }
    }
}

TEST_CASE("property: estimator coverage over independent seeds") {
    const std::size_t n = 20000;
    const double t1 = 0.6, t2 = 1.9;
    for (bool m : {true, false}) {
        const double truth = m ? std::cos(t2 - t1) : free_closed_form(t1, t2);
        int covered = 0;
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            const auto est = estimate_correlator(SeededSampler(1000 + seed), n, kOmega, t1, t2, m);
            if (std::abs(est.mean - truth) <= 2.0 * est.std_error) ++covered;
        }
        // nominal 95.4%; binomial tolerance of 6 points
        CHECK(covered >= 180);
    }
}

TEST_CASE("enumerate_oracle examples") {
    CHECK(near(enumerate_oracle(1000000, kOmega, 0.2, 0.2 + kPi / 4, true), std::sqrt(2.0) / 2, 1e-5));

    const double single = enumerate_oracle(1, kOmega, 0.9, 2.0, true);
    CHECK((single == 1.0 || single == -1.0));
    CHECK(enumerate_oracle(1, kOmega, 0.9, 2.0, false) ==
          lgsim::test::enumerate_correlator(1, 0.9, 2.0, false));
}

TEST_CASE("enumerate_oracle agrees with the test-side enumeration") {
    for (std::size_t n : {1u, 2u, 17u, 1000u}) {
        for (double t1 = 0.0; t1 < 3.0; t1 += 0.7) {
            for (double dt = 0.0; dt < 4.0; dt += 0.9) {
                for (bool m : {false, true}) {
                    CHECK(enumerate_oracle(n, kOmega, t1, t1 + dt, m) ==
                          lgsim::test::enumerate_correlator(n, t1, t1 + dt, m));
                }
            }
        }
    }
}

TEST_CASE("property: oracle agrees with closed forms within 10/n") {
    for (std::size_t n : {100u, 1000u, 10000u}) {
        for (int i = 0; i < 20; ++i) {
            const double t1 = kPi * i / 40.0;
            const double t2 = t1 + kPi * (i % 5 + 1) / 12.0;
            CHECK(std::abs(enumerate_oracle(n, kOmega, t1, t2, true) - std::cos(t2 - t1)) <= 10.0 / n);
            if (t2 <= kPi) {
                CHECK(std::abs(enumerate_oracle(n, kOmega, t1, t2, false) - free_closed_form(t1, t2)) <=
                      10.0 / n);
            }
        }
    }
}

TEST_CASE("oracle error shrinks when n doubles") {
    auto grid_error = [](std::size_t n, bool m) {
        double err = 0.0;
        for (int i = 0; i < 20; ++i) {
            const double t1 = kPi * (i + 0.5) / 40.0;
            const double t2 = std::min(kPi, t1 + kPi * (i % 4 + 1) / 9.0);
            const double truth = m ? std::cos(t2 - t1) : free_closed_form(t1, t2);
            err = std::max(err, std::abs(enumerate_oracle(n, kOmega, t1, t2, m) - truth));
        }
        return err;
    };
    for (bool m : {false, true}) {
        for (std::size_t n : {1000u, 4000u, 16000u}) {
            const double e1 = grid_error(n, m);
            const double e2 = grid_error(2 * n, m);
            CHECK(e2 * 1.5 <= e1);
        }
    }
}
