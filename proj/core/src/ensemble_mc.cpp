#include "lgsim/ensemble_mc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace lgsim {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Counts beads with q(t1) q(t2) = +1 among indices [begin, end). `label_of`
// supplies the label of bead i for a fresh preparation (rank = label).
template <typename LabelFn>
std::size_t count_positive(LabelFn label_of, std::size_t begin, std::size_t end,
                           const SectorDynamics& fresh, const std::optional<MeasurementMap>& map,
                           double t1, double t2) {
    // Region thresholds are per sector and per time, so evaluate them once.
    const double f1 = fresh.upper_fraction(Sector::AB, t1);
    const double f2 = fresh.upper_fraction(Sector::AB, t2);
    std::array<double, 2> g{f2, f2};
    if (map) {
        g = {map->after().upper_fraction(Sector::AB, t2), map->after().upper_fraction(Sector::CD, t2)};
    }
    std::size_t plus = 0;
    for (std::size_t i = begin; i < end; ++i) {
        const double u = label_of(i);
        const bool up1 = u < f1;
        bool up2;
        if (map) {
            const OnticBead moved =
                map->apply(OnticBead{u, Sector::AB, u, 0.0}, up1 ? RegionClass::upper : RegionClass::lower);
            up2 = moved.rank < g[moved.sector == Sector::AB ? 0 : 1];
        } else {
            up2 = u < f2;
        }
        if (up1 == up2) ++plus;
    }
    return plus;
}

// Splits [0, n) into contiguous chunks and sums integer counts, so the total
// is independent of the number of workers.
template <typename LabelFn>
std::size_t parallel_count(LabelFn label_of, std::size_t n, unsigned workers,
                           const SectorDynamics& fresh, const std::optional<MeasurementMap>& map,
                           double t1, double t2) {
    const std::size_t w = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
    if (w == 1) return count_positive(label_of, 0, n, fresh, map, t1, t2);

    std::vector<std::size_t> partial(w, 0);
    std::vector<std::thread> threads;
    threads.reserve(w);
    for (std::size_t k = 0; k < w; ++k) {
        const std::size_t begin = n * k / w;
        const std::size_t end = n * (k + 1) / w;
        threads.emplace_back([&, k, begin, end] {
            partial[k] = count_positive(label_of, begin, end, fresh, map, t1, t2);
        });
    }
    for (auto& th : threads) th.join();
    std::size_t total = 0;
    for (std::size_t p : partial) total += p;
    return total;
}

void check_times(double t1, double t2) {
    if (!(t1 >= 0.0)) throw std::invalid_argument("correlator times must be >= 0");
    if (t2 < t1) throw std::invalid_argument("correlator requires t1 <= t2");
}

}  // namespace

std::uint64_t SeededSampler::bits(std::uint64_t index) const {
    // Two rounds so that neighbouring (seed, index) pairs decorrelate.
    return mix64(mix64(seed_ + kGolden * (index + 1)) ^ seed_);
}

SeededSampler SeededSampler::substream(std::uint64_t stream) const {
    return SeededSampler(mix64(seed_ ^ mix64(stream + kGolden)));
}

EstimatorResult summarize_signs(std::size_t n_plus, std::size_t n_samples) {
    if (n_samples == 0) throw std::invalid_argument("summarize_signs: no samples");
    if (n_plus > n_samples) throw std::invalid_argument("summarize_signs: n_plus > n_samples");
    const double n = static_cast<double>(n_samples);
    const double plus = static_cast<double>(n_plus);
    const double mean = (2.0 * plus - n) / n;
    double se = 0.0;
    if (n_samples > 1 && n_plus != 0 && n_plus != n_samples) {
        // Sum of squared deviations of +-1 samples: n (1 - mean^2).
        const double variance = n * (1.0 - mean * mean) / (n - 1.0);
        se = std::sqrt(variance / n);
    }
    return EstimatorResult{mean, se, n_samples};
}

OnticEnsemble sample_ensemble(const SeededSampler& sampler, std::size_t n, RabiFrequency omega) {
    if (n == 0) throw std::invalid_argument("sample_ensemble: n must be >= 1");
    std::vector<double> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = sampler.label(i);
    return fresh_ensemble_from_labels(std::move(labels), omega);
}

EstimatorResult estimate_correlator(const SeededSampler& sampler, std::size_t n,
                                    RabiFrequency omega, double t1, double t2,
                                    bool with_measurement, unsigned workers) {
    if (n == 0) throw std::invalid_argument("estimate_correlator: n must be >= 1");
    check_times(t1, t2);
    const SectorDynamics fresh = fresh_dynamics(omega);
    std::optional<MeasurementMap> map;
    if (with_measurement) map.emplace(fresh, t1);
    const auto label_of = [&sampler](std::size_t i) { return sampler.label(i); };
    const std::size_t plus = parallel_count(label_of, n, workers, fresh, map, t1, t2);
    return summarize_signs(plus, n);
}

double enumerate_oracle(std::size_t n, RabiFrequency omega, double t1, double t2,
                        bool with_measurement, unsigned workers) {
    if (n == 0) throw std::invalid_argument("enumerate_oracle: n must be >= 1");
    check_times(t1, t2);
    const SectorDynamics fresh = fresh_dynamics(omega);
    std::optional<MeasurementMap> map;
    if (with_measurement) map.emplace(fresh, t1);
    const double dn = static_cast<double>(n);
    const auto label_of = [dn](std::size_t k) { return (static_cast<double>(k) + 0.5) / dn; };
    const std::size_t plus = parallel_count(label_of, n, workers, fresh, map, t1, t2);
    return (2.0 * static_cast<double>(plus) - dn) / dn;
}

}  // namespace lgsim
