// ensemble_mc.hpp
// Seeded Monte Carlo estimation of bead-model statistics and the stratified
// enumeration oracle.

#pragma once

#include <cstddef>
#include <cstdint>

#include "lgsim/hv_model.hpp"
#include "lgsim/quantum_core.hpp"

namespace lgsim {

/// Counter-based uniform label generator: label(i) is a pure function of
/// (seed, i), so any partitioning of indices reproduces the same labels.
class SeededSampler {
public:
    explicit SeededSampler(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    /// 64 mixed bits for index i.
    std::uint64_t bits(std::uint64_t index) const;

    /// Uniform double in [0, 1) with 53 bits of resolution.
    double label(std::uint64_t index) const {
        return static_cast<double>(bits(index) >> 11) * 0x1.0p-53;
    }

    /// Independent sampler for a numbered sub-stream (per grid point, per correlator).
    SeededSampler substream(std::uint64_t stream) const;

private:
    std::uint64_t seed_;
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct EstimatorResult {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;
};

/// Mean and standard error (sample standard deviation / sqrt(n)) of n samples
/// valued +1 (n_plus of them) or -1 (the rest). Exact in the counts.
EstimatorResult summarize_signs(std::size_t n_plus, std::size_t n_samples);

/// n beads with i.i.d. uniform labels, fresh preparation (all in region a).
/// Throws std::invalid_argument for n = 0.
OnticEnsemble sample_ensemble(const SeededSampler& sampler, std::size_t n, RabiFrequency omega);

/// Monte Carlo estimate of <Q(t2) Q(t1)> over n sampled beads. `workers`
/// partitions the bead indices; the result does not depend on it.
EstimatorResult estimate_correlator(const SeededSampler& sampler, std::size_t n,
                                    RabiFrequency omega, double t1, double t2,
                                    bool with_measurement, unsigned workers = 1);

/// Exact average of q(t1) q(t2) over the stratified ensemble u_k = (k + 1/2) / n.
double enumerate_oracle(std::size_t n, RabiFrequency omega, double t1, double t2,
                        bool with_measurement, unsigned workers = 1);

}  // namespace lgsim
