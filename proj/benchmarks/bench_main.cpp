#include <benchmark/benchmark.h>

#include <numbers>

#include "lgsim/ensemble_mc.hpp"
#include "lgsim/lg_analysis.hpp"

using namespace lgsim;

namespace {

const RabiFrequency kOmega(1.0);

void BM_EstimateCorrelator(benchmark::State& state) {
    const SeededSampler sampler(42);
    const auto n = static_cast<std::size_t>(state.range(0));
    const bool measured = state.range(1) != 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(estimate_correlator(sampler, n, kOmega, 0.7, 1.4, measured));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EstimateCorrelator)->Args({100000, 0})->Args({100000, 1})->Args({1000000, 1});

void BM_EnumerateOracle(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(enumerate_oracle(n, kOmega, 0.7, 1.4, true));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EnumerateOracle)->Arg(100000)->Arg(1000000);

void BM_LgScan(benchmark::State& state) {
    const auto source = static_cast<Source>(state.range(0));
    const auto grid = linear_grid(0.01, std::numbers::pi, 200);
    McParams mc;
    mc.n_beads = 10000;
    for (auto _ : state) {
        benchmark::DoNotOptimize(lg_scan(kOmega, grid, source, true, mc));
    }
}
BENCHMARK(BM_LgScan)
    ->Arg(static_cast<int>(Source::quantum))
    ->Arg(static_cast<int>(Source::hv_analytic))
    ->Arg(static_cast<int>(Source::hv_mc));

void BM_InvasivenessReport(benchmark::State& state) {
    const auto probes = linear_grid(1.7, 9.0, 40);
    for (auto _ : state) {
        benchmark::DoNotOptimize(invasiveness_report(InterventionChoice::phantom_permutation,
                                                     std::numbers::pi / 2, probes, 10000, kOmega));
    }
}
BENCHMARK(BM_InvasivenessReport);

}  // namespace
BENCHMARK_MAIN();
