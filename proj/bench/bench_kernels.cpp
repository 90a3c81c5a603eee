// Parallel kernels against their serial references.

#include "primelab/concentration.hpp"
#include "primelab/errorscan.hpp"
#include "primelab/pbin.hpp"
#include "primelab/reference.hpp"
#include "primelab/sieve.hpp"

#include <benchmark/benchmark.h>

using namespace primelab;

namespace {

const ThresholdFunction kLog{ThresholdFamily::log, 1.0, 0.25, false};

void BM_SieveSegmented(benchmark::State& state) {
    SieveConfig cfg;
    cfg.jobs = static_cast<int>(state.range(1));
    const SegmentedSieve sieve(cfg);
    const auto n = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(sieve.pi(n));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SieveSegmented)
    ->ArgsProduct({{1'000'000, 10'000'000, 100'000'000}, {1, 4}})
    ->Unit(benchmark::kMillisecond);

void BM_SieveMonolithic(benchmark::State& state) {
    const auto n = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(reference::count_primes_monolithic(n));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SieveMonolithic)->Arg(1'000'000)->Arg(10'000'000)->Arg(100'000'000)->Unit(benchmark::kMillisecond);

void BM_SimulateParallel(benchmark::State& state) {
    const PBParams params(std::vector<double>(static_cast<std::size_t>(state.range(0)), 0.3));
    const int jobs = static_cast<int>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(simulate_sum(params, kLog, 2000, 42, jobs).hits);
    state.SetItemsProcessed(state.iterations() * 2000 * state.range(0));
}
BENCHMARK(BM_SimulateParallel)->ArgsProduct({{1000, 10000}, {1, 4}})->Unit(benchmark::kMillisecond);

void BM_SimulateSerial(benchmark::State& state) {
    const PBParams params(std::vector<double>(static_cast<std::size_t>(state.range(0)), 0.3));
    for (auto _ : state) benchmark::DoNotOptimize(reference::simulate_sum_serial(params, kLog, 2000, 42).hits);
    state.SetItemsProcessed(state.iterations() * 2000 * state.range(0));
}
BENCHMARK(BM_SimulateSerial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_ExtremalSearch(benchmark::State& state) {
    SearchOptions opts;
    opts.jobs = static_cast<int>(state.range(1));
    const auto k = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(extremal_search(k, 2.0, k, opts).h_value);
}
BENCHMARK(BM_ExtremalSearch)->ArgsProduct({{6, 8}, {1, 4}})->Unit(benchmark::kMillisecond);

void BM_Scan(benchmark::State& state) {
    ScanOptions opts;
    opts.jobs = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(scan(default_sieve(), 10'000'000, kLog, opts).size());
}
BENCHMARK(BM_Scan)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
