#include <benchmark/benchmark.h>

#include "diamondbc/bounds.hpp"
#include "diamondbc/oracle.hpp"
#include "diamondbc/schemes.hpp"

using namespace diamondbc;

namespace {

void BM_FadingDraw(benchmark::State& state) {
    const SeedSpec seed{kDefaultSeed, 1};
    std::uint64_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(fading_at(seed, i++));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_FadingDraw);

void BM_DfThroughput(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(df_throughput({1, 10}));
}
BENCHMARK(BM_DfThroughput);

void BM_DafThroughput(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(daf_throughput({10, 1}));
}
BENCHMARK(BM_DafThroughput)->Unit(benchmark::kMillisecond);

void BM_CutsetExpected(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(cutset_expected_rate({1, 10}));
}
BENCHMARK(BM_CutsetExpected);

void BM_LayeredTwoLayer(benchmark::State& state) {
    const PowerConfig p{1, 10};
    const auto opt = df_finite_expected_rate(2, p);
    for (auto _ : state) benchmark::DoNotOptimize(layered_expected_rate(p, *opt.plan, *opt.allocations, false));
}
BENCHMARK(BM_LayeredTwoLayer);

void BM_DfFiniteK2(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(df_finite_expected_rate(2, {1, 10}));
}
BENCHMARK(BM_DfFiniteK2)->Unit(benchmark::kMillisecond);

void BM_AfTables(benchmark::State& state) {
    EngineOptions opt;
    opt.samples = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(af_tables({1, 10}, opt));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AfTables)->Arg(100'000)->Unit(benchmark::kMillisecond);

void BM_CfRelayDraws(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(CfRelaySamples::draw({1, 100}, 0.3, n, {kDefaultSeed, 2}));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CfRelayDraws)->Arg(100'000)->Unit(benchmark::kMillisecond);

void BM_SimulateDf(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(simulate_df_single({1, 1}, 0.5, n, {kDefaultSeed, 3}));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateDf)->Arg(100'000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
