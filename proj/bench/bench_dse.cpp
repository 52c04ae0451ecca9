// Serial reference vs OpenMP for the two hot loops of the tile search.

#include <benchmark/benchmark.h>

#include "atb/dse.hpp"

namespace {

atb::SearchSpace space() {
    atb::SearchSpace s;
    s.divisibility_problem = atb::ProblemSpec{4096, 4096, 4096};
    return s;
}

void BM_EnumerateSerial(benchmark::State& state) {
    const auto s = space();
    const auto prec = atb::precision_preset("config2");
    for (auto _ : state) {
        benchmark::DoNotOptimize(atb::enumerate_feasible_serial(s, prec, atb::ArchSpec{}));
    }
}

void BM_EnumerateParallel(benchmark::State& state) {
    const auto s = space();
    const auto prec = atb::precision_preset("config2");
    for (auto _ : state) {
        benchmark::DoNotOptimize(atb::enumerate_feasible(s, prec, atb::ArchSpec{}));
    }
}

void BM_RankSerial(benchmark::State& state) {
    const auto s = space();
    const auto prec = atb::precision_preset("config2");
    const auto configs = atb::enumerate_feasible_serial(s, prec, atb::ArchSpec{});
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            atb::rank_serial(configs, *s.divisibility_problem, prec, atb::ArchSpec{}, s.eff));
    }
    state.counters["configs"] = static_cast<double>(configs.size());
}

void BM_RankParallel(benchmark::State& state) {
    const auto s = space();
    const auto prec = atb::precision_preset("config2");
    const auto configs = atb::enumerate_feasible_serial(s, prec, atb::ArchSpec{});
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            atb::rank(configs, *s.divisibility_problem, prec, atb::ArchSpec{}, s.eff));
    }
    state.counters["configs"] = static_cast<double>(configs.size());
}

}  // namespace

BENCHMARK(BM_EnumerateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnumerateParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RankSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RankParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
