#include <benchmark/benchmark.h>

#include <random>

#include "srehm/ranking.hpp"

using namespace srehm;

namespace {

InvocationGraph dense_graph(std::size_t n) {
    std::mt19937_64 rng(n);
    std::uniform_int_distribution<int> count(0, 5);
    Matrix fq(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (a != b) fq(a, b) = count(rng);
    return build_wdg(fq, classify_critical(in_invocations(fq)));
}

void BM_Significance(benchmark::State& state) {
    const auto g = dense_graph(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(significance(g));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Significance)->RangeMultiplier(2)->Range(4, 256)->Complexity();

void BM_BuildWdg(benchmark::State& state) {
    const auto g = dense_graph(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(build_wdg(g.fq, g.critical));
}
BENCHMARK(BM_BuildWdg)->RangeMultiplier(4)->Range(4, 256);

}  // namespace

BENCHMARK_MAIN();
