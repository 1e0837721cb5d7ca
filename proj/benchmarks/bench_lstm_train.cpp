#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "srehm/forecast.hpp"

using namespace srehm;

namespace {

std::vector<double> wave(std::size_t n) {
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = 0.5 + 0.3 * std::sin(0.2 * static_cast<double>(i));
    return s;
}

// One epoch of full-batch training on a 288-slot day; arg is the hidden size.
void BM_TrainEpoch(benchmark::State& state) {
    const int hidden = static_cast<int>(state.range(0));
    const auto series = wave(288);
    const auto p = LstmParams::random(hidden, 12, 1);
    for (auto _ : state) benchmark::DoNotOptimize(train(p, series, {1, 0.05, 1.0, true}));
}
BENCHMARK(BM_TrainEpoch)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_WindowGradient(benchmark::State& state) {
    const auto series = wave(12);
    const auto p = LstmParams::random(static_cast<int>(state.range(0)), 12, 2);
    for (auto _ : state) benchmark::DoNotOptimize(window_gradient(p, series, 0.5));
}
BENCHMARK(BM_WindowGradient)->Arg(8)->Arg(32);

void BM_Predict(benchmark::State& state) {
    const auto series = wave(12);
    const auto p = LstmParams::random(8, 12, 3);
    for (auto _ : state) benchmark::DoNotOptimize(predict_next(p, series));
}
BENCHMARK(BM_Predict);

}  // namespace

BENCHMARK_MAIN();
