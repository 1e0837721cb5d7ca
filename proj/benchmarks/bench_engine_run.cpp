#include <benchmark/benchmark.h>

#include "srehm/config.hpp"
#include "srehm/engine.hpp"
#include "srehm/trace.hpp"

using namespace srehm;

namespace {

// Full desk-default run; arg is the horizon in minutes.
void BM_DeskRun(benchmark::State& state, HaMode mode) {
    SimConfig cfg = SimConfig::desk_default();
    cfg.horizon_minutes = static_cast<double>(state.range(0));
    cfg.mode = mode;
    const auto trace = synth_trace(cfg.seed, cfg.n_vms(), cfg.n_slots(), cfg.synthetic_pattern, cfg.synthetic);
    for (auto _ : state) benchmark::DoNotOptimize(run(cfg, trace));
    state.counters["slots"] = static_cast<double>(cfg.n_slots());
}
BENCHMARK_CAPTURE(BM_DeskRun, srehm, HaMode::SreHm)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_DeskRun, disabled, HaMode::Disabled)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
