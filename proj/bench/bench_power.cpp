// Compares the OpenMP study runner against the serial reference on a small
// size/power configuration. The two produce identical cells (see the harness
// tests); this target measures the scheduling overhead and scaling.
#include "svct/harness.hpp"

#include <benchmark/benchmark.h>

namespace {

svct::StudyConfig small_config() {
    svct::StudyConfig cfg;
    cfg.kind = svct::StudyKind::SizePower;
    cfg.n_list = {250};
    cfg.lambdas = {0.0, 1.0};
    cfg.reps = 6;
    cfg.seed = 99;
    return cfg;
}

void BM_PowerStudySerial(benchmark::State& state) {
    const auto cfg = small_config();
    for (auto _ : state) {
        auto result = svct::run_power_study_serial(cfg);
        benchmark::DoNotOptimize(result);
    }
}

void BM_PowerStudyParallel(benchmark::State& state) {
    const auto cfg = small_config();
    for (auto _ : state) {
        auto result = svct::run_power_study(cfg);
        benchmark::DoNotOptimize(result);
    }
}

} // namespace

BENCHMARK(BM_PowerStudySerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PowerStudyParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
