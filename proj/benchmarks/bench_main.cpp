#include <benchmark/benchmark.h>

#include "kerrqnd/fluctuations.hpp"
#include "kerrqnd/meanfield.hpp"
#include "kerrqnd/modes.hpp"
#include "kerrqnd/sweep.hpp"

namespace {

using namespace kerrqnd;

DriveParams bistable_drive(double omega_p) {
    const DetectorParams p = fig1_detector();
    DriveParams d;
    d.omega_p = omega_p;
    d.b1_in = 2.0 * onset_of_bistability(p).b1c_in;
    return d;
}

void BM_SolveResponse(benchmark::State& state) {
    const DetectorParams p = fig1_detector();
    const DriveParams d = bistable_drive(0.9);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_response(p, d));
    }
}
BENCHMARK(BM_SolveResponse);

void BM_FoldPoints(benchmark::State& state) {
    const DetectorParams p = fig1_detector();
    const double b = bistable_drive(0.9).b1_in;
    for (auto _ : state) {
        benchmark::DoNotOptimize(fold_points(p, b));
    }
}
BENCHMARK(BM_FoldPoints);

void BM_FrequencySweep(benchmark::State& state) {
    const DetectorParams p = fig1_detector();
    const double b = bistable_drive(0.9).b1_in;
    const auto grid = linear_grid(0.8, 1.05, static_cast<int>(state.range(0)));
    const DetectionConfig det{1e-4, 0.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(frequency_sweep(p, b, grid, SweepDirection::up, det));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FrequencySweep)->Arg(201)->Arg(2001);

void BM_CorrelationK(benchmark::State& state) {
    const DetectorParams p = fig1_detector();
    const DriveParams d = bistable_drive(0.85);
    const MeanFieldBranch b = solve_response(p, d).back();
    double tau = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(correlation_K(p, d, b, tau));
        tau += 0.1;
    }
}
BENCHMARK(BM_CorrelationK);

void BM_DephasingRate(benchmark::State& state) {
    const DetectorParams p = fig1_detector();
    const DriveParams d = bistable_drive(0.85);
    const MeanFieldBranch b = solve_response(p, d).back();
    const DetectionConfig det{1e-4, 0.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(dephasing_rate(p, d, b, det));
    }
}
BENCHMARK(BM_DephasingRate);

void BM_SolveModes(benchmark::State& state) {
    const LineProfile line = LineProfile::uniform(0.01, 1.6e-10, 4.2e-7, 1e-8, 1e-3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_modes(line, 5, static_cast<int>(state.range(0))));
    }
}
BENCHMARK(BM_SolveModes)->Arg(2000)->Arg(20000);

}  // namespace

BENCHMARK_MAIN();
