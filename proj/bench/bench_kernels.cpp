// Serial reference vs OpenMP kernels. Arg: worker count for the parallel runs.

#include <benchmark/benchmark.h>

#include <cmath>

#include "finsler/kernels.hpp"

using namespace finsler::kernels;

namespace {

double integrand(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += std::abs(v) * std::abs(v) * std::abs(v) * std::abs(v);
    return std::pow(s, 0.25) <= 1.0 ? std::exp(-s) : 0.0;
}

const Box kBox{{-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0}};

void BM_IntegrateSerial(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(serial::integrate(integrand, kBox, 1 << 20, 7));
    state.SetItemsProcessed(state.iterations() * (1 << 20));
}

void BM_IntegrateOmp(benchmark::State& state) {
    set_threads(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(omp::integrate(integrand, kBox, 1 << 20, 7));
    state.SetItemsProcessed(state.iterations() * (1 << 20));
    set_threads(0);
}

void BM_CellsSerial(benchmark::State& state) {
    const int cells[3] = {96, 96, 96};
    for (auto _ : state) benchmark::DoNotOptimize(serial::evaluate_cells(integrand, kBox, cells));
}

void BM_CellsOmp(benchmark::State& state) {
    set_threads(static_cast<int>(state.range(0)));
    const int cells[3] = {96, 96, 96};
    for (auto _ : state) benchmark::DoNotOptimize(omp::evaluate_cells(integrand, kBox, cells));
    set_threads(0);
}

}  // namespace

BENCHMARK(BM_IntegrateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IntegrateOmp)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CellsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CellsOmp)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
