#include <benchmark/benchmark.h>

#include <cstddef>
#include <vector>

#include "mixdense/classes.hpp"
#include "mixdense/grid.hpp"
#include "mixdense/kernels.hpp"
#include "mixdense/mixture.hpp"

namespace {

using mixdense::kernels::Exec;

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::parallel : Exec::serial; }

mixdense::QuadratureGrid grid_1d(std::size_t points)
{
    return mixdense::QuadratureGrid(mixdense::Box::cube(1, -8.0, 8.0), points);
}

void BM_TabulateMixture(benchmark::State& state)
{
    const auto g = mixdense::catalog_entry("normal");
    std::vector<mixdense::Component> comps;
    for (int i = 0; i < 256; ++i) comps.push_back({1.0 / 256.0, {-6.0 + 12.0 * i / 255.0}, 0.25});
    const mixdense::Mixture mix(g, comps);
    const auto grid = grid_1d(static_cast<std::size_t>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(mixdense::kernels::tabulate_mixture(mix, grid, exec_of(state)));
}

void BM_ConvolveTable(benchmark::State& state)
{
    const auto g = mixdense::catalog_entry("normal");
    const auto f = mixdense::catalog_entry("laplace");
    const auto grid = grid_1d(static_cast<std::size_t>(state.range(1)));
    const auto h = mixdense::kernels::tabulate(f, grid);
    const auto table = mixdense::kernels::dilated_kernel_table(g, 4.0, grid);
    for (auto _ : state) benchmark::DoNotOptimize(mixdense::kernels::convolve_table(table, h, grid, exec_of(state)));
}

void BM_ConvolveTable2d(benchmark::State& state)
{
    const auto g = mixdense::catalog_entry("normal2d");
    const auto f = mixdense::catalog_entry("triangular2d");
    const mixdense::QuadratureGrid grid(mixdense::Box::cube(2, -3.0, 3.0), static_cast<std::size_t>(state.range(1)));
    const auto h = mixdense::kernels::tabulate(f, grid);
    const auto table = mixdense::kernels::dilated_kernel_table(g, 2.0, grid);
    for (auto _ : state) benchmark::DoNotOptimize(mixdense::kernels::convolve_table(table, h, grid, exec_of(state)));
}

void BM_PowSum(benchmark::State& state)
{
    const auto grid = grid_1d(static_cast<std::size_t>(state.range(1)));
    const auto a = mixdense::kernels::tabulate(mixdense::catalog_entry("normal"), grid);
    const auto b = mixdense::kernels::tabulate(mixdense::catalog_entry("cauchy"), grid);
    for (auto _ : state) benchmark::DoNotOptimize(mixdense::kernels::pow_sum(a, b, 1.5, exec_of(state)));
}

}  // namespace

// Arg 0: 0 serial, 1 parallel. Arg 1: points per axis.
BENCHMARK(BM_TabulateMixture)->ArgsProduct({{0, 1}, {4096, 65536}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvolveTable)->ArgsProduct({{0, 1}, {2048, 8192}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvolveTable2d)->ArgsProduct({{0, 1}, {64, 128}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PowSum)->ArgsProduct({{0, 1}, {65536, 1 << 20}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
