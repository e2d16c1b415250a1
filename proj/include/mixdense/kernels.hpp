#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mixdense/density.hpp"
#include "mixdense/grid.hpp"
#include "mixdense/mixture.hpp"

// Node-loop kernels behind the analysis and construction code.
//
// Each kernel exists twice: a plain serial reference and an OpenMP version.
// Both use the same per-element arithmetic and the same reduction tree, so
// their outputs are bit-identical; the test suite checks this.

namespace mixdense::kernels {

enum class Exec { serial, parallel };

/// k^n g(k .) averaged over a grid cell centred at every lattice offset.
struct DilatedKernelTable {
    std::vector<double> values;
    std::vector<std::size_t> extent;  // 2 N_a - 1 per axis
    /// Sum of values times cell volume: the kernel mass the table captures.
    double mass = 0.0;
};

/// Sub-samples per axis used to average the kernel over one cell.
std::size_t kernel_subsamples(std::size_t dim);

namespace serial {

std::vector<double> tabulate(const Density& f, const QuadratureGrid& grid);
std::vector<double> tabulate_points(const Density& f, std::span<const double> points);
std::vector<double> tabulate_mixture(const Mixture& mix, const QuadratureGrid& grid);
std::vector<double> tabulate_mixture_points(const Mixture& mix, std::span<const double> points);
DilatedKernelTable dilated_kernel_table(const Density& g, double k, const QuadratureGrid& grid);
std::vector<double> convolve_table(const DilatedKernelTable& table, std::span<const double> h,
                                   const QuadratureGrid& grid);
double pow_sum(std::span<const double> a, std::span<const double> b, double p);
double max_abs_diff(std::span<const double> a, std::span<const double> b);

}  // namespace serial

namespace parallel {

std::vector<double> tabulate(const Density& f, const QuadratureGrid& grid);
std::vector<double> tabulate_points(const Density& f, std::span<const double> points);
std::vector<double> tabulate_mixture(const Mixture& mix, const QuadratureGrid& grid);
std::vector<double> tabulate_mixture_points(const Mixture& mix, std::span<const double> points);
DilatedKernelTable dilated_kernel_table(const Density& g, double k, const QuadratureGrid& grid);
std::vector<double> convolve_table(const DilatedKernelTable& table, std::span<const double> h,
                                   const QuadratureGrid& grid);
double pow_sum(std::span<const double> a, std::span<const double> b, double p);
double max_abs_diff(std::span<const double> a, std::span<const double> b);

}  // namespace parallel

// Dispatchers; the library calls these with the default.

std::vector<double> tabulate(const Density& f, const QuadratureGrid& grid, Exec exec = Exec::parallel);
std::vector<double> tabulate_points(const Density& f, std::span<const double> points, Exec exec = Exec::parallel);
std::vector<double> tabulate_mixture(const Mixture& mix, const QuadratureGrid& grid, Exec exec = Exec::parallel);
std::vector<double> tabulate_mixture_points(const Mixture& mix, std::span<const double> points,
                                            Exec exec = Exec::parallel);
DilatedKernelTable dilated_kernel_table(const Density& g, double k, const QuadratureGrid& grid,
                                        Exec exec = Exec::parallel);
/// (g_k * h)(x_i) ~ sum_j T[i - j] h_j dV at every node; h holds node values.
std::vector<double> convolve_table(const DilatedKernelTable& table, std::span<const double> h,
                                   const QuadratureGrid& grid, Exec exec = Exec::parallel);
/// sum_i |a_i - b_i|^p in pairwise order.
double pow_sum(std::span<const double> a, std::span<const double> b, double p, Exec exec = Exec::parallel);
double max_abs_diff(std::span<const double> a, std::span<const double> b, Exec exec = Exec::parallel);

}  // namespace mixdense::kernels
