#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "mixdense/analysis.hpp"
#include "mixdense/classes.hpp"
#include "mixdense/errors.hpp"
#include "mixdense/kernels.hpp"

using namespace mixdense;
using kernels::Exec;

namespace {

// Bitwise comparison so that -0.0 / 0.0 or NaN payload differences also count.
bool bit_equal(const std::vector<double>& a, const std::vector<double>& b)
{
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

Mixture random_mixture(const Density& g, std::size_t m, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> loc(-4.0, 4.0), sc(0.1, 2.0), w(0.0, 1.0);
    std::vector<Component> comps;
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        Point mu(g.dim());
        for (double& v : mu) v = loc(rng);
        comps.push_back({w(rng), mu, sc(rng)});
        total += comps.back().weight;
    }
    for (auto& c : comps) c.weight /= total;
    return Mixture(g, comps);
}

}  // namespace

TEST(Kernels, TabulateSerialAndParallelAgreeBitwise)
{
    for (const Density& f : catalog()) {
        const QuadratureGrid grid(Box::cube(f.dim(), -5.0, 5.0), f.dim() == 1 ? 10007 : 211);
        EXPECT_TRUE(bit_equal(kernels::tabulate(f, grid, Exec::serial), kernels::tabulate(f, grid, Exec::parallel)))
            << f.name();
    }
}

TEST(Kernels, TabulateMatchesDirectEvaluation)
{
    const Density f = catalog_entry("laplace");
    const QuadratureGrid grid(Box::cube(1, -3.0, 3.0), 601);
    const auto v = kernels::tabulate(f, grid);
    for (std::size_t i = 0; i < grid.size(); i += 37) EXPECT_EQ(v[i], f(grid.node(i)));
}

TEST(Kernels, MixtureTabulationAgreesBitwise)
{
    for (const char* name : {"normal", "cauchy", "normal2d"}) {
        const Density g = catalog_entry(name);
        const Mixture mix = random_mixture(g, 300, 42);
        const QuadratureGrid grid(Box::cube(g.dim(), -6.0, 6.0), g.dim() == 1 ? 5003 : 97);
        const auto s = kernels::tabulate_mixture(mix, grid, Exec::serial);
        const auto p = kernels::tabulate_mixture(mix, grid, Exec::parallel);
        EXPECT_TRUE(bit_equal(s, p)) << name;
        for (std::size_t i = 0; i < grid.size(); i += 101) EXPECT_EQ(s[i], mix.sum(grid.node(i)));

        std::vector<double> pts(g.dim() * 777);
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> u(-6.0, 6.0);
        for (double& x : pts) x = u(rng);
        EXPECT_TRUE(bit_equal(kernels::tabulate_mixture_points(mix, pts, Exec::serial),
                              kernels::tabulate_mixture_points(mix, pts, Exec::parallel)));
        EXPECT_TRUE(bit_equal(kernels::tabulate_points(g, pts, Exec::serial),
                              kernels::tabulate_points(g, pts, Exec::parallel)));
    }
}

TEST(Kernels, ConvolutionAgreesBitwise)
{
    struct Case {
        const char* g;
        const char* f;
        double k;
        std::size_t ppa;
    };
    for (const Case& c : {Case{"normal", "triangular", 4.0, 4096}, Case{"cauchy", "laplace", 2.0, 2048},
                          Case{"normal2d", "triangular2d", 2.0, 96}}) {
        const Density g = catalog_entry(c.g);
        const Density f = catalog_entry(c.f);
        const QuadratureGrid grid(Box::cube(g.dim(), -4.0, 4.0), c.ppa);
        const auto ts = kernels::dilated_kernel_table(g, c.k, grid, Exec::serial);
        const auto tp = kernels::dilated_kernel_table(g, c.k, grid, Exec::parallel);
        ASSERT_TRUE(bit_equal(ts.values, tp.values)) << c.g;
        EXPECT_TRUE(bit_equal(ts.mass, tp.mass));
        const auto h = kernels::tabulate(f, grid);
        EXPECT_TRUE(bit_equal(kernels::convolve_table(ts, h, grid, Exec::serial),
                              kernels::convolve_table(ts, h, grid, Exec::parallel)))
            << c.g;
    }
}

TEST(Kernels, ReductionsAgreeBitwise)
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n01;
    std::vector<double> a(1 << 20), b(1 << 20);
    for (double& x : a) x = n01(rng);
    for (double& x : b) x = n01(rng);
    for (double p : {1.0, 1.5, 2.0, 3.0})
        EXPECT_TRUE(bit_equal(kernels::pow_sum(a, b, p, Exec::serial), kernels::pow_sum(a, b, p, Exec::parallel)))
            << p;
    EXPECT_TRUE(bit_equal(kernels::max_abs_diff(a, b, Exec::serial), kernels::max_abs_diff(a, b, Exec::parallel)));
}

TEST(Kernels, PowSumMatchesNaiveSum)
{
    std::vector<double> a(1000), b(1000, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = static_cast<double>(i % 7) - 3.0;
    double naive = 0.0;
    for (double x : a) naive += x * x;
    EXPECT_EQ(kernels::pow_sum(a, b, 2.0), naive);
    EXPECT_EQ(kernels::max_abs_diff(a, b), 3.0);
}

TEST(Kernels, ResolvedKernelTableCapturesUnitMass)
{
    const QuadratureGrid grid(Box::cube(1, -8.0, 8.0), 4096);
    for (double k : {1.0, 4.0, 64.0, 256.0}) {
        const auto t = kernels::dilated_kernel_table(catalog_entry("normal"), k, grid);
        EXPECT_NEAR(t.mass, 1.0, 1e-9) << k;
        EXPECT_EQ(t.extent[0], 2 * grid.points_per_axis() - 1);
    }
}

TEST(Kernels, TableConvolutionMatchesPointwiseConvolution)
{
    const Density g = catalog_entry("normal");
    const Density f = catalog_entry("laplace");
    const QuadratureGrid grid(Box::cube(1, -10.0, 10.0), 2000);
    const auto h = kernels::tabulate(f, grid);
    const auto conv = convolve_dilated_on_grid(g, 2.0, h, grid);
    for (std::size_t i = 100; i < grid.size(); i += 250) {
        const auto pt = convolve_dilated(g, 2.0, f, grid.node(i), grid);
        EXPECT_NEAR(conv[i], pt.value, 2e-5) << i;
    }
}

TEST(Kernels, HighDimensionalTablesAreRefused)
{
    const Density g("wide", 9, [](std::span<const double>) { return 1.0; });
    const QuadratureGrid grid(Box::cube(9, 0.0, 1.0), 2);
    EXPECT_THROW(kernels::dilated_kernel_table(g, 1.0, grid), ResourceError);
}

TEST(Kernels, SubsampleCounts)
{
    EXPECT_EQ(kernels::kernel_subsamples(1), 8u);
    EXPECT_EQ(kernels::kernel_subsamples(2), 4u);
    EXPECT_EQ(kernels::kernel_subsamples(3), 2u);
}
