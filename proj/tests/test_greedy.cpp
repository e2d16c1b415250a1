#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "mixdense/analysis.hpp"
#include "mixdense/classes.hpp"
#include "mixdense/errors.hpp"
#include "mixdense/greedy.hpp"
#include "mixdense/kernels.hpp"

using namespace mixdense;

namespace {

const double pi = std::numbers::pi;

QuadratureGrid line(double lo, double hi, std::size_t n) { return QuadratureGrid(Box::cube(1, lo, hi), n); }

DictionarySpec normal_dictionary(double k, std::size_t count)
{
    return DictionarySpec{catalog_entry("normal"), k, linspace_candidates(1, -6.0, 6.0, count)};
}

}  // namespace

TEST(Donahue, ConstantBranches)
{
    EXPECT_EQ(donahue_constant(1.0), 1.0);
    EXPECT_EQ(donahue_constant(1.5), 1.0);
    EXPECT_EQ(donahue_constant(2.0), 1.0);
    // Gamma(5/2) = (3/4) sqrt(pi), so sqrt(pi) Gamma(5/2) = 3 pi / 4.
    EXPECT_NEAR(donahue_constant(4.0), std::sqrt(2.0) * std::pow(3.0 * pi / 4.0, 0.25), 1e-14);
    // Gamma(2) = 1.
    EXPECT_NEAR(donahue_constant(3.0), std::sqrt(2.0) * std::pow(pi, 1.0 / 6.0), 1e-14);
    EXPECT_THROW(donahue_constant(0.5), InputError);
}

TEST(Candidates, LinspaceLayout)
{
    const auto c = linspace_candidates(1, -6.0, 6.0, 257);
    ASSERT_EQ(c.size(), 257u);
    EXPECT_EQ(c.front()[0], -6.0);
    EXPECT_EQ(c.back()[0], 6.0);
    EXPECT_EQ(c[128][0], 0.0);
    const auto c2 = linspace_candidates(2, 0.0, 1.0, 3);
    ASSERT_EQ(c2.size(), 9u);
    EXPECT_EQ(c2[1], (Point{0.0, 0.5}));
    EXPECT_THROW(linspace_candidates(1, 1.0, 0.0, 3), InputError);
}

TEST(Greedy, LaplaceRateAndSlope)
{
    const QuadratureGrid grid = line(-12.0, 12.0, 4096);
    const Smoothing s = smooth_target(catalog_entry("laplace"), catalog_entry("normal"), 4.0, grid, 2.0);
    const GreedyFit fit = greedy_convex_fit_values(s.smoothed, normal_dictionary(4.0, 257), 2.0, 64, grid);
    const GreedyTrace& t = fit.trace;
    ASSERT_EQ(t.steps.size(), 64u);
    EXPECT_EQ(t.C_p, 1.0);
    EXPECT_EQ(t.alpha, 2.0);
    EXPECT_TRUE(rate_bound_check(t, 2.0).holds);
    EXPECT_LE(loglog_slope(t, 4, 64), -0.4);
    for (std::size_t i = 1; i < t.steps.size(); ++i) EXPECT_LE(t.steps[i].lp_error, t.steps[i - 1].lp_error);
    EXPECT_TRUE(fit.mixture.valid());
    EXPECT_LE(fit.mixture.size(), 64u);
    // The returned mixture reproduces the last recorded error.
    const auto h = kernels::tabulate_mixture(fit.mixture, grid);
    EXPECT_NEAR(lp_distance_values(s.smoothed, h, 2.0, grid), t.steps.back().lp_error, 1e-9);
}

TEST(Greedy, RateBoundUsesHalfExponentAtPTwo)
{
    GreedyTrace t;
    t.C_p = 1.0;
    t.alpha = 2.0;
    t.K_bound = 3.0;
    EXPECT_DOUBLE_EQ(rate_bound(t, 4), 1.5);
    EXPECT_DOUBLE_EQ(rate_bound(t, 64), 3.0 / 8.0);
}

TEST(Greedy, OtherExponentsStayMonotoneAndBounded)
{
    const QuadratureGrid grid = line(-10.0, 10.0, 2048);
    const Density f = catalog_entry("cauchy");
    for (double p : {1.0, 1.5, 3.0}) {
        const GreedyFit fit = greedy_convex_fit(f, normal_dictionary(2.0, 97), p, 16, grid);
        const auto& steps = fit.trace.steps;
        for (std::size_t i = 1; i < steps.size(); ++i) EXPECT_LE(steps[i].lp_error, steps[i - 1].lp_error + 1e-15);
        EXPECT_TRUE(rate_bound_check(fit.trace, p).holds) << p;
        EXPECT_TRUE(fit.mixture.valid());
        for (const auto& s : steps) {
            EXPECT_GE(s.step_size, 0.0);
            EXPECT_LE(s.step_size, 1.0);
        }
    }
}

TEST(Greedy, ExactDictionaryMemberStopsAtOnce)
{
    const QuadratureGrid grid = line(-6.0, 6.0, 1024);
    const DictionarySpec dict = normal_dictionary(2.0, 13);  // contains mu = 0
    const Mixture single(catalog_entry("normal"), {{1.0, {0.0}, 0.5}});
    const auto target = kernels::tabulate_mixture(single, grid);
    const GreedyFit fit = greedy_convex_fit_values(target, dict, 2.0, 10, grid);
    ASSERT_EQ(fit.trace.steps.size(), 1u);
    EXPECT_TRUE(fit.trace.stopped_early);
    EXPECT_EQ(fit.trace.steps[0].mu[0], 0.0);
    EXPECT_LE(fit.trace.steps[0].lp_error, greedy_stop_error);
}

TEST(Greedy, ObserverSeesEveryIterate)
{
    const QuadratureGrid grid = line(-8.0, 8.0, 1024);
    std::vector<std::size_t> seen;
    const auto target = kernels::tabulate(catalog_entry("laplace"), grid);
    greedy_convex_fit_values(target, normal_dictionary(2.0, 33), 2.0, 5, grid, {},
                             [&](std::size_t m, std::span<const double> h) {
                                 seen.push_back(m);
                                 EXPECT_EQ(h.size(), grid.size());
                             });
    EXPECT_EQ(seen, (std::vector<std::size_t>{1, 2, 3, 4, 5}));
}

TEST(Greedy, InputChecks)
{
    const QuadratureGrid grid = line(-1.0, 1.0, 16);
    const auto target = kernels::tabulate(catalog_entry("normal"), grid);
    EXPECT_THROW(greedy_convex_fit_values(target, normal_dictionary(1.0, 3), 2.0, 0, grid), InputError);
    EXPECT_THROW(greedy_convex_fit_values(target, normal_dictionary(1.0, 3), 0.5, 3, grid), InputError);
    DictionarySpec empty{catalog_entry("normal"), 1.0, {}};
    EXPECT_THROW(greedy_convex_fit_values(target, empty, 2.0, 3, grid), InputError);
    DictionarySpec bad_k{catalog_entry("normal"), -1.0, linspace_candidates(1, 0.0, 1.0, 2)};
    EXPECT_THROW(greedy_convex_fit_values(target, bad_k, 2.0, 3, grid), InputError);
}

TEST(Slope, RecoversAPowerLaw)
{
    GreedyTrace t;
    for (std::size_t m = 1; m <= 64; ++m) t.steps.push_back({m, {0.0}, 0.5, 3.0 / std::sqrt(static_cast<double>(m))});
    EXPECT_NEAR(loglog_slope(t, 4, 64), -0.5, 1e-12);
    EXPECT_TRUE(std::isnan(loglog_slope(t, 100, 200)));
}

TEST(Smoothing, SmoothTargetNeedsSmallK)
{
    const Smoothing s = target_smoothing(catalog_entry("normal"), catalog_entry("normal"), 0.1,
                                         line(-10.0, 10.0, 4096), 2.0);
    EXPECT_LE(s.k, 4.0);
    EXPECT_LT(s.lp_error, 0.05);
}

TEST(Smoothing, JumpTargetNeedsGrowingK)
{
    const QuadratureGrid grid = line(-4.0, 5.0, 8192);
    double prev = 0.0;
    std::vector<double> ks;
    for (double eps : {0.2, 0.1, 0.05}) {
        const Smoothing s = target_smoothing(catalog_entry("uniform"), catalog_entry("normal"), eps, grid, 2.0);
        EXPECT_GE(s.k, prev);
        prev = s.k;
        ks.push_back(s.k);
    }
    EXPECT_GT(ks.back(), ks.front());
}

TEST(Trace, CsvFooter)
{
    GreedyTrace t;
    t.K_bound = 2.0;
    t.C_p = 1.0;
    t.alpha = 2.0;
    t.steps.push_back({1, {0.5}, 1.0, 0.25});
    EXPECT_EQ(t.to_csv(), "step,mu,step_size,lp_error\n1,0.5,1,0.25\nK=2,C_p=1,alpha=2,\n");
}
