#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "mixdense/classes.hpp"
#include "mixdense/errors.hpp"

using namespace mixdense;

namespace {

double gk(const std::function<double(double)>& f, double a, double b)
{
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-14);
}

// Independent oracle for bump i: adaptive tanh-sinh on each half of [i - 1, i].
double bump_mass_oracle(std::size_t i)
{
    boost::math::quadrature::tanh_sinh<double> ts;
    const double a = static_cast<double>(i) - 1.0;
    auto f = [](double x) { return counterexample_eval(x); };
    return ts.integrate(f, a, a + 0.5) + ts.integrate(f, a + 0.5, a + 1.0);
}

}  // namespace

TEST(Counterexample, ValuesFromTheDefinition)
{
    EXPECT_EQ(counterexample_eval(-1.0), 0.0);
    EXPECT_EQ(counterexample_eval(0.5), 1.0);
    EXPECT_EQ(counterexample_eval(1.5), 0.5);
    EXPECT_EQ(counterexample_eval(0.0), 0.0);
    for (std::size_t i = 1; i <= 100; ++i)
        EXPECT_EQ(counterexample_eval(static_cast<double>(i) - 0.5), 1.0 / static_cast<double>(i)) << i;
}

TEST(Counterexample, BumpMassesMatchFormulaAndQuadrature)
{
    EXPECT_EQ(counterexample_bump_mass(1), 1.0 / 3.0);
    EXPECT_EQ(counterexample_bump_mass(2), 1.0 / 10.0);
    for (std::size_t i = 1; i <= 10; ++i) {
        const double di = static_cast<double>(i);
        EXPECT_EQ(counterexample_bump_mass(i), 1.0 / (2.0 * di * di + di));
        EXPECT_NEAR(bump_mass_oracle(i), counterexample_bump_mass(i), 1e-14) << i;
    }
    EXPECT_THROW(counterexample_bump_mass(0), InputError);
}

TEST(Counterexample, SeriesTotalAgainstTelescopingOracle)
{
    const SeriesEstimate e = counterexample_l1(1e-4);
    const double oracle = 2.0 * (1.0 - std::numbers::ln2);
    EXPECT_NEAR(e.value(), oracle, 1e-4);
    EXPECT_LE(e.low(), oracle);
    EXPECT_GE(e.high(), oracle);
    EXPECT_NEAR(oracle, 0.613706, 1e-6);
}

TEST(Counterexample, SeriesTotalAgainstDirectIntegration)
{
    // Integrate 2000 cells directly and bound the rest by its mass tail 1/(2 * 2000).
    double direct = 0.0;
    for (std::size_t i = 1; i <= 2000; ++i) direct += bump_mass_oracle(i);
    const double oracle = 2.0 * (1.0 - std::numbers::ln2);
    EXPECT_LE(direct, oracle);
    EXPECT_GE(direct + 1.0 / 4000.0, oracle);
}

TEST(Wiener, CounterexamplePartialSums)
{
    const Density f = catalog_entry("counterexample");
    EXPECT_EQ(wiener_partial_sum(f, 0), 1.0);
    const auto S = wiener_partial_sums(f, 200);
    ASSERT_EQ(S.size(), 201u);
    EXPECT_EQ(S[1], 1.5);  // the i = 1 cell plus the i = 2 cell
    for (std::size_t N = 1; N <= 200; ++N)
        EXPECT_NEAR(S[N] - S[N - 1], 1.0 / static_cast<double>(N + 1), 1e-12) << N;
    double harmonic = 0.0;
    for (std::size_t i = 1; i <= 201; ++i) harmonic += 1.0 / static_cast<double>(i);
    EXPECT_NEAR(S[200], harmonic, 1e-12);
}

TEST(Wiener, GaussianSumsConverge)
{
    const auto S = wiener_partial_sums(catalog_entry("normal"), 40);
    EXPECT_LT(S[40] - S[39], 1e-8);
    EXPECT_LT(S[40] - S[20], 1e-8);
}

TEST(Wiener, RejectsPlanarDensities)
{
    EXPECT_THROW(wiener_partial_sum(catalog_entry("normal2d"), 3), InputError);
}

TEST(ClassV, CauchyCertificateHolds)
{
    const std::vector<double> radii{1, 10, 100, 1000};
    const VCheck v = check_class_V(catalog_entry("cauchy"), 2.0 / std::numbers::pi, 1.0, radii);
    EXPECT_TRUE(v.holds_on_samples);
    EXPECT_FALSE(v.first_violation.has_value());
}

TEST(ClassV, GaussianHoldsWithUnitParameters)
{
    const std::vector<double> radii{1, 2, 4, 8};
    EXPECT_TRUE(check_class_V(catalog_entry("normal"), 1.0, 1.0, radii).holds_on_samples);
    EXPECT_TRUE(check_class_V(catalog_entry("normal2d"), 1.0, 1.0, radii).holds_on_samples);
}

TEST(ClassV, CounterexampleRejectedAcrossTheSweep)
{
    const auto sweep = v_sweep_parameters();
    ASSERT_EQ(sweep.size(), 20u);
    EXPECT_EQ(std::set(sweep.begin(), sweep.end()).size(), 20u);
    std::vector<double> radii;
    for (double r = 1.0; r <= 1024.0; r *= 2.0) radii.push_back(r);
    const Density f = catalog_entry("counterexample");
    for (const auto& [beta, theta] : sweep) {
        const VCheck v = check_class_V(f, beta, theta, radii);
        ASSERT_TRUE(v.first_violation.has_value()) << beta << "," << theta;
        const double x = (*v.first_violation)[0];
        EXPECT_GT(f({x}), beta * std::pow(1.0 + std::abs(x), -1.0 - theta));
    }
}

TEST(C0Tail, CounterexampleTailFollowsPeaks)
{
    const std::vector<double> radii{10.0};
    const auto t = check_c0_tail(catalog_entry("counterexample"), radii);
    ASSERT_EQ(t.size(), 1u);
    EXPECT_NEAR(t[0].second, 1.0 / 11.0, 1e-3);
}

TEST(C0Tail, NonincreasingForCatalogPdfs)
{
    const std::vector<double> radii{1, 2, 4, 8};
    for (const char* name : {"normal", "laplace", "cauchy"}) {
        const auto t = check_c0_tail(catalog_entry(name), radii);
        for (std::size_t i = 1; i < t.size(); ++i) EXPECT_LE(t[i].second, t[i - 1].second) << name;
    }
}

TEST(Catalog, PdfsIntegrateToOneOnTheirDeclaredBox)
{
    for (const Density& f : catalog()) {
        if (!f.flags().is_pdf) continue;
        const double R = *f.declared_box_radius();
        double mass = 0.0;
        if (f.dim() == 1) {
            auto fn = [&](double x) { return f({x}); };
            if (f.name() == "cauchy") {
                boost::math::quadrature::tanh_sinh<double> ts;
                mass = 2.0 * ts.integrate(fn, 0.0, R);
            } else if (f.name() == "uniform") {
                mass = gk(fn, 0.0, 1.0);
            } else {
                mass = gk(fn, -R, 0.0) + gk(fn, 0.0, R);
            }
        } else {
            auto inner = [&](double y) {
                return gk([&](double x) { return f({x, y}); }, -R, 0.0) + gk([&](double x) { return f({x, y}); }, 0.0, R);
            };
            mass = gk(inner, -R, 0.0) + gk(inner, 0.0, R);
        }
        EXPECT_NEAR(mass, 1.0, 1e-6) << f.name();
    }
}

TEST(Catalog, FlagsAndParameters)
{
    const Density ce = catalog_entry("counterexample");
    EXPECT_FALSE(ce.flags().is_pdf);
    EXPECT_TRUE(ce.flags().in_c0);
    const auto v = catalog_entry("cauchy").tail_params();
    ASSERT_TRUE(v.has_value());
    EXPECT_DOUBLE_EQ(v->beta, 2.0 / std::numbers::pi);
    EXPECT_DOUBLE_EQ(v->theta, 1.0);
    EXPECT_FALSE(catalog_entry("uniform").flags().in_c0);
    EXPECT_THROW(catalog_entry("no-such-density"), InputError);
    EXPECT_EQ(catalog_names().size(), catalog().size());
}

TEST(Catalog, SupBoundsAndTailCertificatesHoldOnSamples)
{
    for (const Density& f : catalog()) {
        if (f.dim() != 1) continue;
        const double c = *f.sup_bound();
        for (double x = -50.0; x <= 50.0; x += 1.0 / 64.0) EXPECT_LE(f({x}), c * (1.0 + 1e-15)) << f.name();
        if (const auto v = f.tail_params()) {
            const std::vector<double> radii{1, 4, 16, 64};
            EXPECT_TRUE(check_class_V(f, v->beta, v->theta, radii).holds_on_samples) << f.name();
        }
    }
}

TEST(ClassReport, JsonCarriesEverySection)
{
    const std::vector<double> radii{1, 2};
    const ClassReport r = class_report(catalog_entry("normal"), radii, 5);
    const auto j = r.to_json();
    EXPECT_TRUE(j.contains("c0_tail"));
    EXPECT_TRUE(j.contains("v_check"));
    EXPECT_TRUE(j.contains("wiener_partial_sums"));
    EXPECT_EQ(r.wiener_partial_sums.size(), 6u);
}
