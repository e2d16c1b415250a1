#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mixdense/deadline.hpp"
#include "mixdense/density.hpp"
#include "mixdense/grid.hpp"
#include "mixdense/mixture.hpp"

namespace mixdense {

/// C_p = 1 for 1 <= p <= 2, sqrt(2) [sqrt(pi) Gamma((p + 1) / 2)]^(1/p) for p > 2.
double donahue_constant(double p);

/// The dilates k^n g(k(x - mu)) for mu in a finite candidate set.
struct DictionarySpec {
    Density kernel;
    double k;
    std::vector<Point> candidate_locations;

    /// Throws InputError unless k > 0 and the candidates are nonempty and of the kernel's dimension.
    void check() const;
};

/// `count` evenly spaced points from lo to hi inclusive along every axis.
std::vector<Point> linspace_candidates(std::size_t dim, double lo, double hi, std::size_t count);

struct GreedyStep {
    std::size_t m = 0;
    Point mu;
    double step_size = 0.0;
    double lp_error = 0.0;
};

struct GreedyTrace {
    std::vector<GreedyStep> steps;
    double K_bound = 0.0;
    double C_p = 0.0;
    double alpha = 0.0;
    double p = 2.0;
    double k = 0.0;
    bool stopped_early = false;

    /// step,mu,step_size,lp_error rows plus a K,C_p,alpha footer.
    std::string to_csv() const;
};

struct GreedyFit {
    Mixture mixture;
    GreedyTrace trace;
};

inline constexpr double greedy_stop_error = 1e-10;
inline constexpr double golden_tolerance = 1e-10;

/// Relaxed convex greedy on the grid: h_1 is the best single dilate, then
/// h_m = (1 - a) h_{m-1} + a d with the best (d, a) per step.
GreedyFit greedy_convex_fit(const Density& f, const DictionarySpec& dict, double p, std::size_t m_max,
                            const QuadratureGrid& grid, const Deadline& deadline = {});
/// Called after each accepted step with m and the iterate's node values.
using GreedyObserver = std::function<void(std::size_t, std::span<const double>)>;

/// Same, against a target given by node values.
GreedyFit greedy_convex_fit_values(std::span<const double> target, const DictionarySpec& dict, double p,
                                   std::size_t m_max, const QuadratureGrid& grid, const Deadline& deadline = {},
                                   const GreedyObserver& observe = {});

struct Smoothing {
    double k = 0.0;
    /// |f - g_k * f|_p on the grid.
    double lp_error = 0.0;
    std::vector<double> smoothed;
    std::string descriptor;
};

inline constexpr double smoothing_k_cap = 4096.0;

/// Smallest power-of-two k with |f - g_k * f|_p < epsilon / 2.
Smoothing target_smoothing(const Density& f, const Density& g, double epsilon, const QuadratureGrid& grid,
                           double p = 2.0);
/// g_k * f on the grid for a given k.
Smoothing smooth_target(const Density& f, const Density& g, double k, const QuadratureGrid& grid, double p = 2.0);

struct RateCheck {
    bool holds = false;
    double worst_ratio = 0.0;
};

/// error(m) <= C_p K m^-(1 - 1/alpha) at every step.
RateCheck rate_bound_check(const GreedyTrace& trace, double p);
double rate_bound(const GreedyTrace& trace, std::size_t m);

/// Least-squares slope of log error against log m over steps with lo <= m <= hi.
double loglog_slope(const GreedyTrace& trace, std::size_t lo, std::size_t hi);

}  // namespace mixdense
