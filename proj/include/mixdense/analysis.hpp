#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mixdense/density.hpp"
#include "mixdense/grid.hpp"

namespace mixdense {

/// Distances between two functions on one grid. `linf` is a grid-sup and hence
/// a lower bound on the true sup-norm over the box.
struct NormReport {
    std::string grid;
    double p = 2.0;
    double l1 = 0.0;
    double l2 = 0.0;
    double lp = 0.0;
    double linf = 0.0;
    std::optional<double> kl;

    static std::string csv_header();
    std::string csv_row() const;
};

inline constexpr double default_kl_floor = 1e-300;
inline constexpr double youngs_tolerance = 1e-4;

/// (integral over the box of |f - h|^p)^(1/p) by the midpoint rule.
double lp_distance(const Density& f, const Density& h, double p, const QuadratureGrid& grid);
double lp_norm(const Density& f, double p, const QuadratureGrid& grid);
double linf_distance(const Density& f, const Density& h, const QuadratureGrid& grid);
/// Integral of f log(f / max(h, floor)); nodes with f <= 0 contribute nothing.
double kl_divergence(const Density& f, const Density& h, const QuadratureGrid& grid,
                     double floor = default_kl_floor);
double integral(const Density& f, const QuadratureGrid& grid);

// The same quantities on node values already tabulated on `grid`.
double lp_distance_values(std::span<const double> a, std::span<const double> b, double p,
                          const QuadratureGrid& grid);
double lp_norm_values(std::span<const double> a, double p, const QuadratureGrid& grid);
double linf_distance_values(std::span<const double> a, std::span<const double> b);
double kl_divergence_values(std::span<const double> f, std::span<const double> h, const QuadratureGrid& grid,
                            double floor = default_kl_floor);
double integral_values(std::span<const double> a, const QuadratureGrid& grid);

NormReport norm_report_values(std::span<const double> f, std::span<const double> h, const QuadratureGrid& grid,
                              double p, bool with_kl);
NormReport norm_report(const Density& f, const Density& h, const QuadratureGrid& grid, double p, bool with_kl);

/// Surface area of the unit sphere in R^n, 2 pi^(n/2) / Gamma(n/2).
double unit_sphere_area(std::size_t n);
/// Volume of the unit ball in R^n.
double unit_ball_volume(std::size_t n);
/// Bound on the mass of a tail-certified density outside the ball of radius rho:
/// A_n beta (1 + rho)^(-theta) / theta.
double tail_mass_bound(const TailParams& v, std::size_t n, double rho);

struct ConvolutionValue {
    double value = 0.0;
    /// Kernel mass seen by the grid from x; below 1 means the box truncated it.
    double coverage = 0.0;
    bool truncated = false;
    /// sup f times the kernel tail mass beyond the box, when both are known.
    std::optional<double> tail_bound;
};

/// Midpoint approximation of the integral of k^n g(k(x - y)) f(y) over the grid box.
ConvolutionValue convolve_dilated(const Density& g, double k, const Density& f, std::span<const double> x,
                                  const QuadratureGrid& grid);

/// g_k * h at every node, h given by node values (cell-averaged kernel table).
std::vector<double> convolve_dilated_on_grid(const Density& g, double k, std::span<const double> h,
                                             const QuadratureGrid& grid);

/// True when the dilated kernel is at least one grid cell wide (k dx <= 1).
bool kernel_resolved(double k, const QuadratureGrid& grid);

/// Largest |f(x) - f(y)| over node pairs along one axis at distance <= delta.
double modulus_of_continuity(const Density& f, double delta, const QuadratureGrid& grid);
double modulus_of_continuity_values(std::span<const double> values, double delta, const QuadratureGrid& grid);

struct YoungsResult {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

/// Compares |g * f|_p with |g|_1 |f|_p = |f|_p; p may be +infinity (grid-sup).
YoungsResult youngs_check(const Density& g, const Density& f, double p, const QuadratureGrid& grid);

/// e_k = grid-sup |g_k * f - f| for each k.
std::vector<double> approximate_identity_errors(const Density& g, const Density& f, std::span<const double> ks,
                                                const QuadratureGrid& grid);

}  // namespace mixdense
