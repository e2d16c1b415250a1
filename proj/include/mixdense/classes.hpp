#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "mixdense/density.hpp"

namespace mixdense {

/// The continuous, integrable, non-Wiener function built from bumps
/// (1 - 2|x - (i - 1/2)|)^(2i) / i on [i - 1, i); zero for x < 0.
double counterexample_eval(double x);

/// Exact mass 1 / (2 i^2 + i) of bump i.
double counterexample_bump_mass(std::size_t i);

struct SeriesEstimate {
    double partial_sum = 0.0;
    std::size_t terms = 0;
    /// Certified bounds on the omitted tail.
    double remainder_low = 0.0;
    double remainder_high = 0.0;

    double value() const { return partial_sum + 0.5 * (remainder_low + remainder_high); }
    double low() const { return partial_sum + remainder_low; }
    double high() const { return partial_sum + remainder_high; }
};

/// Sums bump masses until the 1/i^2 tail bound drops below `tolerance`.
SeriesEstimate counterexample_l1(double tolerance);

inline constexpr std::size_t wiener_nodes_per_cell = 1025;

/// sum over y = -N..N of max over 1025 nodes of [0, 1] of |f(x + y)|.
double wiener_partial_sum(const Density& f, std::size_t N);
/// S_0, ..., S_N in one pass.
std::vector<double> wiener_partial_sums(const Density& f, std::size_t N);

struct VCheck {
    double beta = 0.0;
    double theta = 0.0;
    bool holds_on_samples = true;
    std::optional<Point> first_violation;
};

/// Samples |f(x)| <= beta (1 + |x|)^(-n - theta) out to each radius.
VCheck check_class_V(const Density& f, double beta, double theta, std::span<const double> radii);

/// (R, grid-sup of |f| over R < |x| <= outer) for each R.
std::vector<std::pair<double, double>> check_c0_tail(const Density& f, std::span<const double> radii,
                                                     std::optional<double> outer = std::nullopt);

/// Swept tail parameters for the class-V rejection check.
std::vector<std::pair<double, double>> v_sweep_parameters();

struct ClassReport {
    std::vector<std::pair<double, double>> c0_tail;
    std::vector<VCheck> v_check;
    std::vector<double> wiener_partial_sums;

    nlohmann::json to_json() const;
};

ClassReport class_report(const Density& f, std::span<const double> radii, std::size_t wiener_N);

/// Built-in densities.
std::vector<Density> catalog();
/// Catalog lookup by name; throws InputError for unknown names.
Density catalog_entry(std::string_view name);
std::vector<std::string> catalog_names();

}  // namespace mixdense
