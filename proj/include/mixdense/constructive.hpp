#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mixdense/analysis.hpp"
#include "mixdense/deadline.hpp"
#include "mixdense/density.hpp"
#include "mixdense/grid.hpp"
#include "mixdense/mixture.hpp"

namespace mixdense {

struct Truncation {
    int r = 0;
    Density truncated;
    /// Quadrature estimate of the mass of f outside the closed ball of radius r.
    double tail_mass = 0.0;
};

inline constexpr int default_truncation_cap = 64;

/// Smallest integer r >= 1 with tail mass of f outside B_r at most epsilon.
Truncation truncate_to_ball(const Density& f, double epsilon, const QuadratureGrid& grid,
                            int r_cap = default_truncation_cap);

struct Cutoff {
    Density h;
    double R = 0.0;
    /// Grid-sup of f outside B_R.
    double outside_sup = 0.0;
};

/// h = psi f with psi a linear ramp from 1 on B_R to 0 outside B_{R+1}.
Density compact_cutoff(const Density& f, double epsilon, const QuadratureGrid& grid);
Cutoff compact_cutoff_detail(const Density& f, double epsilon, const QuadratureGrid& grid);

/// Regular axis-aligned cells of edge delta / sqrt(n) covering k K, clipped to k K.
class Partition {
public:
    static constexpr std::size_t max_cells = 1000000;

    Partition(Box scaled_set, double delta);

    const Box& scaled_set() const noexcept { return scaled_; }
    double delta() const noexcept { return delta_; }
    std::size_t dim() const noexcept { return scaled_.dim(); }
    std::size_t size() const noexcept { return size_; }
    std::size_t cells_along(std::size_t axis) const { return edges_[axis].size() - 1; }

    Box cell(std::size_t i) const;
    Point rep(std::size_t i) const;
    double cell_diameter(std::size_t i) const;

private:
    // Per-axis multi-index of cell i, axis 0 slowest.
    std::vector<std::size_t> index(std::size_t i) const;

    Box scaled_;
    double delta_;
    std::vector<std::vector<double>> edges_;
    std::size_t size_ = 1;
};

Partition build_partition(const Box& K_box, double k, double delta);

struct ConstructionTrace {
    std::string mode;
    double epsilon = 0.0;
    double r = 0.0;
    double k = 0.0;
    double delta = 0.0;
    std::size_t m = 0;
    double remainder_weight = 0.0;
    NormReport measured;
    /// max |f - h| over the seeded random points.
    double pointwise_max = 0.0;
    /// Fraction of grid nodes with |f - h| >= 0.05.
    double measure_frac = 0.0;
    /// Mode-specific analytic tail bound (see the pipeline docs).
    double tail_bound = 0.0;
    /// Analytic tail-leak bound including the |1_K f| lambda(K) factor (l1 mode).
    double tail_bound_with_factor = 0.0;
    /// Grid-sup of g_k * h - h (uniform, compact) or L1 of it (l1) at the chosen k.
    double smoothing_error = 0.0;
    /// True when the smoothing predicate was last measured at a smaller, resolved k.
    bool smoothing_extrapolated = false;
    /// sup over measurement nodes of |R_delta - R_{delta/2}| at the accepted delta.
    double refinement_change = 0.0;
    /// w(g, delta) k^n: the proof's analytic Riemann bound, for reference.
    double analytic_riemann_bound = 0.0;
    std::string notes;

    std::string summary() const;
};

struct Construction {
    Mixture mixture;
    ConstructionTrace trace;
};

/// Cell weights c_i = integral of h over A_i / k, one component per cell at z_i / k
/// with scale 1 / k, plus a remainder 1 - sum c_i at scale (2 c_m C / epsilon)^(1/n).
Construction riemann_mixture(const Density& h, const Density& g, double k, const Partition& part, double epsilon);

struct PipelineOptions {
    Deadline deadline;
    /// Largest power of two tried for k; each pipeline has its own default.
    std::optional<double> k_cap;
    /// Seed for the pointwise proxy points.
    unsigned long long seed = 20240611;
    std::size_t pointwise_samples = 100;
};

Construction uniform_approximate(const Density& f, const Density& g, double epsilon, const QuadratureGrid& grid,
                                 const PipelineOptions& options = {});
Construction compact_uniform_approximate(const Density& f, const Density& g, const Box& K_box, double epsilon,
                                         const QuadratureGrid& grid, const PipelineOptions& options = {});
Construction l1_approximate(const Density& f, const Density& g, double epsilon, double gamma,
                            const QuadratureGrid& grid, const PipelineOptions& options = {});

}  // namespace mixdense
