#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "mixdense/density.hpp"

namespace mixdense {

/// Tensor midpoint rule on a box: the numerical stand-in for Lebesgue measure.
///
/// Nodes are cell midpoints, numbered row-major with axis 0 slowest.
class QuadratureGrid {
public:
    /// Total node guard; larger grids raise ResourceError.
    static constexpr std::size_t max_nodes = std::size_t{1} << 24;

    QuadratureGrid(Box box, std::size_t points_per_axis);

    const Box& box() const noexcept { return box_; }
    std::size_t dim() const noexcept { return box_.dim(); }
    std::size_t points_per_axis() const noexcept { return ppa_; }
    std::size_t size() const noexcept { return size_; }
    double cell_width(std::size_t axis) const { return widths_[axis]; }
    double max_cell_width() const noexcept { return max_width_; }
    double cell_volume() const noexcept { return volume_; }

    /// Midpoint of cell j along one axis.
    double axis_node(std::size_t axis, std::size_t j) const
    {
        return box_.lower[axis] + (static_cast<double>(j) + 0.5) * widths_[axis];
    }

    /// Writes the coordinates of node `index` into `out` (size dim()).
    void node(std::size_t index, std::span<double> out) const;
    Point node(std::size_t index) const;

    /// Text form "lo:hi x ... @ppa", used in CSV rows.
    std::string descriptor() const;

private:
    Box box_;
    std::size_t ppa_;
    std::size_t size_;
    std::vector<double> widths_;
    double max_width_;
    double volume_;
};

}  // namespace mixdense
