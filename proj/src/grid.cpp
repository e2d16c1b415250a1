#include "mixdense/grid.hpp"

#include <algorithm>
#include <sstream>

#include "mixdense/errors.hpp"

namespace mixdense {

QuadratureGrid::QuadratureGrid(Box box, std::size_t points_per_axis)
    : box_(std::move(box)), ppa_(points_per_axis), size_(1), max_width_(0.0), volume_(1.0)
{
    box_.check();
    if (ppa_ == 0) throw InputError("grid: points_per_axis must be positive");
    for (std::size_t a = 0; a < box_.dim(); ++a) {
        if (size_ > max_nodes / ppa_)
            throw ResourceError("grid: node count exceeds 2^24 (" + std::to_string(ppa_) + "^"
                                + std::to_string(box_.dim()) + ")");
        size_ *= ppa_;
        const double w = box_.width(a) / static_cast<double>(ppa_);
        widths_.push_back(w);
        max_width_ = std::max(max_width_, w);
        volume_ *= w;
    }
}

void QuadratureGrid::node(std::size_t index, std::span<double> out) const
{
    for (std::size_t a = dim(); a-- > 0;) {
        out[a] = axis_node(a, index % ppa_);
        index /= ppa_;
    }
}

Point QuadratureGrid::node(std::size_t index) const
{
    Point p(dim());
    node(index, p);
    return p;
}

std::string QuadratureGrid::descriptor() const
{
    std::ostringstream os;
    os.precision(17);
    for (std::size_t a = 0; a < dim(); ++a) {
        if (a) os << 'x';
        os << '[' << box_.lower[a] << ':' << box_.upper[a] << ']';
    }
    os << '@' << ppa_;
    return os.str();
}

}  // namespace mixdense
