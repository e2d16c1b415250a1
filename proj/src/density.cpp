#include "mixdense/density.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "mixdense/errors.hpp"

namespace mixdense {

Box Box::cube(std::size_t dim, double lo, double hi)
{
    return Box{std::vector<double>(dim, lo), std::vector<double>(dim, hi)};
}

double Box::diameter() const
{
    double s = 0.0;
    for (std::size_t a = 0; a < dim(); ++a) s += width(a) * width(a);
    return std::sqrt(s);
}

double Box::volume() const
{
    double v = 1.0;
    for (std::size_t a = 0; a < dim(); ++a) v *= width(a);
    return v;
}

bool Box::contains(std::span<const double> x) const
{
    if (x.size() != dim()) return false;
    for (std::size_t a = 0; a < dim(); ++a)
        if (x[a] < lower[a] || x[a] > upper[a]) return false;
    return true;
}

Box Box::scaled(double k) const
{
    Box b = *this;
    for (std::size_t a = 0; a < dim(); ++a) {
        b.lower[a] *= k;
        b.upper[a] *= k;
    }
    return b;
}

void Box::check() const
{
    if (lower.empty() || lower.size() != upper.size())
        throw InputError("box: corners must be nonempty and of equal dimension");
    for (std::size_t a = 0; a < dim(); ++a)
        if (!(lower[a] < upper[a]) || !std::isfinite(lower[a]) || !std::isfinite(upper[a]))
            throw InputError("box: need finite lower < upper on every axis");
}

Density::Density(std::string name, std::size_t dim, Fn eval)
    : name_(std::move(name)), dim_(dim), fn_(std::move(eval))
{
    if (dim_ == 0) throw InputError("density: dimension must be positive");
    if (!fn_) throw InputError("density: empty evaluation function");
}

Density Density::scalar(std::string name, std::function<double(double)> f)
{
    return Density(std::move(name), 1, [f = std::move(f)](std::span<const double> x) { return f(x[0]); });
}

double Density::operator()(std::span<const double> x) const
{
    if (x.size() != dim_)
        throw InputError("density '" + name_ + "': expected dimension " + std::to_string(dim_) + ", got "
                         + std::to_string(x.size()));
    return fn_(x);
}

double Density::operator()(std::initializer_list<double> x) const
{
    return (*this)(std::span<const double>(x.begin(), x.size()));
}

Density Density::with_flags(ClassFlags flags) const
{
    Density d = *this;
    d.flags_ = flags;
    return d;
}

Density Density::with_support_radius(double r) const
{
    if (!(r >= 0.0)) throw InputError("density: support radius must be nonnegative");
    Density d = *this;
    d.support_radius_ = r;
    return d;
}

Density Density::with_sup_bound(double c) const
{
    if (!(c >= 0.0)) throw InputError("density: sup bound must be nonnegative");
    Density d = *this;
    d.sup_bound_ = c;
    return d;
}

Density Density::with_tail_params(TailParams v) const
{
    if (!(v.beta > 0.0) || !(v.theta > 0.0)) throw InputError("density: tail parameters must be positive");
    Density d = *this;
    d.tail_ = v;
    return d;
}

Density Density::with_declared_box_radius(double r) const
{
    if (!(r > 0.0)) throw InputError("density: declared box radius must be positive");
    Density d = *this;
    d.box_radius_ = r;
    return d;
}

Density Density::renamed(std::string name) const
{
    Density d = *this;
    d.name_ = std::move(name);
    return d;
}

Density zero_density(std::size_t dim)
{
    return Density("zero", dim, [](std::span<const double>) { return 0.0; })
        .with_flags({.is_pdf = false, .in_c0 = true, .in_cc = true, .in_cb = true})
        .with_support_radius(0.0)
        .with_sup_bound(0.0);
}

Density restrict_to_ball(const Density& f, double r)
{
    auto fn = [f, r](std::span<const double> x) { return euclidean_norm(x) <= r ? f.eval(x) : 0.0; };
    Density h(f.name() + "|B" + std::to_string(r), f.dim(), fn);
    // The cut at |x| = r is generally a jump, so no continuity class survives.
    h = h.with_flags({}).with_support_radius(f.support_radius() ? std::min(*f.support_radius(), r) : r);
    if (f.sup_bound()) h = h.with_sup_bound(*f.sup_bound());
    return h;
}

double euclidean_norm(std::span<const double> x)
{
    if (x.size() == 1) return std::abs(x[0]);
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

}  // namespace mixdense
