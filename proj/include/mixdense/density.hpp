#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mixdense {

using Point = std::vector<double>;

/// Axis-aligned box [lower, upper] in R^n.
struct Box {
    std::vector<double> lower;
    std::vector<double> upper;

    static Box cube(std::size_t dim, double lo, double hi);

    std::size_t dim() const noexcept { return lower.size(); }
    double width(std::size_t axis) const { return upper[axis] - lower[axis]; }
    double diameter() const;
    double volume() const;
    bool contains(std::span<const double> x) const;
    /// Image of the box under x -> k x.
    Box scaled(double k) const;
    /// Throws InputError unless lower < upper componentwise.
    void check() const;
};

struct ClassFlags {
    bool is_pdf = false;
    bool in_c0 = false;  // continuous, vanishing at infinity
    bool in_cc = false;  // continuous, compact support
    bool in_cb = false;  // bounded continuous
};

/// Certificate |f(x)| <= beta (1 + |x|_2)^(-n - theta).
struct TailParams {
    double beta;
    double theta;
};

/// An evaluable nonnegative function on R^n plus what is known about it.
///
/// Values are immutable; the `with_*` members return modified copies.
class Density {
public:
    using Fn = std::function<double(std::span<const double>)>;

    Density(std::string name, std::size_t dim, Fn eval);

    /// Convenience for n = 1 densities written against a scalar lambda.
    static Density scalar(std::string name, std::function<double(double)> f);

    const std::string& name() const noexcept { return name_; }
    std::size_t dim() const noexcept { return dim_; }
    const ClassFlags& flags() const noexcept { return flags_; }
    std::optional<double> support_radius() const noexcept { return support_radius_; }
    std::optional<double> sup_bound() const noexcept { return sup_bound_; }
    std::optional<TailParams> tail_params() const noexcept { return tail_; }
    /// Half-width R of the box [-R, R]^n on which the catalog declares the mass.
    std::optional<double> declared_box_radius() const noexcept { return box_radius_; }

    /// Checked evaluation; throws InputError on a dimension mismatch.
    double operator()(std::span<const double> x) const;
    double operator()(std::initializer_list<double> x) const;
    /// Hot-path evaluation without the dimension check.
    double eval(std::span<const double> x) const { return fn_(x); }

    Density with_flags(ClassFlags flags) const;
    Density with_support_radius(double r) const;
    Density with_sup_bound(double c) const;
    Density with_tail_params(TailParams v) const;
    Density with_declared_box_radius(double r) const;
    Density renamed(std::string name) const;

private:
    std::string name_;
    std::size_t dim_;
    Fn fn_;
    ClassFlags flags_{};
    std::optional<double> support_radius_;
    std::optional<double> sup_bound_;
    std::optional<TailParams> tail_;
    std::optional<double> box_radius_;
};

/// The zero function on R^n.
Density zero_density(std::size_t dim);

/// x -> 1_{|x| <= r} f(x); keeps f's bounds, drops pdf status.
Density restrict_to_ball(const Density& f, double r);

double euclidean_norm(std::span<const double> x);

}  // namespace mixdense
