#include "mixdense/mixture.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "mixdense/errors.hpp"
#include "mixdense/summation.hpp"

namespace mixdense {

namespace {

std::string fmt_double(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

Mixture::Mixture(Density kernel, std::vector<Component> components) : kernel_(std::move(kernel))
{
    const std::size_t n = kernel_.dim();
    components_.reserve(components.size());
    for (auto& c : components) {
        if (c.location.size() != n)
            throw InputError("mixture: component location has dimension " + std::to_string(c.location.size())
                             + ", kernel has " + std::to_string(n));
        if (c.weight == 0.0) continue;
        components_.push_back(std::move(c));
    }

    const std::size_t m = components_.size();
    weights_.resize(m);
    locations_.resize(m * n);
    inv_scale_.resize(m);
    inv_scale_pow_.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const Component& c = components_[i];
        weights_[i] = c.weight;
        std::copy(c.location.begin(), c.location.end(), locations_.begin() + static_cast<std::ptrdiff_t>(i * n));
        inv_scale_[i] = 1.0 / c.scale;
        inv_scale_pow_[i] = std::pow(inv_scale_[i], static_cast<double>(n));
    }
    weight_sum_ = compensated_sum(weights_);

    for (std::size_t i = 0; i < m; ++i) {
        const Component& c = components_[i];
        if (!std::isfinite(c.weight) || c.weight < 0.0)
            violations_.push_back({"nonnegative_weight", i + 1, "weight = " + fmt_double(c.weight)});
        if (!(c.scale > 0.0) || !std::isfinite(c.scale))
            violations_.push_back({"positive_scale", i + 1, "nonpositive scale = " + fmt_double(c.scale)});
        for (double v : c.location)
            if (!std::isfinite(v)) {
                violations_.push_back({"finite_location", i + 1, "non-finite location"});
                break;
            }
    }
    if (m == 0)
        violations_.push_back({"nonempty", 0, "mixture has no components"});
    else if (!(std::abs(weight_sum_ - 1.0) <= simplex_tolerance))
        violations_.push_back({"weight_sum", 0, "weight sum = " + fmt_double(weight_sum_)});
}

Mixture Mixture::from_dilation_form(Density kernel, std::span<const double> weights, std::span<const Point> shifts,
                                    std::span<const double> dilations)
{
    if (weights.size() != shifts.size() || weights.size() != dilations.size())
        throw InputError("mixture: weight, shift and dilation lists differ in length");
    std::vector<Component> comps;
    comps.reserve(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double k = dilations[i];
        if (!(k > 0.0)) throw InputError("mixture: dilation must be positive");
        Point mu = shifts[i];
        for (double& v : mu) v /= k;
        comps.push_back({weights[i], std::move(mu), 1.0 / k});
    }
    return Mixture(std::move(kernel), std::move(comps));
}

double Mixture::min_weight() const noexcept
{
    if (weights_.empty()) return std::numeric_limits<double>::quiet_NaN();
    return *std::min_element(weights_.begin(), weights_.end());
}

double Mixture::component_density(std::size_t i, std::span<const double> x) const
{
    const std::size_t n = dim();
    const double* mu = locations_.data() + i * n;
    if (n == 1) {
        const double u = (x[0] - mu[0]) * inv_scale_[i];
        return inv_scale_pow_[i] * kernel_.eval(std::span<const double>(&u, 1));
    }
    std::array<double, 8> small{};
    std::vector<double> big;
    std::span<double> u;
    if (n <= small.size()) {
        u = std::span<double>(small.data(), n);
    } else {
        big.resize(n);
        u = big;
    }
    for (std::size_t a = 0; a < n; ++a) u[a] = (x[a] - mu[a]) * inv_scale_[i];
    return inv_scale_pow_[i] * kernel_.eval(u);
}

double Mixture::sum(std::span<const double> x) const
{
    return pairwise_accumulate(0, size(), [&](std::size_t i) { return weights_[i] * component_density(i, x); });
}

Density Mixture::as_density(std::string name) const
{
    auto self = std::make_shared<const Mixture>(*this);
    if (name.empty()) name = "mixture(" + kernel_.name() + "," + std::to_string(size()) + ")";
    Density d(std::move(name), dim(), [self](std::span<const double> x) { return self->sum(x); });
    ClassFlags fl{};
    fl.is_pdf = valid() && kernel_.flags().is_pdf;
    fl.in_c0 = kernel_.flags().in_c0;
    fl.in_cb = kernel_.flags().in_cb;
    d = d.with_flags(fl);
    if (kernel_.sup_bound() && valid()) {
        double c = 0.0;
        for (std::size_t i = 0; i < size(); ++i) c += weights_[i] * inv_scale_pow_[i];
        d = d.with_sup_bound(c * *kernel_.sup_bound());
    }
    return d;
}

double evaluate_mixture(const Mixture& mix, std::span<const double> x)
{
    if (x.size() != mix.dim())
        throw InputError("evaluate_mixture: point has dimension " + std::to_string(x.size()) + ", mixture has "
                         + std::to_string(mix.dim()));
    if (!mix.valid()) {
        const Violation& v = mix.violations().front();
        throw InvariantError("evaluate_mixture: invalid mixture (" + v.invariant + ": " + v.detail + ")");
    }
    return mix.sum(x);
}

Density dilate_component(const Density& g, double k, std::span<const double> z)
{
    if (!(k > 0.0) || !std::isfinite(k)) throw InputError("dilate_component: k must be positive");
    if (z.size() != g.dim()) throw InputError("dilate_component: shift dimension mismatch");
    if (!g.flags().is_pdf) throw PreconditionError("dilate_component: kernel must be a pdf");
    const std::size_t n = g.dim();
    const double kn = std::pow(k, static_cast<double>(n));
    Point shift(z.begin(), z.end());
    auto fn = [g, k, kn, shift](std::span<const double> x) {
        if (x.size() == 1) {
            const double u = k * x[0] - shift[0];
            return kn * g.eval(std::span<const double>(&u, 1));
        }
        std::vector<double> u(x.size());
        for (std::size_t a = 0; a < x.size(); ++a) u[a] = k * x[a] - shift[a];
        return kn * g.eval(u);
    };
    std::ostringstream name;
    name.precision(17);
    name << g.name() << "_k" << k;
    Density d(name.str(), n, fn);
    d = d.with_flags(g.flags());
    if (g.sup_bound()) d = d.with_sup_bound(kn * *g.sup_bound());
    if (g.support_radius() && euclidean_norm(z) == 0.0) d = d.with_support_radius(*g.support_radius() / k);
    return d;
}

std::vector<Violation> validate_mixture(const Mixture& mix)
{
    return mix.violations();
}

nlohmann::json mixture_to_json(const Mixture& mix)
{
    nlohmann::json comps = nlohmann::json::array();
    for (const Component& c : mix.components())
        comps.push_back({{"c", c.weight}, {"mu", c.location}, {"sigma", c.scale}});
    return {{"kernel", mix.kernel().name()}, {"components", std::move(comps)}};
}

Mixture mixture_from_json(const nlohmann::json& j, const DensityResolver& resolve)
{
    try {
        Density kernel = resolve(j.at("kernel").get<std::string>());
        std::vector<Component> comps;
        for (const auto& c : j.at("components")) {
            if (!c.at("c").is_number() || !c.at("sigma").is_number())
                throw InputError("mixture json: weights and scales must be numbers");
            comps.push_back({c.at("c").get<double>(), c.at("mu").get<Point>(), c.at("sigma").get<double>()});
        }
        return Mixture(std::move(kernel), std::move(comps));
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("mixture json: ") + e.what());
    }
}

}  // namespace mixdense
