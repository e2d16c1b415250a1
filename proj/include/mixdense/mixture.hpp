#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "mixdense/density.hpp"

namespace mixdense {

/// One term c * sigma^-n * g((x - mu) / sigma) of a location-scale mixture.
struct Component {
    double weight;
    Point location;
    double scale;
};

/// A failed Mixture invariant. `index` is 1-based; 0 refers to the whole mixture.
struct Violation {
    std::string invariant;
    std::size_t index;
    std::string detail;
};

/// Tolerance on |sum c_i - 1| for a mixture to count as a simplex point.
inline constexpr double simplex_tolerance = 1e-12;

/// A finite location-scale mixture of a single kernel density.
///
/// Construction never rejects bad weights or scales; it records them, and
/// `validate_mixture` reports them. Evaluation refuses invalid mixtures.
/// Components whose weight is exactly zero are dropped.
class Mixture {
public:
    Mixture(Density kernel, std::vector<Component> components);

    /// Builds from the dilation form c_i k_i^n g(k_i x - z_i): mu = z / k, sigma = 1 / k.
    static Mixture from_dilation_form(Density kernel, std::span<const double> weights,
                                      std::span<const Point> shifts, std::span<const double> dilations);

    const Density& kernel() const noexcept { return kernel_; }
    std::size_t dim() const noexcept { return kernel_.dim(); }
    std::size_t size() const noexcept { return components_.size(); }
    const std::vector<Component>& components() const noexcept { return components_; }
    const std::vector<Violation>& violations() const noexcept { return violations_; }
    bool valid() const noexcept { return violations_.empty(); }

    /// Compensated sum of the weights.
    double weight_sum() const noexcept { return weight_sum_; }
    double min_weight() const noexcept;

    /// Sum of c_i sigma_i^-n g((x - mu_i)/sigma_i) without the validity check.
    double sum(std::span<const double> x) const;
    /// Single term i without its weight: sigma_i^-n g((x - mu_i)/sigma_i).
    double component_density(std::size_t i, std::span<const double> x) const;

    /// The mixture as a Density (shares this mixture's immutable state).
    Density as_density(std::string name = {}) const;

private:
    Density kernel_;
    std::vector<Component> components_;
    std::vector<double> weights_;
    std::vector<double> locations_;  // flattened, size() * dim()
    std::vector<double> inv_scale_;
    std::vector<double> inv_scale_pow_;
    std::vector<Violation> violations_;
    double weight_sum_ = 0.0;
};

/// h(x) = sum c_i sigma_i^-n g((x - mu_i)/sigma_i). Throws InputError on a dimension
/// mismatch and InvariantError if the mixture is not a valid simplex mixture.
double evaluate_mixture(const Mixture& mix, std::span<const double> x);

/// x -> k^n g(k x - z). Requires g.is_pdf and k > 0.
Density dilate_component(const Density& g, double k, std::span<const double> z);

/// Every violated Mixture invariant; empty iff the mixture is valid.
std::vector<Violation> validate_mixture(const Mixture& mix);

using DensityResolver = std::function<Density(std::string_view)>;

/// {kernel: name, components: [{c, mu: [...], sigma}]}
nlohmann::json mixture_to_json(const Mixture& mix);
Mixture mixture_from_json(const nlohmann::json& j, const DensityResolver& resolve);

}  // namespace mixdense
