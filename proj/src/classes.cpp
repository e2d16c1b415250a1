#include "mixdense/classes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mixdense/errors.hpp"

namespace mixdense {

namespace {

constexpr double v_slack = 1e-12;
constexpr double line_step = 1.0 / 1024.0;
constexpr double plane_step = 1.0 / 32.0;

double normal_pdf(double x)
{
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double tent(double x)
{
    return std::max(0.0, 1.0 - std::abs(x));
}

bool v_violated(double value, double beta, double theta, std::size_t n, double norm)
{
    const double bound = beta * std::pow(1.0 + norm, -static_cast<double>(n) - theta);
    return std::abs(value) > bound * (1.0 + v_slack);
}

// Calls visit(x) for cube-grid samples with prev < |x| <= r, in index order,
// until visit returns true. prev < 0 includes the origin.
template <class Visit>
bool visit_shell(std::size_t n, double prev, double r, const Visit& visit)
{
    if (n == 1) {
        const auto jmax = static_cast<long long>(std::floor(r / line_step));
        for (long long j = 0; j <= jmax; ++j) {
            const double a = static_cast<double>(j) * line_step;
            if (a <= prev) continue;
            if (visit(Point{-a})) return true;
            if (j != 0 && visit(Point{a})) return true;
        }
        return false;
    }
    const auto half = static_cast<long long>(std::floor(r / plane_step));
    const auto side = static_cast<std::size_t>(2 * half + 1);
    std::size_t total = 1;
    for (std::size_t a = 0; a < n; ++a) {
        if (total > (std::size_t{1} << 26) / side) throw ResourceError("class check: sample grid too large");
        total *= side;
    }
    Point x(n);
    for (std::size_t t = 0; t < total; ++t) {
        std::size_t rest = t;
        for (std::size_t a = n; a-- > 0;) {
            x[a] = (static_cast<double>(rest % side) - static_cast<double>(half)) * plane_step;
            rest /= side;
        }
        const double norm = euclidean_norm(x);
        if (norm > r || norm <= prev) continue;
        if (visit(x)) return true;
    }
    return false;
}

std::vector<double> sorted_radii(std::span<const double> radii)
{
    std::vector<double> r(radii.begin(), radii.end());
    for (double v : r)
        if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("radii must be finite and nonnegative");
    std::sort(r.begin(), r.end());
    return r;
}

double cell_sup(const Density& f, double y)
{
    double best = 0.0;
    for (std::size_t j = 0; j < wiener_nodes_per_cell; ++j) {
        const double x = y + static_cast<double>(j) / static_cast<double>(wiener_nodes_per_cell - 1);
        best = std::max(best, std::abs(f.eval(std::span<const double>(&x, 1))));
    }
    return best;
}

}  // namespace

double counterexample_eval(double x)
{
    if (!(x >= 0.0)) return 0.0;
    const double fl = std::floor(x);
    const double i = fl + 1.0;
    const double base = 1.0 - 2.0 * std::abs(x - (i - 0.5));
    if (base <= 0.0) return 0.0;
    return std::pow(base, 2.0 * i) / i;
}

double counterexample_bump_mass(std::size_t i)
{
    if (i == 0) throw InputError("bump index starts at 1");
    const auto d = static_cast<double>(i);
    return 1.0 / (2.0 * d * d + d);
}

SeriesEstimate counterexample_l1(double tolerance)
{
    if (!(tolerance > 0.0)) throw InputError("counterexample_l1: tolerance must be positive");
    SeriesEstimate e;
    // Tail of sum 1/i^2 beyond N is below 1/N.
    const auto N = static_cast<std::size_t>(std::ceil(1.0 / tolerance)) + 1;
    double c = 0.0;
    for (std::size_t i = N; i >= 1; --i) {
        // Smallest terms first.
        const double t = counterexample_bump_mass(i) - c;
        const double s = e.partial_sum + t;
        c = (s - e.partial_sum) - t;
        e.partial_sum = s;
    }
    e.terms = N;
    const auto n = static_cast<double>(N);
    // 1/(2i(i+1)) <= 1/(2i^2+i) <= 1/(2i(i-1)); both sides telescope.
    e.remainder_low = 1.0 / (2.0 * (n + 1.0));
    e.remainder_high = 1.0 / (2.0 * n);
    return e;
}

std::vector<double> wiener_partial_sums(const Density& f, std::size_t N)
{
    if (f.dim() != 1) throw InputError("wiener_partial_sum: only n = 1 densities");
    std::vector<double> s;
    s.reserve(N + 1);
    s.push_back(cell_sup(f, 0.0));
    for (std::size_t y = 1; y <= N; ++y) {
        const auto d = static_cast<double>(y);
        s.push_back(s.back() + cell_sup(f, d) + cell_sup(f, -d));
    }
    return s;
}

double wiener_partial_sum(const Density& f, std::size_t N)
{
    return wiener_partial_sums(f, N).back();
}

VCheck check_class_V(const Density& f, double beta, double theta, std::span<const double> radii)
{
    if (radii.empty()) throw InputError("check_class_V: radii must be nonempty");
    VCheck out;
    out.beta = beta;
    out.theta = theta;
    const std::size_t n = f.dim();
    double prev = -1.0;
    for (double r : sorted_radii(radii)) {
        const bool hit = visit_shell(n, prev, r, [&](const Point& x) {
            if (!v_violated(f.eval(x), beta, theta, n, euclidean_norm(x))) return false;
            out.holds_on_samples = false;
            out.first_violation = x;
            return true;
        });
        if (hit) break;
        prev = r;
    }
    return out;
}

std::vector<std::pair<double, double>> check_c0_tail(const Density& f, std::span<const double> radii,
                                                     std::optional<double> outer)
{
    const auto r = sorted_radii(radii);
    std::vector<std::pair<double, double>> out;
    if (r.empty()) return out;
    const double far = outer ? *outer : 2.0 * r.back() + 8.0;
    for (double R : r) {
        double best = 0.0;
        visit_shell(f.dim(), R, far, [&](const Point& x) {
            best = std::max(best, std::abs(f.eval(x)));
            return false;
        });
        out.emplace_back(R, best);
    }
    return out;
}

std::vector<std::pair<double, double>> v_sweep_parameters()
{
    std::vector<std::pair<double, double>> out;
    for (double beta : {0.5, 1.0, 2.0, 4.0, 8.0})
        for (double theta : {0.5, 1.0, 1.5, 2.0}) out.emplace_back(beta, theta);
    return out;
}

nlohmann::json ClassReport::to_json() const
{
    nlohmann::json j;
    j["c0_tail"] = nlohmann::json::array();
    for (const auto& [r, s] : c0_tail) j["c0_tail"].push_back({{"radius", r}, {"tail_sup", s}});
    j["v_check"] = nlohmann::json::array();
    for (const auto& v : v_check) {
        nlohmann::json e{{"beta", v.beta}, {"theta", v.theta}, {"holds_on_samples", v.holds_on_samples}};
        if (v.first_violation) e["first_violation"] = *v.first_violation;
        j["v_check"].push_back(std::move(e));
    }
    j["wiener_partial_sums"] = wiener_partial_sums;
    return j;
}

ClassReport class_report(const Density& f, std::span<const double> radii, std::size_t wiener_N)
{
    ClassReport r;
    r.c0_tail = check_c0_tail(f, radii);
    for (const auto& [beta, theta] : v_sweep_parameters()) r.v_check.push_back(check_class_V(f, beta, theta, radii));
    if (f.dim() == 1) r.wiener_partial_sums = wiener_partial_sums(f, wiener_N);
    return r;
}

std::vector<Density> catalog()
{
    const double pi = std::numbers::pi;
    std::vector<Density> c;

    c.push_back(Density::scalar("normal", normal_pdf)
                    .with_flags({.is_pdf = true, .in_c0 = true, .in_cc = false, .in_cb = true})
                    .with_sup_bound(normal_pdf(0.0))
                    .with_tail_params({1.0, 1.0})
                    .with_declared_box_radius(10.0));

    c.push_back(Density::scalar("laplace", [](double x) { return 0.5 * std::exp(-std::abs(x)); })
                    .with_flags({.is_pdf = true, .in_c0 = true, .in_cc = false, .in_cb = true})
                    .with_sup_bound(0.5)
                    .with_tail_params({1.0, 1.0})
                    .with_declared_box_radius(40.0));

    c.push_back(Density::scalar("cauchy", [pi](double x) { return 1.0 / (pi * (1.0 + x * x)); })
                    .with_flags({.is_pdf = true, .in_c0 = true, .in_cc = false, .in_cb = true})
                    .with_sup_bound(1.0 / pi)
                    .with_tail_params({2.0 / pi, 1.0})
                    .with_declared_box_radius(1048576.0));

    c.push_back(Density::scalar("triangular", tent)
                    .with_flags({.is_pdf = true, .in_c0 = true, .in_cc = true, .in_cb = true})
                    .with_support_radius(1.0)
                    .with_sup_bound(1.0)
                    .with_tail_params({32.0 / 27.0, 1.0})
                    .with_declared_box_radius(1.0));

    c.push_back(Density::scalar("uniform", [](double x) { return x >= 0.0 && x <= 1.0 ? 1.0 : 0.0; })
                    .with_flags({.is_pdf = true, .in_c0 = false, .in_cc = false, .in_cb = false})
                    .with_support_radius(1.0)
                    .with_sup_bound(1.0)
                    .with_declared_box_radius(1.0));

    c.push_back(Density::scalar("counterexample", counterexample_eval)
                    .with_flags({.is_pdf = false, .in_c0 = true, .in_cc = false, .in_cb = true})
                    .with_sup_bound(1.0));

    c.push_back(Density("normal2d", 2,
                        [](std::span<const double> x) { return normal_pdf(x[0]) * normal_pdf(x[1]); })
                    .with_flags({.is_pdf = true, .in_c0 = true, .in_cc = false, .in_cb = true})
                    .with_sup_bound(1.0 / (2.0 * pi))
                    .with_tail_params({1.0, 1.0})
                    .with_declared_box_radius(10.0));

    c.push_back(Density("triangular2d", 2, [](std::span<const double> x) { return tent(x[0]) * tent(x[1]); })
                    .with_flags({.is_pdf = true, .in_c0 = true, .in_cc = true, .in_cb = true})
                    .with_support_radius(std::numbers::sqrt2)
                    .with_sup_bound(1.0)
                    .with_declared_box_radius(1.0));
    return c;
}

std::vector<std::string> catalog_names()
{
    std::vector<std::string> names;
    for (const auto& d : catalog()) names.push_back(d.name());
    return names;
}

Density catalog_entry(std::string_view name)
{
    for (auto& d : catalog())
        if (d.name() == name) return d;
    throw InputError("unknown catalog density '" + std::string(name) + "'");
}

}  // namespace mixdense
