#include "mixdense/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "mixdense/errors.hpp"
#include "mixdense/kernels.hpp"
#include "mixdense/summation.hpp"

namespace mixdense {

namespace {

void check_p(double p)
{
    if (!(p >= 1.0)) throw InputError("p must be at least 1");
}

void check_dims(const Density& f, const QuadratureGrid& grid)
{
    if (f.dim() != grid.dim())
        throw InputError("density '" + f.name() + "' has dimension " + std::to_string(f.dim()) + ", grid has "
                         + std::to_string(grid.dim()));
}

void check_values(std::span<const double> a, const QuadratureGrid& grid)
{
    if (a.size() != grid.size()) throw InputError("value array does not match the grid");
}

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

std::string NormReport::csv_header()
{
    return "grid,p,l1,l2,lp,linf,kl";
}

std::string NormReport::csv_row() const
{
    return grid + "," + fmt(p) + "," + fmt(l1) + "," + fmt(l2) + "," + fmt(lp) + "," + fmt(linf) + ","
           + (kl ? fmt(*kl) : std::string());
}

double lp_distance_values(std::span<const double> a, std::span<const double> b, double p,
                          const QuadratureGrid& grid)
{
    check_p(p);
    check_values(a, grid);
    check_values(b, grid);
    if (std::isinf(p)) return kernels::max_abs_diff(a, b);
    const double s = kernels::pow_sum(a, b, p) * grid.cell_volume();
    if (p == 1.0) return s;
    if (p == 2.0) return std::sqrt(s);
    return std::pow(s, 1.0 / p);
}

double lp_norm_values(std::span<const double> a, double p, const QuadratureGrid& grid)
{
    const std::vector<double> zero(a.size(), 0.0);
    return lp_distance_values(a, zero, p, grid);
}

double linf_distance_values(std::span<const double> a, std::span<const double> b)
{
    return kernels::max_abs_diff(a, b);
}

double kl_divergence_values(std::span<const double> f, std::span<const double> h, const QuadratureGrid& grid,
                            double floor)
{
    if (!(floor > 0.0)) throw InputError("kl_divergence: floor must be positive");
    check_values(f, grid);
    check_values(h, grid);
    const double s = pairwise_accumulate(0, f.size(), [&](std::size_t i) {
        if (!(f[i] > 0.0)) return 0.0;
        return f[i] * std::log(f[i] / std::max(h[i], floor));
    });
    return s * grid.cell_volume();
}

double integral_values(std::span<const double> a, const QuadratureGrid& grid)
{
    check_values(a, grid);
    return pairwise_sum(a) * grid.cell_volume();
}

NormReport norm_report_values(std::span<const double> f, std::span<const double> h, const QuadratureGrid& grid,
                              double p, bool with_kl)
{
    NormReport r;
    r.grid = grid.descriptor();
    r.p = p;
    r.l1 = lp_distance_values(f, h, 1.0, grid);
    r.l2 = lp_distance_values(f, h, 2.0, grid);
    r.lp = lp_distance_values(f, h, p, grid);
    r.linf = linf_distance_values(f, h);
    if (with_kl) r.kl = kl_divergence_values(f, h, grid);
    return r;
}

double lp_distance(const Density& f, const Density& h, double p, const QuadratureGrid& grid)
{
    check_p(p);
    check_dims(f, grid);
    check_dims(h, grid);
    return lp_distance_values(kernels::tabulate(f, grid), kernels::tabulate(h, grid), p, grid);
}

double lp_norm(const Density& f, double p, const QuadratureGrid& grid)
{
    check_p(p);
    check_dims(f, grid);
    return lp_norm_values(kernels::tabulate(f, grid), p, grid);
}

double linf_distance(const Density& f, const Density& h, const QuadratureGrid& grid)
{
    check_dims(f, grid);
    check_dims(h, grid);
    return linf_distance_values(kernels::tabulate(f, grid), kernels::tabulate(h, grid));
}

double kl_divergence(const Density& f, const Density& h, const QuadratureGrid& grid, double floor)
{
    if (!(floor > 0.0)) throw InputError("kl_divergence: floor must be positive");
    check_dims(f, grid);
    check_dims(h, grid);
    return kl_divergence_values(kernels::tabulate(f, grid), kernels::tabulate(h, grid), grid, floor);
}

double integral(const Density& f, const QuadratureGrid& grid)
{
    check_dims(f, grid);
    return integral_values(kernels::tabulate(f, grid), grid);
}

NormReport norm_report(const Density& f, const Density& h, const QuadratureGrid& grid, double p, bool with_kl)
{
    check_p(p);
    check_dims(f, grid);
    check_dims(h, grid);
    return norm_report_values(kernels::tabulate(f, grid), kernels::tabulate(h, grid), grid, p, with_kl);
}

double unit_sphere_area(std::size_t n)
{
    const double h = static_cast<double>(n) / 2.0;
    return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

double unit_ball_volume(std::size_t n)
{
    const double h = static_cast<double>(n) / 2.0;
    return std::pow(std::numbers::pi, h) / std::tgamma(h + 1.0);
}

double tail_mass_bound(const TailParams& v, std::size_t n, double rho)
{
    return unit_sphere_area(n) * v.beta * std::pow(1.0 + std::max(rho, 0.0), -v.theta) / v.theta;
}

ConvolutionValue convolve_dilated(const Density& g, double k, const Density& f, std::span<const double> x,
                                  const QuadratureGrid& grid)
{
    if (!(k > 0.0)) throw InputError("convolve_dilated: k must be positive");
    if (!g.flags().is_pdf) throw PreconditionError("convolve_dilated: kernel must be a pdf");
    check_dims(g, grid);
    check_dims(f, grid);
    if (x.size() != grid.dim()) throw InputError("convolve_dilated: point dimension mismatch");

    const std::size_t n = grid.dim();
    const double kn = std::pow(k, static_cast<double>(n));
    Point y(n);
    Point u(n);
    std::vector<double> kernel_terms(grid.size());
    std::vector<double> product_terms(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        grid.node(j, y);
        for (std::size_t a = 0; a < n; ++a) u[a] = k * (x[a] - y[a]);
        const double w = kn * g.eval(u);
        kernel_terms[j] = w;
        product_terms[j] = w == 0.0 ? 0.0 : w * f.eval(y);
    }
    ConvolutionValue out;
    out.value = pairwise_sum(product_terms) * grid.cell_volume();
    out.coverage = pairwise_sum(kernel_terms) * grid.cell_volume();
    out.truncated = out.coverage < 1.0 - 1e-6;

    if (g.tail_params() && f.sup_bound()) {
        double d = std::numeric_limits<double>::infinity();
        const Box& b = grid.box();
        for (std::size_t a = 0; a < n; ++a) d = std::min({d, x[a] - b.lower[a], b.upper[a] - x[a]});
        out.tail_bound = *f.sup_bound() * tail_mass_bound(*g.tail_params(), n, k * std::max(d, 0.0));
    }
    return out;
}

std::vector<double> convolve_dilated_on_grid(const Density& g, double k, std::span<const double> h,
                                             const QuadratureGrid& grid)
{
    if (!g.flags().is_pdf) throw PreconditionError("convolve_dilated: kernel must be a pdf");
    const auto table = kernels::dilated_kernel_table(g, k, grid);
    return kernels::convolve_table(table, h, grid);
}

bool kernel_resolved(double k, const QuadratureGrid& grid)
{
    return k * grid.max_cell_width() <= 1.0;
}

double modulus_of_continuity_values(std::span<const double> values, double delta, const QuadratureGrid& grid)
{
    if (!(delta >= 0.0)) throw InputError("modulus_of_continuity: delta must be nonnegative");
    check_values(values, grid);
    const std::size_t n = grid.dim();
    const std::size_t ppa = grid.points_per_axis();
    double best = 0.0;
    std::size_t stride = grid.size();
    for (std::size_t a = 0; a < n; ++a) {
        stride /= ppa;
        // Floor keeps every compared pair within distance delta.
        const auto steps = static_cast<std::size_t>(
            std::min(std::floor(delta / grid.cell_width(a)), static_cast<double>(ppa - 1)));
        for (std::size_t s = 1; s <= steps; ++s) {
            for (std::size_t i = 0; i < values.size(); ++i) {
                const std::size_t coord = (i / stride) % ppa;
                if (coord + s >= ppa) continue;
                best = std::max(best, std::abs(values[i] - values[i + s * stride]));
            }
        }
    }
    return best;
}

double modulus_of_continuity(const Density& f, double delta, const QuadratureGrid& grid)
{
    if (!(delta >= 0.0)) throw InputError("modulus_of_continuity: delta must be nonnegative");
    check_dims(f, grid);
    return modulus_of_continuity_values(kernels::tabulate(f, grid), delta, grid);
}

YoungsResult youngs_check(const Density& g, const Density& f, double p, const QuadratureGrid& grid)
{
    check_p(p);
    check_dims(g, grid);
    check_dims(f, grid);
    if (!g.flags().is_pdf) throw PreconditionError("youngs_check: kernel must be a pdf");
    const auto fv = kernels::tabulate(f, grid);
    const auto conv = convolve_dilated_on_grid(g, 1.0, fv, grid);
    YoungsResult r;
    r.lhs = lp_norm_values(conv, p, grid);
    r.rhs = lp_norm_values(fv, p, grid);
    r.holds = r.lhs <= r.rhs + youngs_tolerance;
    return r;
}

std::vector<double> approximate_identity_errors(const Density& g, const Density& f, std::span<const double> ks,
                                                const QuadratureGrid& grid)
{
    check_dims(g, grid);
    check_dims(f, grid);
    const auto fv = kernels::tabulate(f, grid);
    std::vector<double> out;
    out.reserve(ks.size());
    for (double k : ks) out.push_back(linf_distance_values(convolve_dilated_on_grid(g, k, fv, grid), fv));
    return out;
}

}  // namespace mixdense
