#include "mixdense/constructive.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

#include "mixdense/errors.hpp"
#include "mixdense/kernels.hpp"
#include "mixdense/summation.hpp"

namespace mixdense {

namespace {

constexpr double remainder_drop = 1e-14;
constexpr double overfull_rescale = 1e-9;
constexpr double negative_weight_tol = 1e-12;
constexpr double measure_threshold = 0.05;
constexpr double uniform_k_cap = 256.0;
constexpr double l1_k_cap = 1048576.0;
constexpr int compact_r_cap = 4096;

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

void require_pdf_kernel(const Density& g, const char* where)
{
    if (!g.flags().is_pdf) throw PreconditionError(std::string(where) + ": kernel must be a pdf");
    if (!g.sup_bound()) throw PreconditionError(std::string(where) + ": kernel needs a sup bound C");
}

void require_dims(const Density& a, const Density& b, const QuadratureGrid& grid, const char* where)
{
    if (a.dim() != grid.dim() || b.dim() != grid.dim())
        throw InputError(std::string(where) + ": density, kernel and grid dimensions differ");
}

void require_epsilon(double epsilon, const char* where)
{
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw InputError(std::string(where) + ": epsilon must be positive");
}

std::vector<double> node_norms(const QuadratureGrid& grid)
{
    std::vector<double> out(grid.size());
    Point x(grid.dim());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid.node(i, x);
        out[i] = euclidean_norm(x);
    }
    return out;
}

std::vector<std::size_t> nodes_where(const QuadratureGrid& grid, const std::function<bool(const Point&)>& keep)
{
    std::vector<std::size_t> out;
    Point x(grid.dim());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid.node(i, x);
        if (keep(x)) out.push_back(i);
    }
    return out;
}

std::vector<double> node_coordinates(const QuadratureGrid& grid, std::span<const std::size_t> nodes)
{
    const std::size_t n = grid.dim();
    std::vector<double> out(nodes.size() * n);
    for (std::size_t q = 0; q < nodes.size(); ++q) grid.node(nodes[q], std::span<double>(out).subspan(q * n, n));
    return out;
}

std::vector<double> gather(std::span<const double> v, std::span<const std::size_t> nodes)
{
    std::vector<double> out(nodes.size());
    for (std::size_t q = 0; q < nodes.size(); ++q) out[q] = v[nodes[q]];
    return out;
}

double half_extent(const Box& b)
{
    double r = 0.0;
    for (std::size_t a = 0; a < b.dim(); ++a) r = std::max({r, std::abs(b.lower[a]), std::abs(b.upper[a])});
    return r;
}

double inner_radius(const Box& b)
{
    double r = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < b.dim(); ++a) r = std::min({r, -b.lower[a], b.upper[a]});
    return std::max(r, 0.0);
}

double sub_cell_points(std::size_t n)
{
    if (n == 1) return 16;
    if (n == 2) return 8;
    return 4;
}

double cell_distance_to_origin(const Box& b)
{
    double s = 0.0;
    for (std::size_t a = 0; a < b.dim(); ++a) {
        double d = 0.0;
        if (b.lower[a] > 0.0) d = b.lower[a];
        if (b.upper[a] < 0.0) d = -b.upper[a];
        s += d * d;
    }
    return std::sqrt(s);
}

// Midpoint rule for the integral of h over the box `x_box`.
double cell_integral(const Density& h, const Box& x_box)
{
    if (h.support_radius() && cell_distance_to_origin(x_box) > *h.support_radius()) return 0.0;
    const std::size_t n = x_box.dim();
    const auto sub = static_cast<std::size_t>(sub_cell_points(n));
    std::size_t count = 1;
    for (std::size_t a = 0; a < n; ++a) count *= sub;
    Point x(n);
    const double s = pairwise_accumulate(0, count, [&](std::size_t t) {
        std::size_t r = t;
        for (std::size_t a = n; a-- > 0;) {
            const double frac = (static_cast<double>(r % sub) + 0.5) / static_cast<double>(sub);
            r /= sub;
            x[a] = x_box.lower[a] + frac * x_box.width(a);
        }
        return h.eval(x);
    });
    return s * x_box.volume() / static_cast<double>(count);
}

struct Measurement {
    NormReport report;
    double pointwise_max = 0.0;
    double measure_frac = 0.0;
};

// Errors of mix against f. The l1 entry adds the mass each pdf places outside
// the grid box, so it bounds the whole-space L1 distance up to quadrature.
Measurement measure(const Density& f, std::span<const double> fv, const Mixture& mix, const QuadratureGrid& grid,
                    std::span<const std::size_t> sup_nodes, const Box& sample_box, const PipelineOptions& opt)
{
    const auto hv = kernels::tabulate_mixture(mix, grid);
    Measurement m;
    m.report = norm_report_values(fv, hv, grid, 2.0, true);
    if (f.flags().is_pdf) {
        const double out_f = std::max(0.0, 1.0 - integral_values(fv, grid));
        const double out_h = std::max(0.0, 1.0 - integral_values(hv, grid));
        m.report.l1 += out_f + out_h;
    }
    if (!sup_nodes.empty()) m.report.linf = linf_distance_values(gather(fv, sup_nodes), gather(hv, sup_nodes));

    std::size_t above = 0;
    for (std::size_t i = 0; i < fv.size(); ++i)
        if (std::abs(fv[i] - hv[i]) >= measure_threshold) ++above;
    m.measure_frac = static_cast<double>(above) / static_cast<double>(fv.size());

    std::mt19937_64 rng(opt.seed);
    const std::size_t n = grid.dim();
    std::vector<std::uniform_real_distribution<double>> axes;
    for (std::size_t a = 0; a < n; ++a) axes.emplace_back(sample_box.lower[a], sample_box.upper[a]);
    Point x(n);
    for (std::size_t s = 0; s < opt.pointwise_samples; ++s) {
        for (std::size_t a = 0; a < n; ++a) x[a] = axes[a](rng);
        m.pointwise_max = std::max(m.pointwise_max, std::abs(f.eval(x) - mix.sum(x)));
    }
    return m;
}

void apply(ConstructionTrace& t, const Measurement& m)
{
    t.measured = m.report;
    t.pointwise_max = m.pointwise_max;
    t.measure_frac = m.measure_frac;
}

// Halves delta along diam(kK) / 2^j. Comparison starts at the first rung <= 2,
// so accepted cells are no wider than the kernel's unit scale; the finer of the
// first pair whose sup difference on `points` is below `budget` is returned.
Construction search_delta(const std::function<Construction(double)>& build, double diameter,
                          std::span<const double> points, double budget, const Deadline& deadline,
                          ConstructionTrace partial)
{
    double delta = diameter;
    while (delta > 2.0) delta *= 0.5;
    auto fail = [&](const std::string& why) {
        partial.delta = delta;
        return NonconvergenceError("delta search: " + why, partial.summary());
    };
    try {
        Construction coarse = build(delta);
        auto coarse_vals = kernels::tabulate_mixture_points(coarse.mixture, points);
        for (;;) {
            deadline.check("delta search", partial.summary());
            Construction fine = build(delta * 0.5);
            auto fine_vals = kernels::tabulate_mixture_points(fine.mixture, points);
            const double change = kernels::max_abs_diff(coarse_vals, fine_vals);
            if (change < budget) {
                fine.trace.refinement_change = change;
                return fine;
            }
            delta *= 0.5;
            coarse = std::move(fine);
            coarse_vals = std::move(fine_vals);
        }
    } catch (const ResourceError& e) {
        throw fail(std::string("cell budget exhausted (") + e.what() + ")");
    }
}

std::vector<double> powers_of_two(double cap)
{
    std::vector<double> ks;
    for (double k = 1.0; k <= cap; k *= 2.0) ks.push_back(k);
    return ks;
}

}  // namespace

Truncation truncate_to_ball(const Density& f, double epsilon, const QuadratureGrid& grid, int r_cap)
{
    require_epsilon(epsilon, "truncate_to_ball");
    if (!f.flags().is_pdf) throw PreconditionError("truncate_to_ball: f must be a pdf");
    if (f.dim() != grid.dim()) throw InputError("truncate_to_ball: density and grid dimensions differ");

    if (f.support_radius()) {
        const int r = std::max(1, static_cast<int>(std::ceil(*f.support_radius())));
        if (r <= r_cap) return Truncation{r, restrict_to_ball(f, r), 0.0};
    }
    const auto fv = kernels::tabulate(f, grid);
    const auto norms = node_norms(grid);
    double tail = 1.0;
    for (int r = 1; r <= r_cap; ++r) {
        const auto rr = static_cast<double>(r);
        const double inside = pairwise_accumulate(0, fv.size(), [&](std::size_t i) {
                                  return norms[i] <= rr ? fv[i] : 0.0;
                              })
                              * grid.cell_volume();
        tail = std::max(0.0, 1.0 - inside);
        if (tail <= epsilon) return Truncation{r, restrict_to_ball(f, rr), tail};
    }
    throw NonconvergenceError("truncate_to_ball: tail of '" + f.name() + "' exceeds " + fmt(epsilon)
                                  + " at r = " + std::to_string(r_cap),
                              "r=" + std::to_string(r_cap) + " tail=" + fmt(tail));
}

Cutoff compact_cutoff_detail(const Density& f, double epsilon, const QuadratureGrid& grid)
{
    require_epsilon(epsilon, "compact_cutoff");
    if (!f.flags().in_c0 && !f.flags().in_cc) throw PreconditionError("compact_cutoff: f must be in C0");
    if (f.dim() != grid.dim()) throw InputError("compact_cutoff: density and grid dimensions differ");

    if (f.support_radius()) return Cutoff{f, *f.support_radius(), 0.0};

    const auto fv = kernels::tabulate(f, grid);
    const auto norms = node_norms(grid);
    const double limit = half_extent(grid.box());
    double R = 0.5;
    double outside = 0.0;
    for (; R <= limit; R += 0.5) {
        outside = 0.0;
        for (std::size_t i = 0; i < fv.size(); ++i)
            if (norms[i] > R) outside = std::max(outside, std::abs(fv[i]));
        if (outside < epsilon / 2.0) break;
    }
    if (R > limit)
        throw NonconvergenceError("compact_cutoff: no radius inside the grid box leaves sup below "
                                      + fmt(epsilon / 2.0),
                                  "R=" + fmt(limit) + " outside_sup=" + fmt(outside));

    auto fn = [f, R](std::span<const double> x) {
        const double psi = std::clamp(R + 1.0 - euclidean_norm(x), 0.0, 1.0);
        return psi == 0.0 ? 0.0 : psi * f.eval(x);
    };
    Density h(f.name() + "_cut" + fmt(R), f.dim(), fn);
    h = h.with_flags({.is_pdf = false, .in_c0 = true, .in_cc = true, .in_cb = true}).with_support_radius(R + 1.0);
    if (f.sup_bound()) h = h.with_sup_bound(*f.sup_bound());
    return Cutoff{h, R, outside};
}

Density compact_cutoff(const Density& f, double epsilon, const QuadratureGrid& grid)
{
    return compact_cutoff_detail(f, epsilon, grid).h;
}

Partition::Partition(Box scaled_set, double delta) : scaled_(std::move(scaled_set)), delta_(delta)
{
    scaled_.check();
    if (!(delta > 0.0) || !std::isfinite(delta)) throw InputError("partition: delta must be positive");
    const double edge = delta / std::sqrt(static_cast<double>(dim()));
    for (std::size_t a = 0; a < dim(); ++a) {
        const double ratio = scaled_.width(a) / edge;
        if (ratio > static_cast<double>(max_cells))
            throw ResourceError("partition: more than 10^6 cells (delta = " + fmt(delta) + ")");
        const auto count = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(ratio * (1.0 - 1e-12))));
        if (size_ > max_cells / count)
            throw ResourceError("partition: more than 10^6 cells (delta = " + fmt(delta) + ")");
        size_ *= count;
        std::vector<double> e(count + 1);
        for (std::size_t j = 0; j < count; ++j) e[j] = scaled_.lower[a] + static_cast<double>(j) * edge;
        e[count] = scaled_.upper[a];
        edges_.push_back(std::move(e));
    }
}

std::vector<std::size_t> Partition::index(std::size_t i) const
{
    std::vector<std::size_t> idx(dim());
    for (std::size_t a = dim(); a-- > 0;) {
        const std::size_t c = cells_along(a);
        idx[a] = i % c;
        i /= c;
    }
    return idx;
}

Box Partition::cell(std::size_t i) const
{
    const auto idx = index(i);
    Box b;
    for (std::size_t a = 0; a < dim(); ++a) {
        b.lower.push_back(edges_[a][idx[a]]);
        b.upper.push_back(edges_[a][idx[a] + 1]);
    }
    return b;
}

Point Partition::rep(std::size_t i) const
{
    const auto idx = index(i);
    Point z(dim());
    for (std::size_t a = 0; a < dim(); ++a) z[a] = 0.5 * (edges_[a][idx[a]] + edges_[a][idx[a] + 1]);
    return z;
}

double Partition::cell_diameter(std::size_t i) const
{
    return cell(i).diameter();
}

Partition build_partition(const Box& K_box, double k, double delta)
{
    if (!(k > 0.0) || !std::isfinite(k)) throw InputError("build_partition: k must be positive");
    K_box.check();
    return Partition(K_box.scaled(k), delta);
}

std::string ConstructionTrace::summary() const
{
    std::ostringstream os;
    os.precision(10);
    os << "mode=" << mode << " epsilon=" << epsilon << " r=" << r << " k=" << k << " delta=" << delta
       << " m=" << m << " remainder=" << remainder_weight << " smoothing_error=" << smoothing_error;
    if (!notes.empty()) os << " notes=" << notes;
    return os.str();
}

Construction riemann_mixture(const Density& h, const Density& g, double k, const Partition& part, double epsilon)
{
    require_epsilon(epsilon, "riemann_mixture");
    require_pdf_kernel(g, "riemann_mixture");
    if (!(k > 0.0)) throw InputError("riemann_mixture: k must be positive");
    if (h.dim() != g.dim() || part.dim() != g.dim())
        throw InputError("riemann_mixture: target, kernel and partition dimensions differ");

    const std::size_t n = g.dim();
    const std::size_t cells = part.size();
    std::vector<double> c(cells);
    const auto count = static_cast<std::ptrdiff_t>(cells);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const auto u = static_cast<std::size_t>(i);
        c[u] = cell_integral(h, part.cell(u).scaled(1.0 / k));
    }
    for (std::size_t i = 0; i < cells; ++i) {
        if (c[i] < -negative_weight_tol)
            throw ConstructionError("riemann_mixture: cell " + std::to_string(i + 1) + " has weight " + fmt(c[i])
                                    + " < 0; the target must be nonnegative");
        if (c[i] < 0.0) c[i] = 0.0;
    }
    double total = compensated_sum(c);
    if (total > 1.0) {
        if (total - 1.0 > overfull_rescale)
            throw ConstructionError("riemann_mixture: cell weights sum to " + fmt(total) + " > 1");
        for (double& v : c) v /= total;
        total = compensated_sum(c);
    }
    double remainder = 1.0 - total;
    if (remainder < remainder_drop) remainder = 0.0;

    std::vector<Component> comps;
    comps.reserve(cells + 1);
    for (std::size_t i = 0; i < cells; ++i) {
        if (c[i] == 0.0) continue;
        Point mu = part.rep(i);
        for (double& v : mu) v /= k;
        comps.push_back({c[i], std::move(mu), 1.0 / k});
    }
    if (remainder > 0.0) {
        Point mu = part.rep(cells - 1);
        for (double& v : mu) v /= k;
        const double C = *g.sup_bound();
        const double sigma = std::pow(2.0 * remainder * C / epsilon, 1.0 / static_cast<double>(n));
        comps.push_back({remainder, std::move(mu), sigma});
    }

    Construction out{Mixture(g, std::move(comps)), {}};
    out.trace.epsilon = epsilon;
    out.trace.k = k;
    out.trace.delta = part.delta();
    out.trace.m = out.mixture.size();
    out.trace.remainder_weight = remainder;
    return out;
}

Construction uniform_approximate(const Density& f, const Density& g, double epsilon, const QuadratureGrid& grid,
                                 const PipelineOptions& opt)
{
    require_epsilon(epsilon, "uniform_approximate");
    require_dims(f, g, grid, "uniform_approximate");
    if (!f.flags().is_pdf || !f.flags().in_c0)
        throw PreconditionError("uniform_approximate: target must be a C0 pdf");
    require_pdf_kernel(g, "uniform_approximate");
    if (!g.flags().in_c0) throw PreconditionError("uniform_approximate: kernel must be in C0");

    ConstructionTrace partial;
    partial.mode = "uniform";
    partial.epsilon = epsilon;

    const Cutoff cut = compact_cutoff_detail(f, epsilon / 2.0, grid);
    partial.r = cut.R;
    const auto hv = kernels::tabulate(cut.h, grid);

    double k = 0.0;
    for (double kk : powers_of_two(opt.k_cap.value_or(uniform_k_cap))) {
        opt.deadline.check("uniform k search", partial.summary());
        partial.k = kk;
        partial.smoothing_error = linf_distance_values(convolve_dilated_on_grid(g, kk, hv, grid), hv);
        if (!kernel_resolved(kk, grid)) partial.notes = "kernel narrower than grid cell";
        if (partial.smoothing_error < epsilon / 4.0) {
            k = kk;
            break;
        }
    }
    if (k == 0.0) throw NonconvergenceError("uniform_approximate: k search exhausted", partial.summary());

    const double support = cut.h.support_radius().value_or(cut.R + 1.0);
    const double rho = std::min(support, cut.R + 1.0);
    const Box K_box = Box::cube(grid.dim(), -rho, rho);
    const auto points = node_coordinates(grid, nodes_where(grid, [](const Point&) { return true; }));

    Construction out = search_delta(
        [&](double delta) { return riemann_mixture(cut.h, g, k, build_partition(K_box, k, delta), epsilon / 4.0); },
        K_box.scaled(k).diameter(), points, epsilon / 8.0, opt.deadline, partial);

    const auto fv = kernels::tabulate(f, grid);
    apply(out.trace, measure(f, fv, out.mixture, grid, {}, grid.box(), opt));
    out.trace.mode = "uniform";
    out.trace.epsilon = epsilon;
    out.trace.r = cut.R;
    out.trace.smoothing_error = partial.smoothing_error;
    out.trace.notes = partial.notes;
    out.trace.analytic_riemann_bound =
        modulus_of_continuity(g, out.trace.delta, grid) * std::pow(k, static_cast<double>(grid.dim()));
    if (f.support_radius() && *f.support_radius() <= inner_radius(grid.box()))
        out.trace.tail_bound = 0.0;
    else if (f.tail_params())
        out.trace.tail_bound = f.tail_params()->beta
                               * std::pow(1.0 + inner_radius(grid.box()),
                                          -static_cast<double>(grid.dim()) - f.tail_params()->theta);
    else
        out.trace.tail_bound = std::numeric_limits<double>::quiet_NaN();
    return out;
}

Construction compact_uniform_approximate(const Density& f, const Density& g, const Box& K_box, double epsilon,
                                         const QuadratureGrid& grid, const PipelineOptions& opt)
{
    require_epsilon(epsilon, "compact_uniform_approximate");
    require_dims(f, g, grid, "compact_uniform_approximate");
    K_box.check();
    if (K_box.dim() != grid.dim()) throw InputError("compact_uniform_approximate: K has the wrong dimension");
    if (!f.flags().is_pdf || !f.flags().in_cb)
        throw PreconditionError("compact_uniform_approximate: target must be a bounded continuous pdf");
    require_pdf_kernel(g, "compact_uniform_approximate");

    ConstructionTrace partial;
    partial.mode = "compact";
    partial.epsilon = epsilon;
    const std::size_t n = grid.dim();
    const double third = epsilon / 3.0;

    const auto fv = kernels::tabulate(f, grid);
    const auto k_nodes = nodes_where(grid, [&](const Point& x) { return K_box.contains(x); });
    if (k_nodes.empty()) throw InputError("compact_uniform_approximate: no grid node lies in K");
    const auto f_on_K = gather(fv, k_nodes);

    double k = 0.0;
    for (double kk : powers_of_two(opt.k_cap.value_or(uniform_k_cap))) {
        opt.deadline.check("compact k search", partial.summary());
        partial.k = kk;
        const auto conv = convolve_dilated_on_grid(g, kk, fv, grid);
        partial.smoothing_error = linf_distance_values(gather(conv, k_nodes), f_on_K);
        if (partial.smoothing_error < third) {
            k = kk;
            break;
        }
    }
    if (k == 0.0) throw NonconvergenceError("compact_uniform_approximate: k search exhausted", partial.summary());

    // Smallest r with k^n C |f - 1_B_r f|_1 <= epsilon / 3, the tail measured on
    // a grid over [-r, r]^n whose spacing matches the run grid.
    const double kn = std::pow(k, static_cast<double>(n));
    const double C = *g.sup_bound();
    int r = 0;
    double tail = 1.0;
    for (int rr = 1; rr <= compact_r_cap; ++rr) {
        opt.deadline.check("compact r search", partial.summary());
        const auto rd = static_cast<double>(rr);
        if (f.support_radius() && *f.support_radius() <= rd) {
            tail = 0.0;
        } else {
            const auto ppa = static_cast<std::size_t>(std::ceil(2.0 * rd / grid.max_cell_width()));
            try {
                const QuadratureGrid ball_grid(Box::cube(n, -rd, rd), ppa);
                const auto bv = kernels::tabulate(f, ball_grid);
                const auto norms = node_norms(ball_grid);
                const double inside = pairwise_accumulate(0, bv.size(), [&](std::size_t i) {
                                          return norms[i] <= rd ? bv[i] : 0.0;
                                      })
                                      * ball_grid.cell_volume();
                tail = std::max(0.0, 1.0 - inside);
            } catch (const ResourceError& e) {
                partial.r = rd;
                throw NonconvergenceError(std::string("compact_uniform_approximate: r search: ") + e.what(),
                                          partial.summary());
            }
        }
        if (kn * C * tail <= third) {
            r = rr;
            break;
        }
    }
    if (r == 0) {
        partial.r = compact_r_cap;
        throw NonconvergenceError("compact_uniform_approximate: r search exhausted", partial.summary());
    }
    partial.r = r;
    partial.tail_bound = kn * C * tail;

    const Density h = restrict_to_ball(f, r);
    const Box ball_box = Box::cube(n, -static_cast<double>(r), static_cast<double>(r));
    const auto points = node_coordinates(grid, k_nodes);
    Construction out = search_delta(
        [&](double delta) { return riemann_mixture(h, g, k, build_partition(ball_box, k, delta), third); },
        ball_box.scaled(k).diameter(), points, epsilon / 6.0, opt.deadline, partial);

    apply(out.trace, measure(f, fv, out.mixture, grid, k_nodes, K_box, opt));
    out.trace.mode = "compact";
    out.trace.epsilon = epsilon;
    out.trace.r = r;
    out.trace.tail_bound = partial.tail_bound;
    out.trace.smoothing_error = partial.smoothing_error;
    out.trace.analytic_riemann_bound = modulus_of_continuity(g, out.trace.delta, grid) * kn;
    return out;
}

Construction l1_approximate(const Density& f, const Density& g, double epsilon, double gamma,
                            const QuadratureGrid& grid, const PipelineOptions& opt)
{
    require_epsilon(epsilon, "l1_approximate");
    require_dims(f, g, grid, "l1_approximate");
    if (!(gamma > 0.0 && gamma < 1.0)) throw InputError("l1_approximate: gamma must lie in (0, 1)");
    if (!f.flags().is_pdf) throw PreconditionError("l1_approximate: target must be a pdf");
    require_pdf_kernel(g, "l1_approximate");
    if (!g.tail_params()) throw PreconditionError("l1_approximate: kernel needs tail parameters (beta, theta)");

    ConstructionTrace partial;
    partial.mode = "l1";
    partial.epsilon = epsilon;
    const std::size_t n = grid.dim();
    const auto nd = static_cast<double>(n);
    const TailParams v = *g.tail_params();

    const Truncation trunc = truncate_to_ball(f, epsilon / 24.0, grid);
    const auto r = static_cast<double>(trunc.r);
    partial.r = r;
    const double vol_K = unit_ball_volume(n) * std::pow(r, nd);
    const double A_n = unit_sphere_area(n);

    const auto hv = kernels::tabulate(trunc.truncated, grid);
    const double h_mass = integral_values(hv, grid);
    double h_sup = 0.0;
    for (double x : hv) h_sup = std::max(h_sup, x);

    double k = 0.0;
    double last_A = std::numeric_limits<double>::infinity();
    bool extrapolated = false;
    for (double kk : powers_of_two(opt.k_cap.value_or(l1_k_cap))) {
        opt.deadline.check("l1 k search", partial.summary());
        partial.k = kk;
        if (kernel_resolved(kk, grid)) {
            const auto conv = convolve_dilated_on_grid(g, kk, hv, grid);
            // Mass the smoothed function moves outside the box is part of its L1 error.
            const double escaped = std::max(0.0, h_mass - integral_values(conv, grid));
            last_A = lp_distance_values(conv, hv, 1.0, grid) + escaped;
            extrapolated = false;
        } else {
            extrapolated = true;
        }
        const double bare = v.beta * A_n * std::pow(kk, v.theta * (gamma - 1.0)) / v.theta;
        const double vol_Kk = unit_ball_volume(n) * std::pow(r + std::pow(kk, -gamma), nd);
        partial.smoothing_error = last_A;
        partial.smoothing_extrapolated = extrapolated;
        partial.tail_bound = bare;
        partial.tail_bound_with_factor = h_sup * vol_K * bare;
        if (last_A <= epsilon / 4.0 && bare <= epsilon / 24.0 && vol_Kk <= vol_K + 1.0) {
            k = kk;
            break;
        }
    }
    if (k == 0.0) throw NonconvergenceError("l1_approximate: k search exhausted", partial.summary());

    const double reach = r + std::pow(k, -gamma);
    const auto kk_nodes = nodes_where(grid, [&](const Point& x) { return euclidean_norm(x) <= reach; });
    const auto points = node_coordinates(grid, kk_nodes);
    const Box ball_box = Box::cube(n, -r, r);
    Construction out = search_delta(
        [&](double delta) {
            return riemann_mixture(trunc.truncated, g, k, build_partition(ball_box, k, delta), epsilon);
        },
        ball_box.scaled(k).diameter(), points, epsilon / (8.0 * (vol_K + 1.0)), opt.deadline, partial);

    const auto fv = kernels::tabulate(f, grid);
    apply(out.trace, measure(f, fv, out.mixture, grid, {}, grid.box(), opt));
    out.trace.mode = "l1";
    out.trace.epsilon = epsilon;
    out.trace.r = r;
    out.trace.tail_bound = partial.tail_bound;
    out.trace.tail_bound_with_factor = partial.tail_bound_with_factor;
    out.trace.smoothing_error = partial.smoothing_error;
    out.trace.smoothing_extrapolated = partial.smoothing_extrapolated;
    if (extrapolated) out.trace.notes = "smoothing L1 last measured at a resolved k";
    return out;
}

}  // namespace mixdense
