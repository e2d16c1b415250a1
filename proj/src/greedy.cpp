#include "mixdense/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "mixdense/analysis.hpp"
#include "mixdense/errors.hpp"
#include "mixdense/kernels.hpp"
#include "mixdense/summation.hpp"

namespace mixdense {

namespace {

constexpr std::size_t max_dictionary_values = std::size_t{1} << 27;

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string fmt_point(const Point& x)
{
    std::string s;
    for (std::size_t a = 0; a < x.size(); ++a) s += (a ? ";" : "") + fmt(x[a]);
    return s;
}

double pow_term(double d, double p)
{
    d = std::abs(d);
    if (p == 2.0) return d * d;
    if (p == 1.0) return d;
    return std::pow(d, p);
}

double root(double s, double p)
{
    if (p == 1.0) return s;
    if (p == 2.0) return std::sqrt(s);
    return std::pow(s, 1.0 / p);
}

// |r - a e|_p^p * vol / vol, summed in pairwise order.
double line_objective(std::span<const double> r, std::span<const double> e, double a, double p)
{
    return pairwise_accumulate(0, r.size(), [&](std::size_t i) { return pow_term(r[i] - a * e[i], p); });
}

struct LineResult {
    double a = 0.0;
    double sum = 0.0;
};

LineResult line_search(std::span<const double> r, std::span<const double> e, double p)
{
    if (p == 2.0) {
        const double re = pairwise_accumulate(0, r.size(), [&](std::size_t i) { return r[i] * e[i]; });
        const double ee = pairwise_accumulate(0, r.size(), [&](std::size_t i) { return e[i] * e[i]; });
        const double a = ee > 0.0 ? std::clamp(re / ee, 0.0, 1.0) : 0.0;
        return {a, line_objective(r, e, a, p)};
    }
    // Golden-section search on [0, 1]; the objective is convex in a.
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 0.0;
    double hi = 1.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = line_objective(r, e, x1, p);
    double f2 = line_objective(r, e, x2, p);
    while (hi - lo > golden_tolerance) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = line_objective(r, e, x1, p);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = line_objective(r, e, x2, p);
        }
    }
    LineResult best{0.0, line_objective(r, e, 0.0, p)};
    for (double a : {0.5 * (lo + hi), 1.0}) {
        const double s = line_objective(r, e, a, p);
        if (s < best.sum) best = {a, s};
    }
    return best;
}

std::vector<std::vector<double>> tabulate_dictionary(const DictionarySpec& dict, const QuadratureGrid& grid)
{
    if (dict.candidate_locations.size() > max_dictionary_values / std::max<std::size_t>(grid.size(), 1))
        throw ResourceError("greedy: dictionary table too large");
    std::vector<std::vector<double>> table;
    table.reserve(dict.candidate_locations.size());
    for (const Point& mu : dict.candidate_locations) {
        Mixture single(dict.kernel, {Component{1.0, mu, 1.0 / dict.k}});
        table.push_back(kernels::tabulate_mixture(single, grid));
    }
    return table;
}

}  // namespace

double donahue_constant(double p)
{
    if (!(p >= 1.0) || !std::isfinite(p)) throw InputError("donahue_constant: p must be in [1, inf)");
    if (p <= 2.0) return 1.0;
    return std::numbers::sqrt2 * std::pow(std::sqrt(std::numbers::pi) * std::tgamma((p + 1.0) / 2.0), 1.0 / p);
}

void DictionarySpec::check() const
{
    if (!(k > 0.0) || !std::isfinite(k)) throw InputError("dictionary: k must be positive");
    if (candidate_locations.empty()) throw InputError("dictionary: candidate set is empty");
    for (const auto& mu : candidate_locations)
        if (mu.size() != kernel.dim()) throw InputError("dictionary: candidate has the wrong dimension");
    if (!kernel.flags().is_pdf) throw PreconditionError("dictionary: kernel must be a pdf");
}

std::vector<Point> linspace_candidates(std::size_t dim, double lo, double hi, std::size_t count)
{
    if (dim == 0 || count == 0) throw InputError("linspace_candidates: empty request");
    if (count > 1 && !(lo < hi)) throw InputError("linspace_candidates: need lo < hi");
    std::vector<double> axis(count);
    for (std::size_t j = 0; j < count; ++j)
        axis[j] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(count - 1);
    std::size_t total = 1;
    for (std::size_t a = 0; a < dim; ++a) total *= count;
    std::vector<Point> out(total, Point(dim));
    for (std::size_t t = 0; t < total; ++t) {
        std::size_t r = t;
        for (std::size_t a = dim; a-- > 0;) {
            out[t][a] = axis[r % count];
            r /= count;
        }
    }
    return out;
}

std::string GreedyTrace::to_csv() const
{
    std::ostringstream os;
    os << "step,mu,step_size,lp_error\n";
    for (const auto& s : steps)
        os << s.m << ',' << fmt_point(s.mu) << ',' << fmt(s.step_size) << ',' << fmt(s.lp_error) << '\n';
    os << "K=" << fmt(K_bound) << ",C_p=" << fmt(C_p) << ",alpha=" << fmt(alpha) << ",\n";
    return os.str();
}

GreedyFit greedy_convex_fit_values(std::span<const double> target, const DictionarySpec& dict, double p,
                                   std::size_t m_max, const QuadratureGrid& grid, const Deadline& deadline,
                                   const GreedyObserver& observe)
{
    dict.check();
    if (!(p >= 1.0) || !std::isfinite(p)) throw InputError("greedy_convex_fit: p must be in [1, inf)");
    if (m_max == 0) throw InputError("greedy_convex_fit: m_max must be positive");
    if (dict.kernel.dim() != grid.dim()) throw InputError("greedy_convex_fit: kernel and grid dimensions differ");
    if (target.size() != grid.size()) throw InputError("greedy_convex_fit: target does not match the grid");

    const auto table = tabulate_dictionary(dict, grid);
    const std::size_t J = table.size();
    const std::size_t N = grid.size();
    const double vol = grid.cell_volume();

    GreedyTrace trace;
    trace.p = p;
    trace.k = dict.k;
    trace.C_p = donahue_constant(p);
    trace.alpha = std::min(p, 2.0);
    double dict_norm = 0.0;
    for (const auto& d : table) dict_norm = std::max(dict_norm, lp_norm_values(d, p, grid));
    trace.K_bound = dict_norm + lp_norm_values(target, p, grid);

    std::vector<double> h(N, 0.0);
    std::vector<double> weight(J, 0.0);
    double current = std::numeric_limits<double>::infinity();
    std::vector<double> cand_sum(J);
    std::vector<double> cand_a(J);

    for (std::size_t m = 1; m <= m_max; ++m) {
        deadline.check("greedy step " + std::to_string(m));
        const auto count = static_cast<std::ptrdiff_t>(J);
        if (m == 1) {
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t j = 0; j < count; ++j) {
                const auto u = static_cast<std::size_t>(j);
                cand_a[u] = 1.0;
                cand_sum[u] = kernels::serial::pow_sum(target, table[u], p);
            }
        } else {
            std::vector<double> r(N);
            for (std::size_t i = 0; i < N; ++i) r[i] = target[i] - h[i];
#pragma omp parallel for schedule(dynamic, 1)
            for (std::ptrdiff_t j = 0; j < count; ++j) {
                const auto u = static_cast<std::size_t>(j);
                std::vector<double> e(N);
                for (std::size_t i = 0; i < N; ++i) e[i] = table[u][i] - h[i];
                const LineResult lr = line_search(r, e, p);
                cand_a[u] = lr.a;
                cand_sum[u] = lr.sum;
            }
        }
        std::size_t best = 0;
        for (std::size_t j = 1; j < J; ++j)
            if (cand_sum[j] < cand_sum[best]) best = j;
        const double err = root(cand_sum[best] * vol, p);
        const double a = cand_a[best];
        if (!(err < current) || a == 0.0) {
            trace.stopped_early = true;
            break;
        }
        for (std::size_t i = 0; i < N; ++i) h[i] = (1.0 - a) * h[i] + a * table[best][i];
        for (double& w : weight) w *= 1.0 - a;
        weight[best] += a;
        current = err;
        trace.steps.push_back({m, dict.candidate_locations[best], a, err});
        if (observe) observe(m, h);
        if (err <= greedy_stop_error) {
            trace.stopped_early = m < m_max;
            break;
        }
    }

    std::vector<Component> comps;
    for (std::size_t j = 0; j < J; ++j)
        if (weight[j] > 0.0) comps.push_back({weight[j], dict.candidate_locations[j], 1.0 / dict.k});
    return GreedyFit{Mixture(dict.kernel, std::move(comps)), std::move(trace)};
}

GreedyFit greedy_convex_fit(const Density& f, const DictionarySpec& dict, double p, std::size_t m_max,
                            const QuadratureGrid& grid, const Deadline& deadline)
{
    if (f.dim() != grid.dim()) throw InputError("greedy_convex_fit: target and grid dimensions differ");
    return greedy_convex_fit_values(kernels::tabulate(f, grid), dict, p, m_max, grid, deadline);
}

Smoothing smooth_target(const Density& f, const Density& g, double k, const QuadratureGrid& grid, double p)
{
    if (!g.flags().is_pdf) throw PreconditionError("target_smoothing: kernel must be a pdf");
    if (f.dim() != grid.dim() || g.dim() != grid.dim())
        throw InputError("target_smoothing: density, kernel and grid dimensions differ");
    const auto fv = kernels::tabulate(f, grid);
    Smoothing s;
    s.k = k;
    s.smoothed = convolve_dilated_on_grid(g, k, fv, grid);
    s.lp_error = lp_distance_values(fv, s.smoothed, p, grid);
    s.descriptor = g.name() + "_k" + fmt(k) + "*" + f.name() + "@" + grid.descriptor();
    return s;
}

Smoothing target_smoothing(const Density& f, const Density& g, double epsilon, const QuadratureGrid& grid,
                           double p)
{
    if (!(epsilon > 0.0)) throw InputError("target_smoothing: epsilon must be positive");
    if (!(p >= 1.0)) throw InputError("target_smoothing: p must be at least 1");
    double last = std::numeric_limits<double>::infinity();
    for (double k = 1.0; k <= smoothing_k_cap; k *= 2.0) {
        Smoothing s = smooth_target(f, g, k, grid, p);
        if (s.lp_error < epsilon / 2.0) return s;
        last = s.lp_error;
    }
    throw NonconvergenceError("target_smoothing: no k <= 4096 brings the L_p error below " + fmt(epsilon / 2.0),
                              "k=4096 lp_error=" + fmt(last));
}

double rate_bound(const GreedyTrace& trace, std::size_t m)
{
    const double exponent = 1.0 - 1.0 / trace.alpha;
    return trace.C_p * trace.K_bound * std::pow(static_cast<double>(m), -exponent);
}

RateCheck rate_bound_check(const GreedyTrace& trace, double p)
{
    GreedyTrace t = trace;
    t.alpha = std::min(p, 2.0);
    t.C_p = donahue_constant(p);
    RateCheck out{true, 0.0};
    for (const auto& s : t.steps) {
        const double bound = rate_bound(t, s.m);
        out.worst_ratio = std::max(out.worst_ratio, s.lp_error / bound);
        if (s.lp_error > bound) out.holds = false;
    }
    return out;
}

double loglog_slope(const GreedyTrace& trace, std::size_t lo, std::size_t hi)
{
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t n = 0;
    for (const auto& s : trace.steps) {
        if (s.m < lo || s.m > hi || !(s.lp_error > 0.0)) continue;
        const double x = std::log(static_cast<double>(s.m));
        const double y = std::log(s.lp_error);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    const auto dn = static_cast<double>(n);
    return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

}  // namespace mixdense
