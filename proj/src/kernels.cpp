#include "mixdense/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "mixdense/errors.hpp"
#include "mixdense/summation.hpp"

namespace mixdense::kernels {

namespace {

constexpr std::size_t max_dim_stack = 8;

void require_same_size(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) throw InputError("kernels: value arrays differ in length");
}

void require_points(std::size_t dim, std::span<const double> points)
{
    if (points.size() % dim != 0) throw InputError("kernels: point buffer is not a multiple of the dimension");
}

double pow_term(double d, double p)
{
    d = std::abs(d);
    if (p == 1.0) return d;
    if (p == 2.0) return d * d;
    return std::pow(d, p);
}

double node_value(const Density& f, const QuadratureGrid& grid, std::size_t i)
{
    std::array<double, max_dim_stack> buf{};
    std::vector<double> big;
    std::span<double> x;
    if (grid.dim() <= max_dim_stack) {
        x = std::span<double>(buf.data(), grid.dim());
    } else {
        big.resize(grid.dim());
        x = big;
    }
    grid.node(i, x);
    return f.eval(x);
}

double mixture_node_value(const Mixture& mix, const QuadratureGrid& grid, std::size_t i)
{
    std::array<double, max_dim_stack> buf{};
    std::vector<double> big;
    std::span<double> x;
    if (grid.dim() <= max_dim_stack) {
        x = std::span<double>(buf.data(), grid.dim());
    } else {
        big.resize(grid.dim());
        x = big;
    }
    grid.node(i, x);
    return mix.sum(x);
}

struct TableShape {
    std::size_t dim;
    std::size_t n;       // points per axis
    std::size_t extent;  // 2n - 1
    std::size_t size;
};

TableShape table_shape(const QuadratureGrid& grid)
{
    TableShape s{grid.dim(), grid.points_per_axis(), 2 * grid.points_per_axis() - 1, 1};
    if (s.dim > max_dim_stack) throw ResourceError("kernels: convolution tables support n <= 8");
    for (std::size_t a = 0; a < s.dim; ++a) {
        if (s.size > QuadratureGrid::max_nodes * 4 / s.extent)
            throw ResourceError("kernels: convolution table too large for grid " + grid.descriptor());
        s.size *= s.extent;
    }
    return s;
}

// Average of k^n g(k y) over the cell centred at lattice offset `index`.
double table_entry(const Density& g, double k, double kn, const QuadratureGrid& grid, const TableShape& s,
                   std::size_t index)
{
    const std::size_t sub = kernel_subsamples(s.dim);
    std::array<double, max_dim_stack> centre{};
    std::array<double, max_dim_stack> y{};
    std::size_t rest = index;
    for (std::size_t a = s.dim; a-- > 0;) {
        const auto d = static_cast<double>(rest % s.extent) - static_cast<double>(s.n - 1);
        rest /= s.extent;
        centre[a] = d * grid.cell_width(a);
    }
    std::size_t count = 1;
    for (std::size_t a = 0; a < s.dim; ++a) count *= sub;
    const double inv_sub = 1.0 / static_cast<double>(sub);
    double acc = 0.0;
    for (std::size_t t = 0; t < count; ++t) {
        std::size_t r = t;
        for (std::size_t a = s.dim; a-- > 0;) {
            const double frac = (static_cast<double>(r % sub) + 0.5) * inv_sub - 0.5;
            r /= sub;
            y[a] = k * (centre[a] + frac * grid.cell_width(a));
        }
        acc += g.eval(std::span<const double>(y.data(), s.dim));
    }
    return kn * acc / static_cast<double>(count);
}

// Linear offsets so that table index = node_base(i) + source_base(j).
std::size_t node_base(const TableShape& s, std::size_t i)
{
    std::size_t base = 0;
    std::size_t stride = 1;
    for (std::size_t a = s.dim; a-- > 0;) {
        base += (i % s.n) * stride;
        i /= s.n;
        stride *= s.extent;
    }
    return base;
}

std::size_t source_base(const TableShape& s, std::size_t j)
{
    std::size_t base = 0;
    std::size_t stride = 1;
    for (std::size_t a = s.dim; a-- > 0;) {
        base += (s.n - 1 - j % s.n) * stride;
        j /= s.n;
        stride *= s.extent;
    }
    return base;
}

struct Sources {
    std::vector<std::size_t> base;
    std::vector<double> value;
};

Sources nonzero_sources(const TableShape& s, std::span<const double> h)
{
    Sources src;
    for (std::size_t j = 0; j < h.size(); ++j) {
        if (h[j] == 0.0) continue;
        src.base.push_back(source_base(s, j));
        src.value.push_back(h[j]);
    }
    return src;
}

double convolve_at(const DilatedKernelTable& table, const TableShape& s, const Sources& src, double vol,
                   std::size_t i)
{
    const std::size_t bi = node_base(s, i);
    const double* t = table.values.data() + bi;
    double acc = 0.0;
    for (std::size_t q = 0; q < src.base.size(); ++q) acc += t[src.base[q]] * src.value[q];
    return acc * vol;
}

void check_table(const DilatedKernelTable& table, const QuadratureGrid& grid, std::span<const double> h)
{
    if (h.size() != grid.size()) throw InputError("convolve_table: value array does not match grid");
    if (table.extent.size() != grid.dim()
        || table.extent.front() != 2 * grid.points_per_axis() - 1)
        throw InputError("convolve_table: table was built for a different grid");
}

void check_dilation(double k)
{
    if (!(k > 0.0) || !std::isfinite(k)) throw InputError("dilated_kernel_table: k must be positive");
}

double table_mass(const DilatedKernelTable& t, const QuadratureGrid& grid)
{
    return pairwise_sum(t.values) * grid.cell_volume();
}

// Sub-sampling a jump can overcount a pdf's mass by a fraction of a cell.
void cap_pdf_mass(DilatedKernelTable& t, const Density& g, const QuadratureGrid& grid)
{
    t.mass = table_mass(t, grid);
    if (!g.flags().is_pdf || t.mass <= 1.0) return;
    for (double& v : t.values) v /= t.mass;
    t.mass = table_mass(t, grid);
}

}  // namespace

std::size_t kernel_subsamples(std::size_t dim)
{
    if (dim == 1) return 8;
    if (dim == 2) return 4;
    return 2;
}

namespace serial {

std::vector<double> tabulate(const Density& f, const QuadratureGrid& grid)
{
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = node_value(f, grid, i);
    return out;
}

std::vector<double> tabulate_points(const Density& f, std::span<const double> points)
{
    const std::size_t n = f.dim();
    require_points(n, points);
    std::vector<double> out(points.size() / n);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f.eval(points.subspan(i * n, n));
    return out;
}

std::vector<double> tabulate_mixture(const Mixture& mix, const QuadratureGrid& grid)
{
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = mixture_node_value(mix, grid, i);
    return out;
}

std::vector<double> tabulate_mixture_points(const Mixture& mix, std::span<const double> points)
{
    const std::size_t n = mix.dim();
    require_points(n, points);
    std::vector<double> out(points.size() / n);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = mix.sum(points.subspan(i * n, n));
    return out;
}

DilatedKernelTable dilated_kernel_table(const Density& g, double k, const QuadratureGrid& grid)
{
    check_dilation(k);
    const TableShape s = table_shape(grid);
    const double kn = std::pow(k, static_cast<double>(s.dim));
    DilatedKernelTable t;
    t.extent.assign(s.dim, s.extent);
    t.values.resize(s.size);
    for (std::size_t i = 0; i < s.size; ++i) t.values[i] = table_entry(g, k, kn, grid, s, i);
    cap_pdf_mass(t, g, grid);
    return t;
}

std::vector<double> convolve_table(const DilatedKernelTable& table, std::span<const double> h,
                                   const QuadratureGrid& grid)
{
    check_table(table, grid, h);
    const TableShape s = table_shape(grid);
    const Sources src = nonzero_sources(s, h);
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = convolve_at(table, s, src, grid.cell_volume(), i);
    return out;
}

double pow_sum(std::span<const double> a, std::span<const double> b, double p)
{
    require_same_size(a, b);
    return pairwise_accumulate(0, a.size(), [&](std::size_t i) { return pow_term(a[i] - b[i], p); });
}

double max_abs_diff(std::span<const double> a, std::span<const double> b)
{
    require_same_size(a, b);
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace serial

namespace parallel {

std::vector<double> tabulate(const Density& f, const QuadratureGrid& grid)
{
    std::vector<double> out(grid.size());
    const auto count = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] = node_value(f, grid, static_cast<std::size_t>(i));
    return out;
}

std::vector<double> tabulate_points(const Density& f, std::span<const double> points)
{
    const std::size_t n = f.dim();
    require_points(n, points);
    std::vector<double> out(points.size() / n);
    const auto count = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const auto u = static_cast<std::size_t>(i);
        out[u] = f.eval(points.subspan(u * n, n));
    }
    return out;
}

std::vector<double> tabulate_mixture(const Mixture& mix, const QuadratureGrid& grid)
{
    std::vector<double> out(grid.size());
    const auto count = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] = mixture_node_value(mix, grid, static_cast<std::size_t>(i));
    return out;
}

std::vector<double> tabulate_mixture_points(const Mixture& mix, std::span<const double> points)
{
    const std::size_t n = mix.dim();
    require_points(n, points);
    std::vector<double> out(points.size() / n);
    const auto count = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const auto u = static_cast<std::size_t>(i);
        out[u] = mix.sum(points.subspan(u * n, n));
    }
    return out;
}

DilatedKernelTable dilated_kernel_table(const Density& g, double k, const QuadratureGrid& grid)
{
    check_dilation(k);
    const TableShape s = table_shape(grid);
    const double kn = std::pow(k, static_cast<double>(s.dim));
    DilatedKernelTable t;
    t.extent.assign(s.dim, s.extent);
    t.values.resize(s.size);
    const auto count = static_cast<std::ptrdiff_t>(s.size);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i)
        t.values[static_cast<std::size_t>(i)] = table_entry(g, k, kn, grid, s, static_cast<std::size_t>(i));
    cap_pdf_mass(t, g, grid);
    return t;
}

std::vector<double> convolve_table(const DilatedKernelTable& table, std::span<const double> h,
                                   const QuadratureGrid& grid)
{
    check_table(table, grid, h);
    const TableShape s = table_shape(grid);
    const Sources src = nonzero_sources(s, h);
    std::vector<double> out(grid.size());
    const auto count = static_cast<std::ptrdiff_t>(out.size());
    const double vol = grid.cell_volume();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] = convolve_at(table, s, src, vol, static_cast<std::size_t>(i));
    return out;
}

double pow_sum(std::span<const double> a, std::span<const double> b, double p)
{
    require_same_size(a, b);
    std::vector<double> terms(a.size());
    const auto count = static_cast<std::ptrdiff_t>(a.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const auto u = static_cast<std::size_t>(i);
        terms[u] = pow_term(a[u] - b[u], p);
    }
    return pairwise_sum(terms);
}

double max_abs_diff(std::span<const double> a, std::span<const double> b)
{
    require_same_size(a, b);
    double m = 0.0;
    const auto count = static_cast<std::ptrdiff_t>(a.size());
#pragma omp parallel for schedule(static) reduction(max : m)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const auto u = static_cast<std::size_t>(i);
        m = std::max(m, std::abs(a[u] - b[u]));
    }
    return m;
}

}  // namespace parallel

std::vector<double> tabulate(const Density& f, const QuadratureGrid& grid, Exec exec)
{
    if (f.dim() != grid.dim()) throw InputError("tabulate: density and grid dimensions differ");
    return exec == Exec::serial ? serial::tabulate(f, grid) : parallel::tabulate(f, grid);
}

std::vector<double> tabulate_points(const Density& f, std::span<const double> points, Exec exec)
{
    return exec == Exec::serial ? serial::tabulate_points(f, points) : parallel::tabulate_points(f, points);
}

std::vector<double> tabulate_mixture(const Mixture& mix, const QuadratureGrid& grid, Exec exec)
{
    if (mix.dim() != grid.dim()) throw InputError("tabulate_mixture: mixture and grid dimensions differ");
    return exec == Exec::serial ? serial::tabulate_mixture(mix, grid) : parallel::tabulate_mixture(mix, grid);
}

std::vector<double> tabulate_mixture_points(const Mixture& mix, std::span<const double> points, Exec exec)
{
    return exec == Exec::serial ? serial::tabulate_mixture_points(mix, points)
                                : parallel::tabulate_mixture_points(mix, points);
}

DilatedKernelTable dilated_kernel_table(const Density& g, double k, const QuadratureGrid& grid, Exec exec)
{
    if (g.dim() != grid.dim()) throw InputError("dilated_kernel_table: kernel and grid dimensions differ");
    return exec == Exec::serial ? serial::dilated_kernel_table(g, k, grid)
                                : parallel::dilated_kernel_table(g, k, grid);
}

std::vector<double> convolve_table(const DilatedKernelTable& table, std::span<const double> h,
                                   const QuadratureGrid& grid, Exec exec)
{
    return exec == Exec::serial ? serial::convolve_table(table, h, grid) : parallel::convolve_table(table, h, grid);
}

double pow_sum(std::span<const double> a, std::span<const double> b, double p, Exec exec)
{
    return exec == Exec::serial ? serial::pow_sum(a, b, p) : parallel::pow_sum(a, b, p);
}

double max_abs_diff(std::span<const double> a, std::span<const double> b, Exec exec)
{
    return exec == Exec::serial ? serial::max_abs_diff(a, b) : parallel::max_abs_diff(a, b);
}

}  // namespace mixdense::kernels
