#include "mixdense/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "mixdense/analysis.hpp"
#include "mixdense/classes.hpp"
#include "mixdense/constructive.hpp"
#include "mixdense/greedy.hpp"
#include "mixdense/grid.hpp"
#include "mixdense/kernels.hpp"
#include "mixdense/mixture.hpp"

namespace mixdense {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

double json_number(double v) { return std::isfinite(v) ? v : nan; }

json number_or_null(double v)
{
    if (std::isfinite(v)) return v;
    return nullptr;
}

class Stopwatch {
public:
    double ms() const
    {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Density resolve(const std::string& name, const char* role)
{
    try {
        return catalog_entry(name);
    } catch (const InputError&) {
        throw ConfigError(std::string("unknown ") + role + " '" + name + "'");
    }
}

Box parse_box(const json& j, const char* what)
{
    if (!j.is_object()) throw ConfigError(std::string(what) + " must be an object");
    for (const auto& [key, _] : j.items())
        if (key != "lower" && key != "upper") throw ConfigError(std::string(what) + ": unknown key '" + key + "'");
    auto axis = [&](const char* key) {
        const json& v = j.at(key);
        if (v.is_number()) return std::vector<double>{v.get<double>()};
        return v.get<std::vector<double>>();
    };
    Box b{axis("lower"), axis("upper")};
    if (b.lower.size() != b.upper.size() || b.lower.empty())
        throw ConfigError(std::string(what) + ": lower and upper must have the same nonzero length");
    try {
        b.check();
    } catch (const InputError& e) {
        throw ConfigError(std::string(what) + ": " + e.what());
    }
    return b;
}

const std::set<std::string>& known_keys()
{
    static const std::set<std::string> keys{
        "name",   "mode", "target", "kernel",         "epsilon_schedule", "m_schedule",
        "p",      "K_box", "gamma", "grid",           "seed",             "k",
        "k_cap",  "candidates",     "output_path",    "budget_seconds"};
    return keys;
}

QuadratureGrid make_grid(const RunConfig& c) { return QuadratureGrid(c.grid->box, c.grid->points_per_axis); }

std::vector<std::string> nan_cells(std::size_t count) { return std::vector<std::string>(count, "nan"); }

}  // namespace

std::string to_string(Mode mode)
{
    switch (mode) {
    case Mode::uniform: return "uniform";
    case Mode::compact: return "compact";
    case Mode::lp: return "lp";
    case Mode::l1: return "l1";
    case Mode::classes: return "classes";
    }
    return "?";
}

Mode parse_mode(const std::string& text)
{
    for (Mode m : {Mode::uniform, Mode::compact, Mode::lp, Mode::l1, Mode::classes})
        if (to_string(m) == text) return m;
    throw ConfigError("unknown mode '" + text + "'");
}

RunConfig RunConfig::from_json(const json& j, const fs::path& base_dir)
{
    if (!j.is_object()) throw ConfigError("run config must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (!known_keys().count(key)) throw ConfigError("unknown config key '" + key + "'");
    RunConfig c;
    try {
        c.mode = parse_mode(j.at("mode").get<std::string>());
        c.target = j.at("target").get<std::string>();
        c.kernel = j.value("kernel", std::string{});
        c.name = j.value("name", c.target + "-" + to_string(c.mode));
        if (j.contains("epsilon_schedule")) c.epsilon_schedule = j["epsilon_schedule"].get<std::vector<double>>();
        if (j.contains("m_schedule")) c.m_schedule = j["m_schedule"].get<std::vector<std::size_t>>();
        if (j.contains("p")) c.p = j["p"].get<double>();
        if (j.contains("K_box")) c.K_box = parse_box(j["K_box"], "K_box");
        if (j.contains("gamma")) c.gamma = j["gamma"].get<double>();
        if (j.contains("grid")) {
            const json& g = j["grid"];
            GridSpec spec;
            spec.box = parse_box(json{{"lower", g.at("lower")}, {"upper", g.at("upper")}}, "grid");
            spec.points_per_axis = g.at("points_per_axis").get<std::size_t>();
            for (const auto& [key, _] : g.items())
                if (key != "lower" && key != "upper" && key != "points_per_axis")
                    throw ConfigError("grid: unknown key '" + key + "'");
            c.grid = spec;
        }
        if (j.contains("seed")) c.seed = j["seed"].get<unsigned long long>();
        if (j.contains("k")) c.k = j["k"].get<double>();
        if (j.contains("k_cap")) c.k_cap = j["k_cap"].get<double>();
        if (j.contains("candidates")) {
            const json& cj = j["candidates"];
            c.candidates = CandidateSpec{cj.at("lower").get<double>(), cj.at("upper").get<double>(),
                                         cj.at("count").get<std::size_t>()};
        }
        if (j.contains("budget_seconds")) c.budget_seconds = j["budget_seconds"].get<double>();
        fs::path out = j.value("output_path", c.name + ".csv");
        c.output_path = out.is_relative() ? base_dir / out : out;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    c.validate();
    return c;
}

RunConfig RunConfig::load(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("cannot parse " + path.string() + ": " + e.what());
    }
    return from_json(j, path.parent_path());
}

void RunConfig::validate() const
{
    if (name.empty()) throw ConfigError("run name is empty");
    const Density f = resolve(target, "target");
    if (!(budget_seconds > 0.0)) throw ConfigError("budget_seconds must be positive");

    if (mode == Mode::classes) {
        if (f.dim() != 1) throw ConfigError("classes mode needs a one-dimensional target");
        return;
    }

    if (kernel.empty()) throw ConfigError("mode " + to_string(mode) + " needs a kernel");
    const Density g = resolve(kernel, "kernel");
    if (!grid) throw ConfigError("mode " + to_string(mode) + " needs a grid");
    if (grid->box.dim() != f.dim() || g.dim() != f.dim())
        throw ConfigError("target, kernel and grid dimensions differ");
    if (grid->points_per_axis == 0) throw ConfigError("grid.points_per_axis must be positive");
    try {
        (void)make_grid(*this);
    } catch (const Error& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }
    if (!g.flags().is_pdf) throw ConfigError("kernel '" + kernel + "' is not a pdf");
    for (double e : epsilon_schedule)
        if (!(e > 0.0) || !std::isfinite(e)) throw ConfigError("epsilon_schedule entries must be positive");
    if (k_cap && !(*k_cap >= 1.0)) throw ConfigError("k_cap must be at least 1");

    const bool construction = mode == Mode::uniform || mode == Mode::compact || mode == Mode::l1;
    if (construction) {
        if (epsilon_schedule.empty()) throw ConfigError("mode " + to_string(mode) + " needs epsilon_schedule");
        if (!f.flags().is_pdf) throw ConfigError("target '" + target + "' is not a pdf");
        if (!g.sup_bound()) throw ConfigError("kernel '" + kernel + "' has no sup bound");
    }
    switch (mode) {
    case Mode::uniform:
        if (!f.flags().in_c0) throw ConfigError("uniform mode needs a C0 target");
        if (!g.flags().in_c0) throw ConfigError("uniform mode needs a C0 kernel");
        break;
    case Mode::compact:
        if (!K_box) throw ConfigError("compact mode needs K_box");
        if (K_box->dim() != f.dim()) throw ConfigError("K_box has the wrong dimension");
        if (!f.flags().in_cb) throw ConfigError("compact mode needs a bounded continuous target");
        break;
    case Mode::l1:
        if (!g.tail_params()) throw ConfigError("l1 mode needs a kernel with tail parameters");
        if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1)");
        break;
    case Mode::lp:
        if (!p) throw ConfigError("lp mode needs p");
        if (!(*p >= 1.0) || !std::isfinite(*p)) throw ConfigError("p must be in [1, inf)");
        if (m_schedule.empty()) throw ConfigError("lp mode needs m_schedule");
        for (std::size_t i = 0; i < m_schedule.size(); ++i)
            if (m_schedule[i] == 0 || (i > 0 && m_schedule[i] <= m_schedule[i - 1]))
                throw ConfigError("m_schedule must be positive and increasing");
        if (!candidates || candidates->count == 0) throw ConfigError("lp mode needs candidates");
        if (!k && epsilon_schedule.empty()) throw ConfigError("lp mode needs k or an epsilon_schedule");
        if (k && !(*k > 0.0)) throw ConfigError("k must be positive");
        break;
    case Mode::classes: break;
    }
}

std::vector<std::string> columns_for(Mode mode)
{
    switch (mode) {
    case Mode::uniform:
    case Mode::compact:
    case Mode::l1:
        return {"f",  "g",  "mode", "epsilon", "r",  "k",          "delta",         "m",    "remainder_weight",
                "l1", "l2", "linf", "kl",      "pointwise_max", "measure_frac", "tail_bound", "pass", "wall_ms"};
    case Mode::lp:
        return {"target",           "kernel",          "mode", "p",    "m", "k", "lp_error_smoothed", "lp_error_total",
                "smoothing_error", "rate_bound", "pass", "wall_ms"};
    case Mode::classes: return {"kind", "i", "x", "value", "reference", "pass"};
    }
    return {};
}

std::string suite_header() { return "run_name,mode,target,kernel,param,error,bound,pass,wall_ms"; }

namespace {

// ---- construction modes ----

ReportRow construction_row(const RunConfig& c, const Density& f, const Density& g, const QuadratureGrid& grid,
                           double eps)
{
    Stopwatch clock;
    PipelineOptions opt;
    opt.deadline = Deadline::after_seconds(c.budget_seconds);
    opt.k_cap = c.k_cap;
    opt.seed = c.seed;
    ReportRow row;
    row.param = "epsilon=" + fmt(eps);
    row.bound = eps;
    try {
        Construction out = [&] {
            switch (c.mode) {
            case Mode::uniform: return uniform_approximate(f, g, eps, grid, opt);
            case Mode::compact: return compact_uniform_approximate(f, g, *c.K_box, eps, grid, opt);
            default: return l1_approximate(f, g, eps, c.gamma, grid, opt);
            }
        }();
        const ConstructionTrace& t = out.trace;
        bool pass = false;
        if (c.mode == Mode::l1) {
            row.error = t.measured.l1;
            pass = t.measured.l1 <= eps && t.tail_bound <= eps / 24.0;
        } else {
            row.error = t.measured.linf;
            pass = t.measured.linf <= eps;
            if (c.mode == Mode::uniform) pass = pass && t.pointwise_max <= eps;
        }
        pass = pass && out.mixture.valid();
        row.pass = pass;
        row.weight_sum = out.mixture.weight_sum();
        row.min_weight = out.mixture.min_weight();
        row.cells = {f.name(),
                     g.name(),
                     t.mode,
                     fmt(eps),
                     fmt(t.r),
                     fmt(t.k),
                     fmt(t.delta),
                     std::to_string(t.m),
                     fmt(t.remainder_weight),
                     fmt(t.measured.l1),
                     fmt(t.measured.l2),
                     fmt(t.measured.linf),
                     fmt(t.measured.kl.value_or(nan)),
                     fmt(t.pointwise_max),
                     fmt(t.measure_frac),
                     fmt(t.tail_bound),
                     fmt_bool(pass)};
        row.failure = t.notes;
    } catch (const PreconditionError& e) {
        throw ConfigError(e.what());
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        row.pass = false;
        row.error = nan;
        row.cells = nan_cells(17);
        row.cells[0] = f.name();
        row.cells[1] = g.name();
        row.cells[2] = to_string(c.mode);
        row.cells[3] = fmt(eps);
        row.cells[16] = fmt_bool(false);
        row.failure = e.what();
        if (const auto* nc = dynamic_cast<const NonconvergenceError*>(&e))
            if (!nc->partial_trace().empty()) row.failure += " [" + nc->partial_trace() + "]";
    }
    row.wall_ms = clock.ms();
    return row;
}

// ---- lp mode ----

void run_lp(const RunConfig& c, ApproxReport& report)
{
    const Density f = catalog_entry(c.target);
    const Density g = catalog_entry(c.kernel);
    const QuadratureGrid grid = make_grid(c);
    const double p = *c.p;
    const bool has_eps = !c.epsilon_schedule.empty();
    const double eps = has_eps ? c.epsilon_schedule.back() : nan;
    const std::size_t m_max = c.m_schedule.back();

    Stopwatch clock;
    auto fail_all = [&](const std::string& why) {
        for (std::size_t m : c.m_schedule) {
            ReportRow row;
            row.cells = {f.name(), g.name(), "lp", fmt(p), std::to_string(m), "nan", "nan",
                         "nan",    "nan",    "nan", fmt_bool(false)};
            row.param = "m=" + std::to_string(m);
            row.error = nan;
            row.bound = nan;
            row.failure = why;
            row.wall_ms = clock.ms();
            report.rows.push_back(std::move(row));
        }
    };

    try {
        const Smoothing s = c.k ? smooth_target(f, g, *c.k, grid, p) : target_smoothing(f, g, eps, grid, p);
        const std::vector<double> f_values = kernels::tabulate(f, grid);
        DictionarySpec dict{g, s.k,
                            linspace_candidates(f.dim(), c.candidates->lower, c.candidates->upper,
                                                c.candidates->count)};
        std::vector<double> totals(m_max + 1, nan);
        auto observe = [&](std::size_t m, std::span<const double> h) {
            totals[m] = lp_distance_values(f_values, h, p, grid);
        };
        GreedyFit fit = greedy_convex_fit_values(s.smoothed, dict, p, m_max, grid,
                                                 Deadline::after_seconds(c.budget_seconds), observe);
        const GreedyTrace& tr = fit.trace;
        const double total_ms = clock.ms();

        for (std::size_t idx = 0; idx < c.m_schedule.size(); ++idx) {
            const std::size_t m = c.m_schedule[idx];
            // An early stop leaves h_m = h_last, which is still an m-term mixture.
            const std::size_t last = std::min(m, tr.steps.size());
            const double err = last ? tr.steps[last - 1].lp_error : nan;
            double total = nan;
            for (std::size_t q = last; q > 0 && std::isnan(total); --q) total = totals[q];
            const double bound = rate_bound(tr, m);
            bool pass = err <= bound * (1.0 + 1e-12);
            if (has_eps && idx + 1 == c.m_schedule.size()) pass = pass && total <= eps;
            ReportRow row;
            row.cells = {f.name(), g.name(),   "lp",      fmt(p),      std::to_string(m), fmt(s.k),
                         fmt(err), fmt(total), fmt(s.lp_error), fmt(bound), fmt_bool(pass)};
            row.pass = pass;
            row.param = "m=" + std::to_string(m);
            row.error = err;
            row.bound = bound;
            row.wall_ms = total_ms;
            if (idx + 1 == c.m_schedule.size()) {
                row.weight_sum = fit.mixture.weight_sum();
                row.min_weight = fit.mixture.min_weight();
                row.pass = row.pass && fit.mixture.valid();
            }
            report.rows.push_back(std::move(row));
        }

        const RateCheck rc = rate_bound_check(tr, p);
        report.extras["rate_bound_check"] = {{"holds", rc.holds}, {"worst_ratio", json_number(rc.worst_ratio)}};
        report.extras["K"] = tr.K_bound;
        report.extras["C_p"] = tr.C_p;
        report.extras["alpha"] = tr.alpha;
        report.extras["k"] = s.k;
        report.extras["stopped_early"] = tr.stopped_early;
        report.trace_csv = tr.to_csv();

        ReportRow rate;
        rate.param = "rate_bound_check";
        rate.error = rc.worst_ratio;
        rate.bound = 1.0;
        rate.pass = rc.holds;
        rate.wall_ms = total_ms;
        report.summary_rows.push_back(rate);

        const std::size_t lo = std::min<std::size_t>(4, m_max);
        if (m_max > lo) {
            const double slope = loglog_slope(tr, lo, m_max);
            report.extras["loglog_slope"] = {{"lo", lo}, {"hi", m_max}, {"slope", json_number(slope)}};
            ReportRow sr;
            sr.param = "loglog_slope[" + std::to_string(lo) + "," + std::to_string(m_max) + "]";
            sr.error = slope;
            sr.bound = -0.4;
            sr.pass = slope <= -0.4;
            sr.wall_ms = total_ms;
            report.summary_rows.push_back(sr);
        }
    } catch (const PreconditionError& e) {
        throw ConfigError(e.what());
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        fail_all(e.what());
    }
}

// ---- classes mode ----

struct ClassRow {
    std::string kind;
    std::size_t i;
    double x;
    double value;
    double reference;
    double tolerance;
    bool pass;
};

double bump_mass_quadrature(std::size_t i)
{
    using boost::math::quadrature::gauss;
    const double a = static_cast<double>(i) - 1.0;
    const double mid = a + 0.5;
    auto f = [](double x) { return counterexample_eval(x); };
    return gauss<double, 30>::integrate(f, a, mid) + gauss<double, 30>::integrate(f, mid, a + 1.0);
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

std::vector<ClassRow> counterexample_rows(const Density& f)
{
    std::vector<ClassRow> rows;
    for (std::size_t i = 1; i <= 100; ++i) {
        const double x = static_cast<double>(i) - 0.5;
        const double v = counterexample_eval(x);
        const double ref = 1.0 / static_cast<double>(i);
        rows.push_back({"peak", i, x, v, ref, 0.0, v == ref});
    }
    for (std::size_t i = 1; i <= 10; ++i) {
        const double v = bump_mass_quadrature(i);
        const double ref = counterexample_bump_mass(i);
        const double di = static_cast<double>(i);
        const double closed = 1.0 / (2.0 * di * di + di);
        const double tol = 1e-12 * ref;
        rows.push_back({"mass", i, di - 0.5, v, closed, tol, std::abs(v - closed) <= tol && ref == closed});
    }
    {
        const SeriesEstimate est = counterexample_l1(1e-4);
        const double ref = 2.0 * (1.0 - std::numbers::ln2);
        const bool pass = std::abs(est.value() - ref) <= 1e-4 && est.low() <= ref && ref <= est.high();
        rows.push_back({"l1_total", est.terms, est.high() - est.low(), est.value(), ref, 1e-4, pass});
    }
    for (std::size_t j = 0; j <= 40; ++j) {
        const double x = 0.5 * static_cast<double>(j);
        const double v = std::abs(f({x - 5e-8}) - f({x + 5e-8}));
        rows.push_back({"continuity", j, x, v, 0.0, 1e-9, v < 1e-9});
    }
    {
        constexpr std::size_t N = 100000;
        const std::vector<double> S = wiener_partial_sums(f, N);
        for (std::size_t n = 1; n <= 10; ++n) {
            const double inc = S[n] - S[n - 1];
            const double ref = 1.0 / static_cast<double>(n + 1);
            rows.push_back({"wiener_increment", n, nan, inc, ref, 1e-12, std::abs(inc - ref) <= 1e-12});
        }
        std::vector<double> lx, ly;
        for (std::size_t n = 10; n <= N; n *= 10) {
            lx.push_back(std::log(static_cast<double>(n)));
            ly.push_back(S[n]);
        }
        const double slope = ls_slope(lx, ly);
        rows.push_back({"wiener_slope", 0, nan, slope, 1.0, 0.05, std::abs(slope - 1.0) < 0.05});
        const double ratio = S[N] / std::log(static_cast<double>(N));
        rows.push_back({"wiener_ratio", N, nan, ratio, 1.0, 0.05, std::abs(ratio - 1.0) < 0.05});
    }
    {
        std::vector<double> radii;
        for (double r = 1.0; r <= 1024.0; r *= 2.0) radii.push_back(r);
        std::size_t idx = 0;
        for (const auto& [beta, theta] : v_sweep_parameters()) {
            const VCheck v = check_class_V(f, beta, theta, radii);
            ++idx;
            if (v.first_violation) {
                const double x = (*v.first_violation)[0];
                const double bound = beta * std::pow(1.0 + std::abs(x), -1.0 - theta);
                rows.push_back({"v_reject", idx, x, f({x}), bound, 0.0, true});
            } else {
                rows.push_back({"v_reject", idx, nan, nan, nan, 0.0, false});
            }
        }
    }
    {
        const std::vector<double> radii{1, 2, 4, 8, 16, 32, 64};
        std::size_t idx = 0;
        for (const auto& [R, sup] : check_c0_tail(f, radii)) {
            const double ref = 1.0 / (std::floor(R) + 1.0);
            rows.push_back({"c0_tail", ++idx, R, sup, ref, 1e-12, std::abs(sup - ref) <= 1e-12});
        }
    }
    return rows;
}

std::vector<ClassRow> generic_class_rows(const Density& f)
{
    std::vector<ClassRow> rows;
    const std::vector<double> radii{1, 2, 4, 8, 16, 32, 64};
    double prev = std::numeric_limits<double>::infinity();
    std::size_t idx = 0;
    for (const auto& [R, sup] : check_c0_tail(f, radii)) {
        rows.push_back({"c0_tail", ++idx, R, sup, prev, 0.0, sup <= prev});
        prev = sup;
    }
    if (const auto v = f.tail_params()) {
        const VCheck chk = check_class_V(f, v->beta, v->theta, radii);
        rows.push_back({"v_member", 1, chk.first_violation ? (*chk.first_violation)[0] : nan, v->beta, v->theta, 0.0,
                        chk.holds_on_samples});
    }
    return rows;
}

void run_classes(const RunConfig& c, ApproxReport& report)
{
    Stopwatch clock;
    const Density f = catalog_entry(c.target);
    const std::vector<ClassRow> rows = c.target == "counterexample" ? counterexample_rows(f) : generic_class_rows(f);
    const double ms = clock.ms();
    for (const ClassRow& r : rows) {
        ReportRow row;
        row.cells = {r.kind, std::to_string(r.i), fmt(r.x), fmt(r.value), fmt(r.reference), fmt_bool(r.pass)};
        row.pass = r.pass;
        row.param = r.kind + ":" + std::to_string(r.i);
        row.error = std::abs(r.value - r.reference);
        row.bound = r.tolerance;
        row.wall_ms = ms;
        report.rows.push_back(std::move(row));
    }
}

std::string csv_line(const std::vector<std::string>& cells)
{
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
    return s;
}

void write_file(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
    if (!out) throw ConfigError("write failed for " + path.string());
}

fs::path sibling(const fs::path& p, const std::string& suffix)
{
    fs::path out = p;
    out.replace_filename(p.stem().string() + suffix);
    return out;
}

}  // namespace

bool ApproxReport::passed() const
{
    if (rows.empty()) return false;
    auto ok = [](const ReportRow& r) { return r.pass; };
    return std::all_of(rows.begin(), rows.end(), ok) && std::all_of(summary_rows.begin(), summary_rows.end(), ok);
}

std::string ApproxReport::csv(bool with_wall_ms) const
{
    std::vector<std::string> head = columns;
    if (!with_wall_ms && !head.empty() && head.back() == "wall_ms") head.pop_back();
    std::string out = csv_line(head) + "\n";
    const bool has_wall = !columns.empty() && columns.back() == "wall_ms";
    for (const ReportRow& r : rows) {
        out += csv_line(r.cells);
        if (has_wall && with_wall_ms) out += "," + fmt(r.wall_ms);
        out += "\n";
    }
    return out;
}

json ApproxReport::summary() const
{
    json rows_j = json::array();
    for (const ReportRow& r : rows) {
        json o;
        for (std::size_t i = 0; i < r.cells.size() && i < columns.size(); ++i) o[columns[i]] = r.cells[i];
        o["pass"] = r.pass;
        o["wall_ms"] = r.wall_ms;
        if (r.weight_sum) o["weight_sum"] = *r.weight_sum;
        if (r.min_weight) o["min_weight"] = *r.min_weight;
        if (!r.failure.empty()) o["note"] = r.failure;
        rows_j.push_back(std::move(o));
    }
    json checks = json::array();
    for (const ReportRow& r : summary_rows)
        checks.push_back({{"check", r.param},
                          {"value", number_or_null(r.error)},
                          {"bound", number_or_null(r.bound)},
                          {"pass", r.pass}});
    const auto passed_rows =
        static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; }));
    return {{"run_name", run_name},
            {"mode", to_string(mode)},
            {"target", target},
            {"kernel", kernel},
            {"passed", passed()},
            {"rows_passed", passed_rows},
            {"rows_total", rows.size()},
            {"rows", rows_j},
            {"checks", checks},
            {"extras", extras}};
}

ApproxReport run(const RunConfig& config)
{
    config.validate();
    ApproxReport report;
    report.run_name = config.name;
    report.mode = config.mode;
    report.target = config.target;
    report.kernel = config.kernel;
    report.columns = columns_for(config.mode);

    switch (config.mode) {
    case Mode::uniform:
    case Mode::compact:
    case Mode::l1: {
        const Density f = catalog_entry(config.target);
        const Density g = catalog_entry(config.kernel);
        const QuadratureGrid grid = make_grid(config);
        for (double eps : config.epsilon_schedule) report.rows.push_back(construction_row(config, f, g, grid, eps));
        break;
    }
    case Mode::lp: run_lp(config, report); break;
    case Mode::classes: run_classes(config, report); break;
    }
    return report;
}

ApproxReport run_and_write(const RunConfig& config)
{
    ApproxReport report = run(config);
    write_file(config.output_path, report.csv());
    write_file(sibling(config.output_path, ".summary.json"), report.summary().dump(2) + "\n");
    if (!report.trace_csv.empty()) write_file(sibling(config.output_path, "_trace.csv"), report.trace_csv);
    return report;
}

SuiteConfig SuiteConfig::load(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open suite " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("cannot parse " + path.string() + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("runs") || !j["runs"].is_array())
        throw ConfigError("suite must be an object with a 'runs' array");
    const fs::path base = path.parent_path();
    SuiteConfig suite;
    for (const json& entry : j["runs"]) {
        if (entry.is_string()) {
            fs::path p = entry.get<std::string>();
            suite.runs.push_back(RunConfig::load(p.is_relative() ? base / p : p));
        } else {
            suite.runs.push_back(RunConfig::from_json(entry, base));
        }
    }
    if (suite.runs.empty()) throw ConfigError("suite lists no runs");
    std::set<std::string> names;
    for (const RunConfig& r : suite.runs)
        if (!names.insert(r.name).second) throw ConfigError("duplicate run name '" + r.name + "'");
    fs::path out = j.value("output_path", path.stem().string() + "_combined.csv");
    suite.output_path = out.is_relative() ? base / out : out;
    return suite;
}

bool SuiteReport::passed() const
{
    return !runs.empty() && std::all_of(runs.begin(), runs.end(), [](const ApproxReport& r) { return r.passed(); });
}

std::size_t SuiteReport::rows_passed() const
{
    std::size_t n = 0;
    for (const auto& r : runs) {
        for (const auto& row : r.rows) n += row.pass;
        for (const auto& row : r.summary_rows) n += row.pass;
    }
    return n;
}

std::size_t SuiteReport::rows_total() const
{
    std::size_t n = 0;
    for (const auto& r : runs) n += r.rows.size() + r.summary_rows.size();
    return n;
}

std::string SuiteReport::combined_csv(bool with_wall_ms) const
{
    std::string out = suite_header();
    if (!with_wall_ms) out.resize(out.size() - std::string(",wall_ms").size());
    out += "\n";
    for (const ApproxReport& r : runs) {
        auto emit = [&](const ReportRow& row) {
            out += csv_line({r.run_name, to_string(r.mode), r.target, r.kernel, row.param, fmt(row.error),
                             fmt(row.bound), fmt_bool(row.pass)});
            if (with_wall_ms) out += "," + fmt(row.wall_ms);
            out += "\n";
        };
        for (const auto& row : r.rows) emit(row);
        for (const auto& row : r.summary_rows) emit(row);
    }
    return out;
}

SuiteReport run_suite(const SuiteConfig& suite)
{
    if (suite.runs.empty()) throw ConfigError("suite lists no runs");
    SuiteReport report;
    for (const RunConfig& c : suite.runs) report.runs.push_back(run(c));
    return report;
}

SuiteReport run_suite_and_write(const SuiteConfig& suite)
{
    if (suite.runs.empty()) throw ConfigError("suite lists no runs");
    SuiteReport report;
    for (const RunConfig& c : suite.runs) report.runs.push_back(run_and_write(c));
    write_file(suite.output_path, report.combined_csv());
    return report;
}

std::string strip_wall_ms(const std::string& csv)
{
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) {
        const auto comma = line.rfind(',');
        out += (comma == std::string::npos ? line : line.substr(0, comma)) + "\n";
    }
    return out;
}

}  // namespace mixdense
