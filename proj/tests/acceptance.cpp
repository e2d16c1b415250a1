// Acceptance run: executes the shipped suite (twice, for determinism) plus
// direct library checks, and prints one PASS/FAIL line per criterion.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mixdense/analysis.hpp"
#include "mixdense/classes.hpp"
#include "mixdense/experiment.hpp"
#include "mixdense/kernels.hpp"

using namespace mixdense;

namespace {

constexpr double simplex_tol = 1e-12;
constexpr double uniform_budget_ms = 60000.0;
constexpr double compact_budget_ms = 60000.0;
constexpr double lp_budget_ms = 120000.0;
constexpr double l1_budget_ms = 120000.0;
constexpr double lp_slope_bound = -0.4;
constexpr double identity_slack = 1e-6;
constexpr double measure_eps = 0.05;

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail << " [fail: " << what << "]";
        }
    }
};

void report(int n, const std::string& title, Verdict& v, int& failures)
{
    std::printf("criterion %2d: %s - %s%s\n", n, v.pass ? "PASS" : "FAIL", title.c_str(), v.detail.str().c_str());
    std::fflush(stdout);
    failures += v.pass ? 0 : 1;
}

double cell(const ApproxReport& r, const ReportRow& row, const std::string& column)
{
    const auto it = std::find(r.columns.begin(), r.columns.end(), column);
    if (it == r.columns.end()) return std::numeric_limits<double>::quiet_NaN();
    const auto idx = static_cast<std::size_t>(it - r.columns.begin());
    if (idx >= row.cells.size()) return std::numeric_limits<double>::quiet_NaN();
    try {
        return std::stod(row.cells[idx]);
    } catch (...) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

const ApproxReport* find_run(const SuiteReport& s, Mode mode, const std::string& target)
{
    for (const auto& r : s.runs)
        if (r.mode == mode && r.target == target) return &r;
    return nullptr;
}

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

QuadratureGrid check_grid(std::size_t dim)
{
    return dim == 1 ? QuadratureGrid(Box::cube(1, -16.0, 16.0), 8192) : QuadratureGrid(Box::cube(2, -4.0, 4.0), 256);
}

Density normal_kernel(std::size_t dim) { return catalog_entry(dim == 1 ? "normal" : "normal2d"); }

}  // namespace

int main()
{
    const auto suite_path = std::filesystem::path(MIXDENSE_SOURCE_DIR) / "suites" / "acceptance.json";
    const SuiteConfig suite = SuiteConfig::load(suite_path);
    const SuiteReport first = run_suite(suite);
    const SuiteReport second = run_suite(suite);
    int failures = 0;

    const ApproxReport* uni = find_run(first, Mode::uniform, "triangular");
    const ApproxReport* com = find_run(first, Mode::compact, "cauchy");
    const ApproxReport* lp = find_run(first, Mode::lp, "laplace");
    const ApproxReport* l1 = find_run(first, Mode::l1, "triangular");
    const ApproxReport* cls = find_run(first, Mode::classes, "counterexample");

    {
        Verdict v;
        std::size_t mixtures = 0;
        double worst_sum = 0.0;
        double min_w = std::numeric_limits<double>::infinity();
        for (const auto& r : first.runs)
            for (const auto& row : r.rows) {
                if (!row.weight_sum) continue;
                ++mixtures;
                worst_sum = std::max(worst_sum, std::abs(*row.weight_sum - 1.0));
                min_w = std::min(min_w, *row.min_weight);
            }
        v.require(mixtures > 0, "no mixtures recorded");
        v.require(worst_sum <= simplex_tol, "weight sum off by " + num(worst_sum));
        v.require(min_w >= 0.0, "negative weight " + num(min_w));
        v.detail << " (" << mixtures << " mixtures, max |sum-1| = " << num(worst_sum) << ", min c = " << num(min_w)
                 << ")";
        report(1, "simplex invariant over the acceptance suite", v, failures);
    }

    {
        Verdict v;
        v.require(uni && uni->rows.size() == 3, "uniform run missing");
        if (uni)
            for (const auto& row : uni->rows) {
                const double eps = cell(*uni, row, "epsilon");
                const double linf = cell(*uni, row, "linf");
                v.require(linf <= eps, "linf " + num(linf) + " > " + num(eps));
                v.require(row.wall_ms < uniform_budget_ms, "slow run at eps " + num(eps));
                v.detail << " eps=" << num(eps) << ":linf=" << num(linf) << "," << num(row.wall_ms) << "ms";
            }
        report(2, "uniform approximation, triangular target, normal kernel", v, failures);
    }

    {
        Verdict v;
        v.require(com && com->rows.size() == 1, "compact run missing");
        if (com) {
            const auto& row = com->rows[0];
            const double linf = cell(*com, row, "linf");
            v.require(linf <= 0.05, "sup over K = " + num(linf));
            v.require(row.wall_ms < compact_budget_ms, "slow run");
            v.detail << " sup over K = " << num(linf) << ", " << num(row.wall_ms) << "ms";
        }
        report(3, "compact-set approximation, Cauchy target on [-3,3]", v, failures);
    }

    {
        Verdict v;
        v.require(lp != nullptr, "lp run missing");
        if (lp) {
            bool rate = false;
            double slope = std::numeric_limits<double>::quiet_NaN();
            for (const auto& s : lp->summary_rows) {
                if (s.param == "rate_bound_check") rate = s.pass;
                if (s.param.rfind("loglog_slope[4,64]", 0) == 0) slope = s.error;
            }
            const double C_p = lp->extras.value("C_p", 0.0);
            v.require(rate, "rate bound violated");
            v.require(C_p == 1.0, "C_2 = " + num(C_p));
            v.require(slope <= lp_slope_bound, "slope " + num(slope));
            v.require(!lp->rows.empty() && lp->rows.back().wall_ms < lp_budget_ms, "slow run");
            v.detail << " rate bound holds at every m = " << (rate ? "yes" : "no") << ", slope[4,64] = "
                     << num(slope) << ", " << num(lp->rows.empty() ? 0.0 : lp->rows.back().wall_ms) << "ms";
        }
        report(4, "greedy L2 rate, Laplace target, m <= 64", v, failures);
    }

    {
        Verdict v;
        v.require(l1 && l1->rows.size() == 2, "l1 run missing");
        if (l1)
            for (const auto& row : l1->rows) {
                const double eps = cell(*l1, row, "epsilon");
                const double err = cell(*l1, row, "l1");
                const double tail = cell(*l1, row, "tail_bound");
                v.require(err <= eps, "L1 " + num(err) + " > " + num(eps));
                v.require(tail <= eps / 24.0, "tail bound " + num(tail) + " > eps/24");
                v.require(row.wall_ms < l1_budget_ms, "slow run at eps " + num(eps));
                v.detail << " eps=" << num(eps) << ":L1=" << num(err) << ",tail=" << num(tail) << ","
                         << num(row.wall_ms) << "ms";
            }
        report(5, "L1 approximation, triangular target, Cauchy kernel", v, failures);
    }

    {
        Verdict v;
        const std::vector<double> ks{1, 2, 4, 8, 16};
        std::size_t checked = 0;
        for (const Density& f : catalog()) {
            if (!f.flags().in_c0) continue;
            ++checked;
            const auto e = approximate_identity_errors(normal_kernel(f.dim()), f, ks, check_grid(f.dim()));
            v.require(e.back() < e.front(), f.name() + " does not end below its start");
            for (std::size_t i = 2; i < e.size(); ++i)
                v.require(e[i] <= e[i - 1] + identity_slack, f.name() + " increases at k=" + num(ks[i]));
            v.detail << " " << f.name() << ":" << num(e.front()) << "->" << num(e.back());
        }
        v.require(checked > 0, "no C0 densities");
        report(6, "approximate identity on every C0 catalog density", v, failures);
    }

    {
        Verdict v;
        std::size_t pairs = 0;
        double worst = -std::numeric_limits<double>::infinity();
        for (const Density& g : catalog()) {
            if (!g.flags().is_pdf) continue;
            for (const Density& f : catalog()) {
                if (f.dim() != g.dim()) continue;
                for (double p : {1.0, 2.0}) {
                    const auto r = youngs_check(g, f, p, check_grid(f.dim()));
                    ++pairs;
                    worst = std::max(worst, r.lhs - r.rhs);
                    v.require(r.holds, f.name() + "*" + g.name() + " p=" + num(p));
                }
            }
        }
        v.detail << " (" << pairs << " checks, max lhs - rhs = " << num(worst) << ")";
        report(7, "Young's inequality for catalog pairs at p in {1, 2}", v, failures);
    }

    {
        Verdict v;
        v.require(cls != nullptr, "classes run missing");
        if (cls) {
            std::map<std::string, std::pair<int, int>> by_kind;
            for (const auto& row : cls->rows) {
                auto& [ok, total] = by_kind[row.cells[0]];
                ++total;
                ok += row.pass;
                if (row.cells[0] == "wiener_ratio" || row.cells[0] == "l1_total")
                    v.detail << " " << row.cells[0] << "=" << row.cells[3];
            }
            const std::vector<std::pair<std::string, std::string>> items{
                {"mass", "bump masses"},           {"l1_total", "series total"},
                {"peak", "peak values"},           {"wiener_ratio", "S_N / ln N at N = 1e5"},
                {"v_reject", "class V rejections"}, {"continuity", "continuity residuals"}};
            for (const auto& [kind, label] : items) {
                const auto it = by_kind.find(kind);
                const bool ok = it != by_kind.end() && it->second.first == it->second.second;
                v.require(ok, label);
                if (it != by_kind.end())
                    v.detail << " " << kind << " " << it->second.first << "/" << it->second.second;
            }
        }
        report(8, "counterexample arithmetic", v, failures);
    }

    {
        Verdict v;
        v.require(uni != nullptr, "uniform run missing");
        if (uni)
            for (const auto& row : uni->rows) {
                const double eps = cell(*uni, row, "epsilon");
                const double pmax = cell(*uni, row, "pointwise_max");
                const double frac = cell(*uni, row, "measure_frac");
                v.require(pmax <= eps, "pointwise max " + num(pmax) + " > " + num(eps));
                if (eps == measure_eps) v.require(frac == 0.0, "measure fraction " + num(frac) + " at eps 0.05");
                v.detail << " eps=" << num(eps) << ":max=" << num(pmax) << ",frac=" << num(frac);
            }
        report(9, "pointwise and measure proxies for the uniform runs", v, failures);
    }

    {
        Verdict v;
        v.require(first.combined_csv(false) == second.combined_csv(false), "combined CSV bodies differ");
        for (std::size_t i = 0; i < first.runs.size() && i < second.runs.size(); ++i)
            v.require(first.runs[i].csv(false) == second.runs[i].csv(false), first.runs[i].run_name + " differs");
        v.detail << " (" << first.runs.size() << " runs, " << first.rows_total() << " rows compared)";
        report(10, "determinism across repeated suite runs", v, failures);
    }

    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
