#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "mixdense/classes.hpp"
#include "mixdense/experiment.hpp"

namespace {

constexpr int exit_pass = 0;
constexpr int exit_numeric = 1;
constexpr int exit_usage = 2;

std::string opt_num(const std::optional<double>& v)
{
    if (!v) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", *v);
    return buf;
}

int print_catalog()
{
    std::cout << "name,dim,pdf,c0,cc,cb,support_radius,sup_bound,beta,theta\n";
    for (const mixdense::Density& d : mixdense::catalog()) {
        const auto& fl = d.flags();
        const auto v = d.tail_params();
        std::cout << d.name() << ',' << d.dim() << ',' << fl.is_pdf << ',' << fl.in_c0 << ',' << fl.in_cc << ','
                  << fl.in_cb << ',' << opt_num(d.support_radius()) << ',' << opt_num(d.sup_bound()) << ','
                  << opt_num(v ? std::optional(v->beta) : std::nullopt) << ','
                  << opt_num(v ? std::optional(v->theta) : std::nullopt) << '\n';
    }
    return exit_pass;
}

int run_one(const std::string& path)
{
    const auto config = mixdense::RunConfig::load(path);
    const auto report = mixdense::run_and_write(config);
    std::size_t ok = 0;
    for (const auto& r : report.rows) ok += r.pass;
    std::cout << report.run_name << ": " << ok << "/" << report.rows.size() << " rows pass";
    for (const auto& r : report.summary_rows) std::cout << ", " << r.param << (r.pass ? " pass" : " FAIL");
    std::cout << " -> " << config.output_path.string() << '\n';
    for (const auto& r : report.rows)
        if (!r.pass && !r.failure.empty()) std::cerr << "  " << r.param << ": " << r.failure << '\n';
    return report.passed() ? exit_pass : exit_numeric;
}

int run_suite(const std::string& path)
{
    const auto suite = mixdense::SuiteConfig::load(path);
    const auto report = mixdense::run_suite_and_write(suite);
    for (const auto& r : report.runs)
        std::cout << (r.passed() ? "PASS " : "FAIL ") << r.run_name << '\n';
    std::cout << report.rows_passed() << "/" << report.rows_total() << " rows pass -> "
              << suite.output_path.string() << '\n';
    return report.passed() ? exit_pass : exit_numeric;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Finite location-scale mixture approximations"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "Run one config and write its CSV and summary");
    run->add_option("config", config_path, "JSON run config")->required();

    std::string suite_path;
    auto* suite = app.add_subcommand("suite", "Run every config a suite lists");
    suite->add_option("path", suite_path, "JSON suite file")->required();

    auto* cat = app.add_subcommand("catalog", "List built-in densities and class flags");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (*cat) return print_catalog();
        if (*run) return run_one(config_path);
        if (*suite) return run_suite(suite_path);
    } catch (const mixdense::ConfigError& e) {
        std::cerr << "mixdense: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "mixdense: " << e.what() << '\n';
        return exit_numeric;
    }
    return exit_usage;
}
