#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "mixdense/density.hpp"
#include "mixdense/errors.hpp"

namespace mixdense {

/// A config that cannot be run as written. Maps to exit code 2.
class ConfigError : public InputError {
public:
    using InputError::InputError;
};

enum class Mode { uniform, compact, lp, l1, classes };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& text);

struct GridSpec {
    Box box;
    std::size_t points_per_axis = 0;
};

struct CandidateSpec {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t count = 0;
};

struct RunConfig {
    std::string name;
    Mode mode = Mode::uniform;
    std::string target;
    std::string kernel;
    std::vector<double> epsilon_schedule;
    std::vector<std::size_t> m_schedule;
    std::optional<double> p;
    std::optional<Box> K_box;
    double gamma = 0.5;
    std::optional<GridSpec> grid;
    unsigned long long seed = 20240611;
    /// Fixed dilation for lp mode; chosen by target smoothing when absent.
    std::optional<double> k;
    std::optional<double> k_cap;
    std::optional<CandidateSpec> candidates;
    std::filesystem::path output_path;
    double budget_seconds = 120.0;

    /// Parses and validates; relative output paths resolve against base_dir.
    static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
    static RunConfig load(const std::filesystem::path& path);
    /// Throws ConfigError for missing mode fields, unknown names or class mismatches.
    void validate() const;
};

/// One schedule entry. `cells` follows the mode's column list minus wall_ms.
struct ReportRow {
    std::vector<std::string> cells;
    bool pass = false;
    double wall_ms = 0.0;
    // Columns of the combined suite table.
    std::string param;
    double error = 0.0;
    double bound = 0.0;
    // Simplex bookkeeping for mixtures the row produced.
    std::optional<double> weight_sum;
    std::optional<double> min_weight;
    std::string failure;
};

struct ApproxReport {
    std::string run_name;
    Mode mode = Mode::uniform;
    std::string target;
    std::string kernel;
    std::vector<std::string> columns;
    std::vector<ReportRow> rows;
    /// Rows that only appear in the combined suite table (e.g. a fitted slope).
    std::vector<ReportRow> summary_rows;
    nlohmann::json extras = nlohmann::json::object();
    /// Greedy trace for lp runs.
    std::string trace_csv;

    bool passed() const;
    std::string csv(bool with_wall_ms = true) const;
    nlohmann::json summary() const;
};

std::vector<std::string> columns_for(Mode mode);
std::string suite_header();

/// Runs the pipeline for every schedule entry. Throws ConfigError for usage errors;
/// numeric failures are recorded as failing rows.
ApproxReport run(const RunConfig& config);

/// run() plus the CSV, the JSON summary and (lp) the greedy trace next to output_path.
ApproxReport run_and_write(const RunConfig& config);

struct SuiteConfig {
    std::vector<RunConfig> runs;
    std::filesystem::path output_path;

    static SuiteConfig load(const std::filesystem::path& path);
};

struct SuiteReport {
    std::vector<ApproxReport> runs;

    bool passed() const;
    std::size_t rows_passed() const;
    std::size_t rows_total() const;
    std::string combined_csv(bool with_wall_ms = true) const;
};

SuiteReport run_suite(const SuiteConfig& suite);
/// run_suite plus every per-run file and the combined CSV.
SuiteReport run_suite_and_write(const SuiteConfig& suite);

/// Drops the trailing wall_ms column of every line.
std::string strip_wall_ms(const std::string& csv);

}  // namespace mixdense
