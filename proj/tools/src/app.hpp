#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "diamondbc/bounds.hpp"
#include "diamondbc/schemes.hpp"

namespace diamondbc::app {

// Bad flag combination; the CLI maps it to exit code 2.
class FlagError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// "x" or "start:stop:step", both endpoints included.
struct DbRange {
    double start = 0.0;
    double stop = 0.0;
    double step = 1.0;

    static DbRange parse(const std::string& text);
    std::vector<double> values() const;
};

std::vector<std::string> split_list(const std::string& text);

struct RunConfig {
    std::size_t samples = 1'000'000;
    std::uint64_t master_seed = kDefaultSeed;
    std::optional<std::string> cache_dir;
    AfTables af_tables = AfTables::unconditional;
};

struct Job {
    double ps_db = 0.0;
    double pr_db = 0.0;
    std::string scheme;  // df | af | daf | cf | cutset | rc | dfub
    std::string metric;  // throughput | expected
    std::string layers;  // 1 | 2 | 3 | inf
};

struct Row {
    Job job;
    double value = 0.0;
    std::string params;
    std::size_t n_mc = 0;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;
};

bool is_bound(const std::string& scheme);
/// Throws FlagError when the scheme/metric/layers combination has no engine.
void check_job(const Job& job);
/// Evaluates one job. Numeric failures come back as failed rows.
Row evaluate(const Job& job, const RunConfig& cfg);

std::string csv_header();
std::string csv_row(const Row& r);

struct SweepSpec {
    DbRange ps_db;
    DbRange pr_db;
    std::vector<std::string> schemes;
    std::vector<std::string> bounds;
    std::string metric = "throughput";
    std::string layers = "1";
};

std::vector<Job> sweep_jobs(const SweepSpec& spec);
/// Rows sorted by (ps_db, pr_db, scheme). threads > 1 evaluates points concurrently.
std::vector<Row> run_jobs(const std::vector<Job>& jobs, const RunConfig& cfg, unsigned threads);
std::string render_csv(const std::vector<Row>& rows);
std::string render_svg(const std::vector<Row>& rows);

struct Check {
    std::string name;
    double statistic = 0.0;
    double tolerance = 0.0;
    bool pass = true;
    bool info = false;  // reported only
    std::string detail;
};

inline const std::vector<std::string> kSuites{"alamouti", "df", "daf", "cf", "bounds"};

std::vector<Check> validate_alamouti(const RunConfig& cfg);
std::vector<Check> validate_df(const RunConfig& cfg);
std::vector<Check> validate_daf(const RunConfig& cfg);
std::vector<Check> validate_cf(const RunConfig& cfg);
std::vector<Check> validate_bounds(const RunConfig& cfg);
/// Every scheme row at or below every applicable bound row of the same
/// point, with 3 standard errors of slack for MC-backed values.
std::vector<Check> dominance_checks(const std::vector<Row>& rows, std::size_t samples);
std::vector<Check> validate_suite(const std::string& suite, const RunConfig& cfg);

}  // namespace diamondbc::app
