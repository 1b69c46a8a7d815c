#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "app.hpp"

using namespace diamondbc;
using namespace diamondbc::app;

namespace {

constexpr int kExitFlags = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitPartial = 4;
constexpr int kExitValidate = 5;

bool write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
    return static_cast<bool>(f);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Two-relay diamond channel rates under broadcast coding"};
    cli.require_subcommand(1);

    RunConfig cfg;
    cfg.master_seed = default_master_seed();
    std::string seed_text;
    std::string cache_dir;
    std::string af_tables = "unconditional";
    unsigned threads = 0;
    cli.add_option("--cache-dir", cache_dir, "directory for cached gain tables");
    cli.add_option("--threads", threads, "worker threads (0 = hardware)");
    cli.add_option("--samples", cfg.samples, "Monte Carlo draws per table or oracle")
        ->check(CLI::Range(static_cast<double>(kMinTabulationSamples), 1e12));
    cli.add_option("--seed", seed_text, "master seed (decimal or 0x hex; default DIAMONDBC_SEED)");
    cli.add_option("--af-tables", af_tables, "AF CDF reading")->check(CLI::IsMember({"unconditional", "gated"}));

    Job point_job{0.0, 0.0, "", "throughput", "1"};
    auto* point = cli.add_subcommand("point", "evaluate one scheme or bound at one power pair");
    point->add_option("--scheme", point_job.scheme, "df|af|daf|cf|cutset|rc|dfub")->required();
    point->add_option("--metric", point_job.metric, "throughput|expected");
    point->add_option("--layers", point_job.layers, "1|2|3|inf");
    point->add_option("--ps-db", point_job.ps_db, "source power (dB)")->required();
    point->add_option("--pr-db", point_job.pr_db, "relay power (dB)")->required();

    std::string sw_ps = "0", sw_pr, sw_schemes, sw_bounds, sw_out, sw_plot;
    SweepSpec spec;
    auto* sweep = cli.add_subcommand("sweep", "evaluate schemes and bounds over a dB grid");
    sweep->add_option("--ps-db", sw_ps, "value or start:stop:step");
    sweep->add_option("--pr-db", sw_pr, "value or start:stop:step")->required();
    sweep->add_option("--schemes", sw_schemes, "comma list of df,af,daf,cf");
    sweep->add_option("--bounds", sw_bounds, "comma list of cutset,rc,dfub");
    sweep->add_option("--metric", spec.metric, "throughput|expected");
    sweep->add_option("--layers", spec.layers, "1|2|3|inf");
    sweep->add_option("--out", sw_out, "CSV path (default standard output)");
    sweep->add_option("--plot", sw_plot, "SVG path");

    std::string suite = "all";
    auto* validate = cli.add_subcommand("validate", "oracle vs analytic checks");
    validate->add_option("suite", suite, "alamouti|df|daf|cf|bounds|all");

    double b_ps = 0.0, b_pr = 0.0;
    auto* bounds = cli.add_subcommand("bounds", "every upper bound at one power pair");
    bounds->add_option("--ps-db", b_ps, "source power (dB)")->required();
    bounds->add_option("--pr-db", b_pr, "relay power (dB)")->required();

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? 0 : kExitFlags;
    }

    try {
        if (!seed_text.empty()) cfg.master_seed = parse_seed(seed_text.c_str());
        if (!cache_dir.empty()) cfg.cache_dir = cache_dir;
        cfg.af_tables = af_tables == "gated" ? AfTables::gated : AfTables::unconditional;
        if (threads > 0) set_worker_threads(threads);

        if (*point) {
            check_job(point_job);
            const Row row = evaluate(point_job, cfg);
            std::cout << csv_header() << '\n' << csv_row(row) << '\n';
            if (row.failed) {
                std::cerr << "numeric failure: " << row.error << '\n';
                return kExitNumeric;
            }
            return 0;
        }

        if (*sweep) {
            spec.ps_db = DbRange::parse(sw_ps);
            spec.pr_db = DbRange::parse(sw_pr);
            spec.schemes = split_list(sw_schemes);
            spec.bounds = split_list(sw_bounds);
            for (const auto& s : spec.schemes)
                if (is_bound(s)) throw FlagError("'" + s + "' is a bound; pass it with --bounds");
            for (const auto& b : spec.bounds)
                if (!is_bound(b)) throw FlagError("'" + b + "' is not a bound (cutset|rc|dfub)");
            const auto jobs = sweep_jobs(spec);
            const unsigned t = threads > 0 ? threads : worker_threads();
            const auto rows = run_jobs(jobs, cfg, t);
            const std::string csv = render_csv(rows);
            if (sw_out.empty()) {
                std::cout << csv;
            } else if (!write_file(sw_out, csv)) {
                std::cerr << "cannot write " << sw_out << '\n';
                return kExitFlags;
            }
            if (!sw_plot.empty() && !write_file(sw_plot, render_svg(rows))) {
                std::cerr << "cannot write " << sw_plot << '\n';
                return kExitFlags;
            }
            int failed = 0;
            for (const auto& r : rows)
                if (r.failed) {
                    ++failed;
                    std::cerr << "failed: " << r.job.scheme << " ps_db=" << r.job.ps_db << " pr_db=" << r.job.pr_db << ": " << r.error << '\n';
                }
            return failed > 0 ? kExitPartial : 0;
        }

        if (*validate) {
            const auto checks = validate_suite(suite, cfg);
            std::vector<std::string> failing;
            for (const auto& c : checks) {
                const char* tag = c.info ? "INFO" : (c.pass ? "ok  " : "FAIL");
                std::printf("%s %-58s stat=%-11.4g tol=%-9.3g %s\n", tag, c.name.c_str(), c.statistic, c.tolerance,
                            c.detail.c_str());
                if (!c.info && !c.pass) failing.push_back(c.name);
            }
            if (!failing.empty()) {
                std::printf("%zu failing check(s):\n", failing.size());
                for (const auto& f : failing) std::printf("  %s\n", f.c_str());
                return kExitValidate;
            }
            std::printf("all %zu checks passed\n", checks.size());
            return 0;
        }

        if (*bounds) {
            std::vector<Job> jobs{{b_ps, b_pr, "cutset", "throughput", "1"},
                                  {b_ps, b_pr, "rc", "throughput", "1"},
                                  {b_ps, b_pr, "cutset", "expected", "inf"},
                                  {b_ps, b_pr, "dfub", "expected", "inf"}};
            std::cout << csv_header() << '\n';
            bool failed = false;
            for (const auto& j : jobs) {
                const Row r = evaluate(j, cfg);
                failed |= r.failed;
                std::cout << csv_row(r) << '\n';
            }
            return failed ? kExitNumeric : 0;
        }
    } catch (const FlagError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << cli.help();
        return kExitFlags;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFlags;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    }
    return 0;
}
