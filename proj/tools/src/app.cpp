#include "app.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <thread>

namespace diamondbc::app {

namespace {

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

double parse_number(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw FlagError("not a number: '" + s + "'");
    }
    if (used != s.size() || !std::isfinite(v)) throw FlagError("not a number: '" + s + "'");
    return v;
}

}  // namespace

DbRange DbRange::parse(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() == 1) {
        const double v = parse_number(parts[0]);
        return {v, v, 1.0};
    }
    if (parts.size() != 3) throw FlagError("range must be a value or start:stop:step, got '" + text + "'");
    DbRange r{parse_number(parts[0]), parse_number(parts[1]), parse_number(parts[2])};
    if (!(r.step > 0.0)) throw FlagError("range step must be > 0");
    if (r.stop < r.start) throw FlagError("range stop must be >= start");
    return r;
}

std::vector<double> DbRange::values() const {
    std::vector<double> out;
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long i = 0; i <= count; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) out.push_back(item);
    return out;
}

bool is_bound(const std::string& scheme) { return scheme == "cutset" || scheme == "rc" || scheme == "dfub"; }

void check_job(const Job& job) {
    const auto& s = job.scheme;
    const auto& m = job.metric;
    const auto& l = job.layers;
    if (m != "throughput" && m != "expected") throw FlagError("unknown metric '" + m + "' (throughput|expected)");
    if (l != "1" && l != "2" && l != "3" && l != "inf") throw FlagError("unknown layers '" + l + "' (1|2|3|inf)");
    if (s == "cutset") return;
    if (s == "rc") {
        if (m != "throughput") throw FlagError("rc bound exists for the throughput metric only");
        return;
    }
    if (s == "dfub") {
        if (m != "expected") throw FlagError("dfub bound exists for the expected metric only");
        return;
    }
    if (s != "df" && s != "af" && s != "daf" && s != "cf") throw FlagError("unknown scheme '" + s + "'");
    if (m == "throughput") {
        if (l != "1") throw FlagError("throughput is single-layer; use --layers 1");
        return;
    }
    const bool finite = s == "df" || s == "daf";
    if (finite && l == "inf") throw FlagError(s + " expected rate needs --layers 1, 2 or 3");
    if (!finite && l != "inf") throw FlagError(s + " expected rate needs --layers inf");
}

Row evaluate(const Job& job, const RunConfig& cfg) {
    check_job(job);
    Row row;
    row.job = job;
    row.seed = cfg.master_seed;
    const auto p = PowerConfig::from_db(job.ps_db, job.pr_db);
    EngineOptions opt;
    opt.samples = cfg.samples;
    opt.seed = {cfg.master_seed, 0};
    opt.af_tables = cfg.af_tables;
    std::optional<TableCache> cache;
    if (cfg.cache_dir) {
        cache.emplace(*cfg.cache_dir);
        opt.cache = &*cache;
    }
    const bool expected = job.metric == "expected";
    const int k = job.layers == "inf" ? 0 : std::stoi(job.layers);
    try {
        RateResult r;
        const auto& s = job.scheme;
        if (s == "cutset")
            r = expected ? cutset_expected_rate(p) : cutset_throughput(p);
        else if (s == "rc")
            r = rc_throughput(p);
        else if (s == "dfub")
            r = dfub_cutset(p);
        else if (s == "df")
            r = expected ? df_finite_expected_rate(k, p) : df_throughput(p);
        else if (s == "daf")
            r = expected ? daf_finite_expected_rate(k, p) : daf_throughput(p);
        else if (s == "af")
            r = expected ? af_expected_rate(p, false, opt) : af_throughput(p, opt);
        else
            r = expected ? cf_expected_rate(p, opt) : cf_throughput(p, opt);
        if (!std::isfinite(r.value_nats)) throw NumericError(s + ": non-finite result");
        row.value = r.value_nats;
        row.params = r.params_string();
        row.n_mc = (s == "af" || s == "cf") ? cfg.samples : 0;
    } catch (const std::runtime_error& e) {
        row.failed = true;
        row.error = e.what();
        row.value = std::numeric_limits<double>::quiet_NaN();
    }
    return row;
}

std::string csv_header() { return "ps_db,pr_db,scheme,metric,layers,value_nats,params,n_mc,seed"; }

std::string csv_row(const Row& r) {
    std::ostringstream os;
    os << fmt("%.10g", r.job.ps_db) << ',' << fmt("%.10g", r.job.pr_db) << ',' << r.job.scheme << ','
       << r.job.metric << ',' << r.job.layers << ',' << (r.failed ? std::string("nan") : fmt("%.10g", r.value))
       << ',' << r.params << ',' << r.n_mc << ',' << r.seed;
    return os.str();
}

std::vector<Job> sweep_jobs(const SweepSpec& spec) {
    std::vector<Job> jobs;
    for (double ps : spec.ps_db.values())
        for (double pr : spec.pr_db.values()) {
            for (const auto& s : spec.schemes) jobs.push_back({ps, pr, s, spec.metric, spec.layers});
            for (const auto& b : spec.bounds)
                jobs.push_back({ps, pr, b, spec.metric, spec.metric == "throughput" ? "1" : "inf"});
        }
    for (const auto& j : jobs) check_job(j);
    return jobs;
}

std::vector<Row> run_jobs(const std::vector<Job>& jobs, const RunConfig& cfg, unsigned threads) {
    std::vector<Row> rows(jobs.size());
    if (threads <= 1 || jobs.size() <= 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i) rows[i] = evaluate(jobs[i], cfg);
    } else {
        // points in parallel, each engine single-threaded
        const unsigned saved = worker_threads();
        set_worker_threads(1);
        std::atomic<std::size_t> next{0};
        auto work = [&] {
            for (std::size_t i = next++; i < jobs.size(); i = next++) rows[i] = evaluate(jobs[i], cfg);
        };
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < std::min<std::size_t>(threads, jobs.size()); ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
        set_worker_threads(saved);
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.job.ps_db != b.job.ps_db) return a.job.ps_db < b.job.ps_db;
        if (a.job.pr_db != b.job.pr_db) return a.job.pr_db < b.job.pr_db;
        return a.job.scheme < b.job.scheme;
    });
    return rows;
}

std::string render_csv(const std::vector<Row>& rows) {
    std::string out = csv_header() + "\n";
    for (const auto& r : rows) out += csv_row(r) + "\n";
    return out;
}

}  // namespace diamondbc::app
