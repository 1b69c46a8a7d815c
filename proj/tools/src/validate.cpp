#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "app.hpp"
#include "diamondbc/oracle.hpp"

namespace diamondbc::app {

namespace {

std::string fmt(const char* spec, double a) {
    char buf[160];
    std::snprintf(buf, sizeof buf, spec, a);
    return buf;
}

std::string point_name(const char* prefix, double ps, double pr) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s Ps=%g Pr=%g", prefix, ps, pr);
    return buf;
}

// |z| of an MC estimate against an exact value
Check z_check(std::string name, double exact, const SimReport& r, double limit = 3.0) {
    const double z = r.std_error > 0.0 ? (r.estimate - exact) / r.std_error : (r.estimate == exact ? 0.0 : 1e9);
    Check c;
    c.name = std::move(name);
    c.statistic = std::abs(z);
    c.tolerance = limit;
    c.pass = std::abs(z) < limit;
    char buf[160];
    std::snprintf(buf, sizeof buf, "exact=%.6f mc=%.6f se=%.2e z=%+.2f", exact, r.estimate, r.std_error, z);
    c.detail = buf;
    return c;
}

Check residual_check(std::string name, double residual, double tol, std::string detail = {}) {
    Check c;
    c.name = std::move(name);
    c.statistic = residual;
    c.tolerance = tol;
    c.pass = residual <= tol;
    c.detail = std::move(detail);
    return c;
}

std::map<std::string, double> parse_params(const std::string& text) {
    std::map<std::string, double> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ';');) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) continue;
        try {
            out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
        } catch (const std::exception&) {
        }
    }
    return out;
}

// rough MC standard error of an engine value from its reported parameters
double mc_std_error(const Row& r, std::size_t samples) {
    if (r.n_mc == 0 || samples == 0) return 0.0;
    const auto params = parse_params(r.params);
    const double ps = db_to_linear(r.job.ps_db);
    const double n = static_cast<double>(samples);
    if (r.job.metric == "throughput") {
        // value = q * rate with q a Bernoulli mean
        const auto it = params.find("s");
        if (it == params.end() || !(it->second > 0.0)) return r.value / std::sqrt(n);
        const double rate = std::log1p(ps * it->second);
        const double q = std::clamp(r.value / rate, 1e-12, 1.0);
        return rate * std::sqrt(q * (1.0 - q) / n);
    }
    // decoded rate lies in [0, xmax], so its variance is at most xmax * mean
    const auto it = params.find("s1");
    const double xmax = it != params.end() && it->second > 0.0 ? std::log1p(ps * it->second) : 10.0 * r.value;
    return std::sqrt(std::max(xmax * r.value, 0.0) / n);
}

}  // namespace

std::vector<Check> validate_alamouti(const RunConfig& cfg) {
    std::vector<Check> out;
    const std::size_t n = std::max<std::size_t>(cfg.samples / 10, 100'000);
    const SeedSpec seed{cfg.master_seed, 40};
    for (auto [ps, pr] : {std::pair{1.0, 1.0}, {1.0, 10.0}, {10.0, 1.0}, {0.1, 100.0}}) {
        const PowerConfig p{ps, pr};
        double worst = 0.0, worst_single = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto s = fading_at(seed, i);
            const double ref = std::log1p(ps * gain_af2(s, p));
            const double mi = alamouti_af_mutual_info(s, p);
            if (ref > 0.0) worst = std::max(worst, std::abs(mi - ref) / ref);
            // relay 2 silent: the single AF link
            const double c1 = std::sqrt(pr / (s.ar1 * ps + 1.0));
            const double ref1 = std::log1p(ps * gain_af1(s.ar1, s.a1, p));
            const double mi1 = alamouti_mutual_info(s, p, c1, 0.0);
            if (ref1 > 0.0) worst_single = std::max(worst_single, std::abs(mi1 - ref1) / ref1);
        }
        out.push_back(residual_check(point_name("alamouti two-relay", ps, pr), worst, 1e-9,
                                     "n=" + std::to_string(n) + fmt(" max rel residual=%.3e", worst)));
        out.push_back(residual_check(point_name("alamouti one-relay", ps, pr), worst_single, 1e-9,
                                     fmt("max rel residual=%.3e", worst_single)));
    }
    return out;
}

std::vector<Check> validate_df(const RunConfig& cfg) {
    std::vector<Check> out;
    const double pss[] = {0.5, 1.0, 4.0};
    const double prs[] = {0.3, 1.0, 3.0, 10.0, 100.0, 0.5, 2.0};
    const double fractions[] = {0.2, 0.5, 0.9, 0.35};
    for (int i = 0; i < 20; ++i) {
        const PowerConfig p{pss[i % 3], prs[i % 7]};
        const double s = fractions[i % 4] * df_threshold_cap(p);
        const auto r = simulate_df_single(p, s, cfg.samples, {cfg.master_seed, 100 + static_cast<std::uint64_t>(i)});
        char name[96];
        std::snprintf(name, sizeof name, "df Ps=%g Pr=%g s=%.4f", p.ps, p.pr, s);
        out.push_back(z_check(name, df_throughput_objective(p, s), r));
    }
    return out;
}

std::vector<Check> validate_daf(const RunConfig& cfg) {
    std::vector<Check> out;
    const std::size_t n = cfg.samples;
    // (1, 10): relays strong, DAF reduces to DF; (10, 1): failed relays amplify
    std::uint64_t stream = 200;
    for (auto [ps, pr] : {std::pair{1.0, 10.0}, {10.0, 1.0}}) {
        const PowerConfig p{ps, pr};
        const auto exact = daf_throughput(p);
        const double s = exact.param("s");
        const SeedSpec seed{cfg.master_seed, stream++};
        const auto sim = simulate_daf_single(p, s, n, seed);
        out.push_back(z_check(point_name("daf three-case exact vs simulation", ps, pr), exact.value_nats, sim));

        // forced modes reduce to the pure protocols on the same stream
        const auto dec = simulate_daf_single(p, s, n, seed, DafMode::decode_only);
        const auto df = simulate_df_single(p, s, n, seed);
        out.push_back(residual_check(point_name("daf decode-only equals df", ps, pr),
                                     std::abs(dec.estimate - df.estimate), 1e-12, fmt("df=%.6f", df.estimate)));
        const auto amp = simulate_daf_single(p, s, n, seed, DafMode::amplify_only);
        const auto af = simulate_af(p, s, n, seed, p.pr / p.ps);
        out.push_back(residual_check(point_name("daf amplify-only equals af gated at Pr/Ps", ps, pr),
                                     std::abs(amp.estimate - af.estimate), 1e-12, fmt("af=%.6f", af.estimate)));

        for (bool amplify : {false, true}) {
            const auto r = amplify ? daf_finite_expected_rate(2, p) : df_finite_expected_rate(2, p);
            const double value = layered_expected_rate(p, *r.plan, *r.allocations, amplify);
            const SeedSpec ls{cfg.master_seed, stream++};
            const auto lsim = amplify ? simulate_layered_daf(p, *r.plan, *r.allocations, n, ls)
                                      : simulate_layered_df(p, *r.plan, *r.allocations, n, ls);
            out.push_back(z_check(point_name(amplify ? "daf k=2 layered vs simulation" : "df k=2 layered vs simulation",
                                             ps, pr),
                                  value, lsim));
        }

        Check printed;
        printed.name = point_name("daf printed three-branch formula", ps, pr);
        printed.info = true;
        EngineOptions eo;
        eo.samples = n;
        eo.seed = {cfg.master_seed, 0};
        eo.af_tables = cfg.af_tables;
        const auto pf = daf_throughput_printed(p, eo);
        printed.statistic = pf.value_nats;
        printed.detail = fmt("printed=%.6f", pf.value_nats) + fmt(" exact=%.6f", exact.value_nats);
        out.push_back(printed);

        Check genie;
        genie.name = point_name("daf genie amplification", ps, pr);
        genie.info = true;
        const auto g = simulate_daf_single(p, s, n, seed, DafMode::genie);
        genie.statistic = g.estimate;
        genie.detail = fmt("genie=%.6f", g.estimate) + fmt(" protocol=%.6f", sim.estimate);
        out.push_back(genie);
    }
    return out;
}

std::vector<Check> validate_cf(const RunConfig& cfg) {
    std::vector<Check> out;
    struct Pt {
        double ps, pr, d, r;
    };
    const Pt pts[] = {{1, 1, 1.5, 0.5},   {1, 10, 0.5, 1.0},  {10, 100, 0.7, 2.0},
                      {2, 30, 1.5, 1.5},  {4, 10, 3.0, 1.0},  {0.5, 3, 1.5, 0.5}};
    for (std::size_t i = 0; i < std::size(pts); ++i) {
        const auto& t = pts[i];
        const PowerConfig p{t.ps, t.pr};
        const CfParams c{t.d, t.r};
        const double mc = cf_decode_probability(p, c, cfg.samples, {cfg.master_seed, 300 + i});
        const double quad = cf_decode_probability_quadrature(p, c);
        char name[96];
        std::snprintf(name, sizeof name, "cf decode Ps=%g Pr=%g D=%g R=%g", t.ps, t.pr, t.d, t.r);
        char detail[96];
        std::snprintf(detail, sizeof detail, "mc=%.5f quad=%.5f", mc, quad);
        out.push_back(residual_check(name, std::abs(mc - quad), 0.005, detail));
    }

    // per-realization simulation against the joint semi-analytic value
    for (double pr : {10.0, 1000.0}) {
        const PowerConfig p{1.0, pr};
        EngineOptions eo;
        eo.samples = std::min<std::size_t>(cfg.samples, 400'000);
        eo.search_samples = std::min(eo.search_samples, eo.samples);
        eo.seed = {cfg.master_seed, 0};
        const auto best = cf_throughput(p, eo);
        const CfParams c{best.param("D"), best.param("R_r")};
        const double s = best.param("s");
        const auto relay = CfRelaySamples::draw(p, c.distortion, cfg.samples, {cfg.master_seed, 311});
        const double joint = cf_throughput_objective(p, relay, s, c.relay_rate, CfModel::joint);
        const double product = cf_throughput_objective(p, relay, s, c.relay_rate, CfModel::product);
        const auto sim = simulate_cf(p, c, s, cfg.samples, {cfg.master_seed, 310});

        const double rate = std::log1p(p.ps * s);
        const double dest = cf_destination_probability(p, c.relay_rate);
        const double q = relay.joint_tail(c.relay_rate, s);
        const double se_joint = rate * dest * std::sqrt(q * (1.0 - q) / static_cast<double>(cfg.samples));
        SimReport combined = sim;
        combined.std_error = std::hypot(sim.std_error, se_joint);
        out.push_back(z_check(point_name("cf simulation vs joint", p.ps, pr), joint, combined));

        char detail[96];
        std::snprintf(detail, sizeof detail, "product=%.6f joint=%.6f", product, joint);
        out.push_back(residual_check(point_name("cf product >= joint", p.ps, pr),
                                     std::max(joint - product, 0.0), 0.0, detail));
        if (pr >= 1000.0)
            out.push_back(
                residual_check(point_name("cf joint ~ product", p.ps, pr), std::abs(product - joint), 0.01, detail));
    }
    return out;
}

std::vector<Check> dominance_checks(const std::vector<Row>& rows, std::size_t samples) {
    std::vector<Check> out;
    // bounds at each (ps, pr, metric)
    std::map<std::tuple<double, double, std::string>, const Row*> bounds;
    for (const auto& r : rows)
        if (is_bound(r.job.scheme) && !r.failed) bounds[{r.job.ps_db, r.job.pr_db, r.job.scheme + "/" + r.job.metric}] = &r;
    auto applicable = [](const Row& r) {
        std::vector<std::string> tags{"cutset/expected"};
        if (r.job.metric == "throughput") {
            tags.push_back("cutset/throughput");
            tags.push_back("rc/throughput");
        } else if (r.job.scheme == "df") {
            tags.push_back("dfub/expected");
        }
        return tags;
    };
    for (const auto& r : rows) {
        if (is_bound(r.job.scheme)) continue;
        char label[128];
        std::snprintf(label, sizeof label, "%s %s k=%s Ps=%gdB Pr=%gdB", r.job.scheme.c_str(), r.job.metric.c_str(),
                      r.job.layers.c_str(), r.job.ps_db, r.job.pr_db);
        if (r.failed) {
            Check c;
            c.name = std::string("dominance ") + label;
            c.pass = false;
            c.detail = "evaluation failed: " + r.error;
            out.push_back(c);
            continue;
        }
        const double slack = 3.0 * mc_std_error(r, samples);
        for (const auto& tag : applicable(r)) {
            const auto it = bounds.find({r.job.ps_db, r.job.pr_db, tag});
            if (it == bounds.end()) continue;
            const double excess = r.value - it->second->value;
            char detail[128];
            std::snprintf(detail, sizeof detail, "value=%.6f bound=%.6f slack=%.2e", r.value, it->second->value, slack);
            Check c = residual_check(std::string("dominance ") + label + " <= " + tag, std::max(excess, 0.0), slack,
                                     detail);
            c.pass = excess <= slack;
            out.push_back(c);
        }
    }
    return out;
}

std::vector<Check> validate_bounds(const RunConfig& cfg) {
    std::vector<Check> out;
    for (double P : {0.1, 1.0, 10.0, 100.0}) {
        const double closed = cutset_expected_closed(P);
        const double quad = cutset_expected_quadrature(P);
        char name[64];
        std::snprintf(name, sizeof name, "cutset expected closed vs quadrature P=%g", P);
        char detail[96];
        std::snprintf(detail, sizeof detail, "closed=%.9f quad=%.9f", closed, quad);
        out.push_back(residual_check(name, std::abs(closed - quad), 1e-6, detail));
    }
    for (double P : {1.0, 10.0}) {
        const double c1 = dfub_r1_closed(P), q1 = dfub_r1_quadrature(P);
        const double c2 = dfub_r2_closed(P), q2 = dfub_r2_quadrature(P);
        char detail[96];
        std::snprintf(detail, sizeof detail, "closed=%.6f quad=%.6f", c1, q1);
        out.push_back(residual_check(fmt("dfub R1 constant Ps=%g", P), std::abs(c1 - q1), 2e-3, detail));
        std::snprintf(detail, sizeof detail, "closed=%.6f quad=%.6f", c2, q2);
        out.push_back(residual_check(fmt("dfub R2 constant Pr=%g", P), std::abs(c2 - q2), 2e-3, detail));
    }

    // dominance over a coarse sweep of both metrics
    std::vector<Job> jobs;
    for (double pr = 0.0; pr <= 60.0; pr += 12.0) {
        for (const char* s : {"df", "af", "daf", "cf"}) jobs.push_back({0.0, pr, s, "throughput", "1"});
        for (const char* b : {"cutset", "rc"}) jobs.push_back({0.0, pr, b, "throughput", "1"});
        jobs.push_back({0.0, pr, "df", "expected", "3"});
        jobs.push_back({0.0, pr, "daf", "expected", "2"});
        jobs.push_back({0.0, pr, "af", "expected", "inf"});
        jobs.push_back({0.0, pr, "cf", "expected", "inf"});
        for (const char* b : {"cutset", "dfub"}) jobs.push_back({0.0, pr, b, "expected", "inf"});
    }
    const auto rows = run_jobs(jobs, cfg, 1);
    const auto dom = dominance_checks(rows, cfg.samples);
    out.insert(out.end(), dom.begin(), dom.end());
    return out;
}

std::vector<Check> validate_suite(const std::string& suite, const RunConfig& cfg) {
    if (suite == "alamouti") return validate_alamouti(cfg);
    if (suite == "df") return validate_df(cfg);
    if (suite == "daf") return validate_daf(cfg);
    if (suite == "cf") return validate_cf(cfg);
    if (suite == "bounds") return validate_bounds(cfg);
    if (suite == "all") {
        std::vector<Check> out;
        for (const auto& s : kSuites) {
            auto part = validate_suite(s, cfg);
            for (auto& c : part) c.name = s + ": " + c.name;
            out.insert(out.end(), part.begin(), part.end());
        }
        return out;
    }
    throw FlagError("unknown suite '" + suite + "' (alamouti|df|daf|cf|bounds|all)");
}

}  // namespace diamondbc::app
