#include <doctest.h>

#include <cmath>
#include <regex>

#include "app.hpp"

using namespace diamondbc;
using namespace diamondbc::app;

TEST_SUITE("app") {

TEST_CASE("dB ranges include both endpoints") {
    const auto r = DbRange::parse("0:60:2").values();
    REQUIRE(r.size() == 31);
    CHECK(r.front() == 0.0);
    CHECK(r.back() == 60.0);
    CHECK(DbRange::parse("0:1:0.1").values().size() == 11);
    CHECK(DbRange::parse("7.5").values() == std::vector<double>{7.5});
    CHECK(DbRange::parse("0:5:2").values() == std::vector<double>{0, 2, 4});
    CHECK_THROWS_AS(DbRange::parse("0:10:0"), FlagError);
    CHECK_THROWS_AS(DbRange::parse("10:0:1"), FlagError);
    CHECK_THROWS_AS(DbRange::parse("a:b:c"), FlagError);
    CHECK_THROWS_AS(DbRange::parse("1:2"), FlagError);
}

TEST_CASE("lists") {
    CHECK(split_list("df,af,,cf") == std::vector<std::string>{"df", "af", "cf"});
    CHECK(split_list("").empty());
}

TEST_CASE("job validation") {
    CHECK_NOTHROW(check_job({0, 0, "df", "throughput", "1"}));
    CHECK_NOTHROW(check_job({0, 0, "daf", "expected", "3"}));
    CHECK_NOTHROW(check_job({0, 0, "af", "expected", "inf"}));
    CHECK_NOTHROW(check_job({0, 0, "dfub", "expected", "inf"}));
    CHECK_THROWS_AS(check_job({0, 0, "df", "expected", "inf"}), FlagError);
    CHECK_THROWS_AS(check_job({0, 0, "cf", "expected", "2"}), FlagError);
    CHECK_THROWS_AS(check_job({0, 0, "df", "throughput", "2"}), FlagError);
    CHECK_THROWS_AS(check_job({0, 0, "rc", "expected", "inf"}), FlagError);
    CHECK_THROWS_AS(check_job({0, 0, "dfub", "throughput", "1"}), FlagError);
    CHECK_THROWS_AS(check_job({0, 0, "xx", "throughput", "1"}), FlagError);
    CHECK_THROWS_AS(check_job({0, 0, "df", "rate", "1"}), FlagError);
}

TEST_CASE("csv rows") {
    CHECK(csv_header() == "ps_db,pr_db,scheme,metric,layers,value_nats,params,n_mc,seed");
    RunConfig cfg;
    cfg.master_seed = 99;
    const Row r = evaluate({0, 0, "df", "throughput", "1"}, cfg);
    CHECK_FALSE(r.failed);
    CHECK(r.value == doctest::Approx(df_throughput({1, 1}).value_nats));
    const auto line = csv_row(r);
    CHECK(std::regex_match(line, std::regex(R"(0,0,df,throughput,1,0\.25395\d+,s=0\.5388\d*,0,99)")));
    Row bad = r;
    bad.failed = true;
    bad.value = std::nan("");
    CHECK(csv_row(bad).find(",nan,") != std::string::npos);
}

TEST_CASE("point rows carry the MC sample count only for MC engines") {
    RunConfig cfg;
    cfg.samples = 100'000;
    CHECK(evaluate({0, 0, "cutset", "expected", "inf"}, cfg).n_mc == 0);
    CHECK(evaluate({0, 10, "af", "throughput", "1"}, cfg).n_mc == 100'000);
}

TEST_CASE("sweep jobs and ordering") {
    SweepSpec spec;
    spec.ps_db = DbRange::parse("0");
    spec.pr_db = DbRange::parse("0:20:10");
    spec.schemes = {"df", "daf"};
    spec.bounds = {"rc", "cutset"};
    const auto jobs = sweep_jobs(spec);
    CHECK(jobs.size() == 12);
    RunConfig cfg;
    const auto rows = run_jobs(jobs, cfg, 1);
    REQUIRE(rows.size() == 12);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& a = rows[i - 1].job;
        const auto& b = rows[i].job;
        CHECK((a.pr_db < b.pr_db || (a.pr_db == b.pr_db && a.scheme <= b.scheme)));
    }
    // bounds only
    spec.schemes.clear();
    CHECK(sweep_jobs(spec).size() == 6);
    spec.metric = "expected";
    spec.bounds = {"rc"};
    CHECK_THROWS_AS(sweep_jobs(spec), FlagError);
}

TEST_CASE("sweep CSV is identical across pool sizes") {
    SweepSpec spec;
    spec.ps_db = DbRange::parse("0");
    spec.pr_db = DbRange::parse("0:30:15");
    spec.schemes = {"df", "af", "cf"};
    spec.bounds = {"cutset"};
    RunConfig cfg;
    cfg.samples = 100'000;
    const auto jobs = sweep_jobs(spec);
    const auto one = render_csv(run_jobs(jobs, cfg, 1));
    const auto three = render_csv(run_jobs(jobs, cfg, 3));
    CHECK(one == three);
    CHECK(one == render_csv(run_jobs(jobs, cfg, 1)));
}

TEST_CASE("svg chart") {
    std::vector<Row> rows;
    for (double pr : {0.0, 10.0, 20.0})
        for (const char* s : {"cf", "df", "cutset"}) {
            Row r;
            r.job = {0, pr, s, "throughput", "1"};
            r.value = 0.1 + pr / 100.0;
            rows.push_back(r);
        }
    Row bad = rows.front();
    bad.job.scheme = "af";
    bad.failed = true;
    rows.push_back(bad);
    const auto svg = render_svg(rows);
    CHECK(svg.find("width=\"960\"") != std::string::npos);
    CHECK(svg.find("height=\"600\"") != std::string::npos);
    CHECK(svg.find("P_r (dB)") != std::string::npos);
    CHECK(svg.find("rate (nats)") != std::string::npos);
    std::size_t polylines = 0;
    for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++polylines;
    CHECK(polylines == 3);
    // colours follow the tag order df, af, daf, cf, cutset
    const auto df = svg.find("#1f77b4"), cf = svg.find("#d62728"), cut = svg.find("#7f7f7f");
    CHECK(df < cf);
    CHECK(cf < cut);
}

TEST_CASE("dominance checks") {
    Row scheme;
    scheme.job = {0, 0, "df", "throughput", "1"};
    scheme.value = 0.3;
    Row bound = scheme;
    bound.job.scheme = "cutset";
    bound.value = 0.5;
    auto checks = dominance_checks({scheme, bound}, 1000);
    REQUIRE(checks.size() == 1);
    CHECK(checks[0].pass);
    scheme.value = 0.6;
    checks = dominance_checks({scheme, bound}, 1000);
    CHECK_FALSE(checks[0].pass);
    // MC slack covers small excursions
    scheme.job.scheme = "af";
    scheme.n_mc = 1000;
    scheme.value = 0.501;
    scheme.params = "s=0.9;a_th=0.3";
    checks = dominance_checks({scheme, bound}, 1000);
    CHECK(checks[0].pass);
}

TEST_CASE("validation suites") {
    RunConfig cfg;
    cfg.samples = 100'000;
    for (const auto& c : validate_suite("alamouti", cfg)) CHECK(c.pass);
    CHECK_THROWS_AS(validate_suite("nope", cfg), FlagError);
}

}  // TEST_SUITE
