#include <doctest.h>

#include <cmath>
#include <numbers>

#include "diamondbc/bounds.hpp"
#include "diamondbc/oracle.hpp"
#include "diamondbc/schemes.hpp"

using namespace diamondbc;

namespace {

void within_3se(double exact, const SimReport& r) {
    CAPTURE(exact);
    CAPTURE(r.estimate);
    CAPTURE(r.std_error);
    REQUIRE(r.std_error > 0.0);
    CHECK(std::abs(r.estimate - exact) < 3.0 * r.std_error);
}

void finite_nonneg(const RateResult& r) {
    CHECK(std::isfinite(r.value_nats));
    CHECK(r.value_nats >= 0.0);
}

// Single-layer plan with one prefix table, relays forward at full power.
std::pair<LayerPlan, PrefixAllocations> one_layer(double ps, double pr, double s) {
    return {LayerPlan{{s}, {ps}}, PrefixAllocations{{{0.0}, {pr}}, {1.0, 1.0}}};
}

}  // namespace

TEST_SUITE("schemes") {

TEST_CASE("layer plan arithmetic") {
    LayerPlan plan{{0.5, 1.5}, {0.6, 0.4}};
    CHECK_NOTHROW(plan.validate(1.0));
    CHECK(plan.interference(0) == doctest::Approx(0.4));
    CHECK(plan.interference(1) == 0.0);
    CHECK(plan.threshold(0) == doctest::Approx(0.6 * 0.5 / (1 + 0.4 * 0.5)));
    CHECK(plan.rate(1) == doctest::Approx(std::log1p(0.4 * 1.5)));
    CHECK_THROWS((LayerPlan{{1.5, 0.5}, {0.5, 0.5}}.validate(1.0)));
    CHECK_THROWS((LayerPlan{{0.5, 1.5}, {0.5, 0.6}}.validate(1.0)));
    CHECK_THROWS((PrefixAllocations{{{0.0}, {0.5}}, {1.0, 1.0}}.validate(1.0)));
    CHECK_THROWS((PrefixAllocations{{{0.3}, {1.0}}, {1.0, 1.0}}.validate(1.0)));
}

TEST_CASE("half-plane probability") {
    // single row, closed form
    const double c1 = 0.7, c2 = 2.0, t = 1.3;
    HalfPlane row{c1, c2, t};
    const double exact = (c2 * std::exp(-t / c2) - c1 * std::exp(-t / c1)) / (c2 - c1);
    CHECK(halfplane_probability(&row, 1) == doctest::Approx(exact).epsilon(1e-12));
    HalfPlane eq{1.0, 1.0, 2.0};
    CHECK(halfplane_probability(&eq, 1) == doctest::Approx(3.0 * std::exp(-2.0)).epsilon(1e-12));
    // two rows against Monte Carlo
    HalfPlane rows[2]{{1.0, 0.2, 0.5}, {0.1, 1.5, 0.8}};
    std::size_t hit = 0;
    const std::size_t n = 400'000;
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = fading_at({kDefaultSeed, 93}, i);
        if (s.a1 + 0.2 * s.a2 >= 0.5 && 0.1 * s.a1 + 1.5 * s.a2 >= 0.8) ++hit;
    }
    CHECK(halfplane_probability(rows, 2) == doctest::Approx(static_cast<double>(hit) / n).epsilon(0.01));
}

TEST_CASE("DF throughput limits") {
    CHECK(df_throughput({1e-9, 1.0}).value_nats < 1e-8);
    const double ps = 2.0;
    for (double s : {0.2, 0.6, 1.1})
        CHECK(df_throughput_objective({ps, 1e9}, s) ==
              doctest::Approx((2 - std::exp(-s)) * std::exp(-s) * std::log1p(ps * s)).epsilon(1e-6));
    CHECK(df_threshold_cap({1, 1}) == doctest::Approx(1.212));
    CHECK(df_threshold_cap({4, 1}) == doctest::Approx(0.5));
}

TEST_CASE("DF optimal threshold inside the bracket") {
    for (double ratio_db = -10.0; ratio_db <= 30.0; ratio_db += 40.0 / 9.0) {
        const auto p = PowerConfig::from_db(0.0, ratio_db);
        const auto r = df_throughput(p);
        const double s = r.param("s");
        CAPTURE(ratio_db);
        CHECK(s > 0.0);
        CHECK(s < df_threshold_cap(p));
        finite_nonneg(r);
    }
}

TEST_CASE("DF throughput against the oracle at 0 dB") {
    const PowerConfig p{1, 1};
    const auto r = df_throughput(p);
    CHECK(r.value_nats == doctest::Approx(0.253957).epsilon(1e-5));
    within_3se(r.value_nats, simulate_df_single(p, r.param("s"), 1'000'000, {kDefaultSeed, 94}));
}

TEST_CASE("independent relay signals beat correlated ones below s_c") {
    // second-hop success: Pr{a1 + a2 >= x} against Pr{2a >= x}, x = s P_s / P_r
    const double w = lambert_w_m1(-0.5 / std::sqrt(std::numbers::e));
    const double xc = -(2.0 * w + 1.0);
    auto uncorrelated = [](double x) {
        return integrate([](double t) { return t * std::exp(-t); }, x, INFINITY, 1e-12);
    };
    auto correlated = [](double x) { return integrate([](double t) { return std::exp(-t); }, x / 2, INFINITY, 1e-12); };
    for (double x = 0.05; x < xc - 1e-3; x += 0.05) CHECK(uncorrelated(x) >= correlated(x));
    CHECK(uncorrelated(xc + 0.1) < correlated(xc + 0.1));
    // the DF cap sits below s_c for every power ratio
    for (double ratio : {0.1, 0.5, 1.0, 4.0, 100.0}) {
        const PowerConfig p{ratio, 1.0};
        CHECK(df_threshold_cap(p) < xc / ratio);
    }
}

TEST_CASE("DF finite layers") {
    const PowerConfig p{1, 10};
    const auto thr = df_throughput(p);
    const auto k1 = df_finite_expected_rate(1, p);
    CHECK(k1.value_nats == doctest::Approx(thr.value_nats).epsilon(1e-4));
    const auto k2 = df_finite_expected_rate(2, p);
    CHECK(k2.value_nats >= thr.value_nats - 1e-4);
    REQUIRE(k2.plan.has_value());
    REQUIRE(k2.allocations.has_value());
    CHECK_NOTHROW(k2.plan->validate(p.ps));
    CHECK_NOTHROW(k2.allocations->validate(p.pr));
    CHECK(layered_expected_rate(p, *k2.plan, *k2.allocations, false) == doctest::Approx(k2.value_nats).epsilon(1e-9));
    within_3se(k2.value_nats, simulate_layered_df(p, *k2.plan, *k2.allocations, 1'000'000, {kDefaultSeed, 95}));
    CHECK_THROWS(df_finite_expected_rate(4, p));
    CHECK_THROWS(df_finite_expected_rate(0, p));
}

TEST_CASE("single-layer evaluator reduces to the DF closed form") {
    for (auto [ps, pr, s] : {std::tuple{1.0, 1.0, 0.5}, {4.0, 0.5, 0.2}, {0.5, 10.0, 1.0}}) {
        const auto [plan, alloc] = one_layer(ps, pr, s);
        const PowerConfig p{ps, pr};
        CHECK(layered_expected_rate(p, plan, alloc, false) ==
              doctest::Approx(df_throughput_objective(p, s)).epsilon(1e-10));
    }
}

TEST_CASE("DF and DAF ladders nest") {
    for (const auto& p : {PowerConfig{1, 1}, PowerConfig::from_db(0, 20)}) {
        const auto df = df_finite_ladder(3, p);
        const auto daf = daf_finite_ladder(3, p);
        REQUIRE(df.size() == 3);
        REQUIRE(daf.size() == 3);
        for (int i = 1; i < 3; ++i) {
            CHECK(df[i].value_nats >= df[i - 1].value_nats - 1e-4);
            CHECK(daf[i].value_nats >= daf[i - 1].value_nats - 1e-4);
        }
        for (int i = 0; i < 3; ++i) CHECK(daf[i].value_nats >= df[i].value_nats - 1e-9);
    }
}

TEST_CASE("AF throughput") {
    CHECK(af_throughput({1e-9, 1.0}, {200'000}).value_nats < 1e-7);
    const PowerConfig p{1, 10};
    EngineOptions opt;
    opt.samples = 1'000'000;
    opt.af_tables = AfTables::gated;
    const auto gated = af_throughput(p, opt);
    finite_nonneg(gated);
    CHECK(gated.param("a_th") == doctest::Approx(af_on_threshold(p)));
    within_3se(gated.value_nats, simulate_af(p, gated.param("s"), 1'000'000, {kDefaultSeed, 96}));
    // unconditional tables ignore the ON/gain association and give an achievable lower value
    opt.af_tables = AfTables::unconditional;
    const auto plain = af_throughput(p, opt);
    const auto sim = simulate_af(p, plain.param("s"), 1'000'000, {kDefaultSeed, 96});
    CHECK(plain.value_nats <= sim.estimate + 3.0 * sim.std_error);
    CHECK(plain.value_nats < gated.value_nats);
}

TEST_CASE("continuous layering reproduces the cutset closed form") {
    for (double P : {0.5, 1.0, 10.0}) {
        auto d = GainDistribution::from_functions(
            log_grid(1e-5, 60.0, 2048), [](double s) { return 1 - (1 + s) * std::exp(-s); },
            [](double s) { return s * std::exp(-s); }, [](double s) { return (1 - s) * std::exp(-s); });
        const auto r = continuous_expected_rate(d, P, 1.0);
        CAPTURE(P);
        CHECK(r.value_nats == doctest::Approx(cutset_expected_closed(P)).epsilon(1e-4));
        CHECK(r.param("s1") == doctest::Approx(kGoldenRatio).epsilon(1e-6));
        CHECK(r.param("s0") == doctest::Approx(cutset_lower_boundary(P)).epsilon(1e-6));
    }
}

TEST_CASE("continuous boundary failure raises") {
    auto expo = GainDistribution::from_functions(
        log_grid(1e-3, 40.0, 256), [](double s) { return 1 - std::exp(-s); }, [](double s) { return std::exp(-s); },
        [](double s) { return -std::exp(-s); });
    CHECK(continuous_upper_boundary(expo) == doctest::Approx(1.0).epsilon(1e-6));
    // tables get an exponential tail, so the boundary can only be missed below the grid:
    // a law concentrated under the first grid point has Fbar(s) - s f(s) < 0 from the start
    constexpr double mu = 1e-4;
    auto early = GainDistribution::from_functions(
        log_grid(1e-3, 40.0, 256), [](double s) { return 1 - std::exp(-s / mu); },
        [](double s) { return std::exp(-s / mu) / mu; }, [](double s) { return -std::exp(-s / mu) / (mu * mu); });
    CHECK_THROWS_AS(continuous_upper_boundary(early), NumericError);
    CHECK_THROWS_AS(continuous_expected_rate(early, 1.0, 1.0), NumericError);
}

TEST_CASE("AF expected rate against a 200-layer broadcast code") {
    const PowerConfig p{1, 10};
    EngineOptions opt;
    opt.samples = 1'000'000;
    const auto r = af_expected_rate(p, false, opt);
    finite_nonneg(r);
    const auto mix = af_mixture(p, af_tables(p, opt));
    const double ath = af_on_threshold(p), on = std::exp(-ath);
    std::vector<double> th;
    for (int i = 0; i < 200; ++i) th.push_back(0.01 * std::pow(500.0, i / 199.0));
    const auto disc = discrete_broadcast_rate([&](double s) { return mix.Fbar(s); }, p.ps, on * (2 - on), th);
    CHECK(r.value_nats == doctest::Approx(disc.value_nats).epsilon(0.02));
    CHECK(r.value_nats >= disc.value_nats - 1e-4);
    // power saving only moves the lower boundary
    const auto saving = af_expected_rate(p, true, opt);
    finite_nonneg(saving);
    CHECK(saving.param("s1") == doctest::Approx(r.param("s1")));
}

TEST_CASE("DAF throughput") {
    CHECK(daf_throughput({1e-9, 1.0}).value_nats < 1e-8);
    const PowerConfig p{1, 10};
    const auto r = daf_throughput(p);
    CHECK(r.value_nats == doctest::Approx(0.388862).epsilon(1e-5));
    within_3se(r.value_nats, simulate_daf_single(p, r.param("s"), 1'000'000, {kDefaultSeed, 97}));
    // relays strong enough that nobody amplifies: equals DF
    CHECK(r.value_nats == doctest::Approx(df_throughput(p).value_nats).epsilon(1e-6));
    const PowerConfig q{10, 1};
    const auto rq = daf_throughput(q);
    within_3se(rq.value_nats, simulate_daf_single(q, rq.param("s"), 1'000'000, {kDefaultSeed, 98}));
}

TEST_CASE("DAF finite layers") {
    const PowerConfig p{10, 1};
    FiniteOptions decode_only;
    decode_only.decode_only = true;
    CHECK(daf_finite_expected_rate(2, p, decode_only).value_nats ==
          doctest::Approx(df_finite_expected_rate(2, p).value_nats).epsilon(1e-4));
    const auto k1 = daf_finite_expected_rate(1, p);
    CHECK(k1.value_nats >= daf_throughput(p).value_nats - 1e-3);
    const auto k2 = daf_finite_expected_rate(2, p);
    REQUIRE(k2.allocations.has_value());
    CHECK(k2.value_nats > df_finite_expected_rate(2, p).value_nats + 1e-3);
    within_3se(layered_expected_rate(p, *k2.plan, *k2.allocations, true),
               simulate_layered_daf(p, *k2.plan, *k2.allocations, 1'000'000, {kDefaultSeed, 99}));
}

TEST_CASE("printed DAF expression stays available") {
    EngineOptions opt;
    opt.samples = 200'000;
    const auto r = daf_throughput_printed({1, 10}, opt);
    finite_nonneg(r);
    CHECK(r.method.size() > 0);
}

TEST_CASE("engine values finite and nonnegative on a grid") {
    for (double pr_db : {-10.0, 0.0, 15.0, 40.0}) {
        const auto p = PowerConfig::from_db(0.0, pr_db);
        finite_nonneg(df_throughput(p));
        finite_nonneg(daf_throughput(p));
        finite_nonneg(df_finite_expected_rate(2, p));
        EngineOptions opt;
        opt.samples = 200'000;
        finite_nonneg(af_throughput(p, opt));
    }
}

}  // TEST_SUITE
