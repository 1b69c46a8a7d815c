#include <doctest.h>

#include <cmath>

#include "diamondbc/bounds.hpp"
#include "diamondbc/oracle.hpp"
#include "diamondbc/schemes.hpp"

using namespace diamondbc;

TEST_SUITE("cf") {

TEST_CASE("decode probability edge cases") {
    const SeedSpec seed{kDefaultSeed, 120};
    CHECK(cf_decode_probability({1, 10}, {0.5, 0.0}, 50'000, seed) == 0.0);
    CHECK(cf_decode_probability({1, 1e9}, {0.5, 5.0}, 200'000, seed) > 0.99);
    CHECK_THROWS(cf_decode_probability({1, 10}, {0.0, 1.0}, 1000, seed));
    CHECK(cf_decode_probability_quadrature({1, 10}, {0.5, 0.0}) == 0.0);
}

TEST_CASE("decode probability against 4-D quadrature") {
    const PowerConfig p{1, 10};
    const CfParams c{0.5, 1.0};
    const double mc = cf_decode_probability(p, c, 1'000'000, {kDefaultSeed, 121});
    const double quad = cf_decode_probability_quadrature(p, c);
    CHECK(quad == doctest::Approx(0.05376).epsilon(2e-3));
    CHECK(std::abs(mc - quad) <= 0.005);
}

TEST_CASE("destination side closed form") {
    const PowerConfig p{1, 3};
    const double R = 0.8;
    std::size_t hit = 0;
    const std::size_t n = 400'000;
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = fading_at({kDefaultSeed, 122}, i);
        const double hi = std::min(0.5 * std::log1p((s.a1 + s.a2) * p.pr), std::log1p(std::min(s.a1, s.a2) * p.pr));
        if (R < hi) ++hit;
    }
    const double q = static_cast<double>(hit) / n;
    CHECK(std::abs(cf_destination_probability(p, R) - q) < 4.0 * std::sqrt(q * (1 - q) / n));
    CHECK(cf_destination_probability(p, 0.0) == 1.0);
    CHECK(cf_destination_probability(p, 20.0) < 1e-12);
}

TEST_CASE("relay samples are consistent with the direct estimate") {
    const PowerConfig p{2, 30};
    const CfParams c{1.5, 1.5};
    const SeedSpec seed{kDefaultSeed, 123};
    const auto r = CfRelaySamples::draw(p, c.distortion, 200'000, seed);
    const double direct = cf_decode_probability(p, c, 200'000, seed);
    const double split = r.relay_probability(c.relay_rate) * cf_destination_probability(p, c.relay_rate);
    CHECK(split == doctest::Approx(direct).epsilon(0.02));
    CHECK(r.gain_tail(0.0) == 1.0);
    CHECK(r.joint_tail(c.relay_rate, 0.5) <= r.relay_probability(c.relay_rate));
    const auto [pc, rate] = cf_best_relay_rate(p, r);
    CHECK(pc >= split - 1e-12);
    CHECK(pc == doctest::Approx(r.relay_probability(rate) * cf_destination_probability(p, rate)));
}

TEST_CASE("quantizer swamping the signal gives nothing") {
    const PowerConfig p{1, 100};
    const auto r = CfRelaySamples::draw(p, 50.0, 100'000, {kDefaultSeed, 124});
    for (double s : {0.05, 0.3, 1.0})
        for (double R : {0.5, 2.0, 4.0}) CHECK(cf_throughput_objective(p, r, s, R, CfModel::product) < 1e-3);
}

TEST_CASE("throughput against the per-realization simulation") {
    const PowerConfig p{1, 100};
    EngineOptions opt;
    opt.samples = 1'000'000;
    const auto best = cf_throughput(p, opt);
    CHECK(best.method == "cf-product");
    const CfParams c{best.param("D"), best.param("R_r")};
    const double s = best.param("s");
    const std::size_t n = 1'000'000;
    const auto relay = CfRelaySamples::draw(p, c.distortion, n, {kDefaultSeed, 125});
    const double joint = cf_throughput_objective(p, relay, s, c.relay_rate, CfModel::joint);
    const double product = cf_throughput_objective(p, relay, s, c.relay_rate, CfModel::product);
    const auto sim = simulate_cf(p, c, s, n, {kDefaultSeed, 126});
    const double rate = std::log1p(p.ps * s);
    const double q = relay.joint_tail(c.relay_rate, s);
    const double se = std::hypot(sim.std_error, rate * cf_destination_probability(p, c.relay_rate) *
                                                    std::sqrt(q * (1 - q) / static_cast<double>(n)));
    CAPTURE(joint);
    CAPTURE(sim.estimate);
    CHECK(std::abs(sim.estimate - joint) < 3.0 * se);
    // the engine's product form overstates the joint event
    CHECK(product >= joint);
    CHECK(best.value_nats == doctest::Approx(product).epsilon(0.02));
    CHECK(sim.counter("success") + sim.counter("relay_fail") + sim.counter("source_fail") == n);
}

TEST_CASE("high relay power meets the first-hop cut") {
    const PowerConfig p{1, 1e9};
    EngineOptions opt;
    opt.samples = 200'000;
    const auto t = cf_throughput(p, opt);
    CHECK(t.param("P_C") > 0.999);
    CHECK(t.value_nats == doctest::Approx(cutset_throughput({1, 1}).value_nats).epsilon(0.01));
    const auto e = cf_expected_rate(p, opt);
    CHECK(e.value_nats == doctest::Approx(cutset_expected_closed(1.0)).epsilon(0.02));
    CHECK(e.value_nats >= t.value_nats - 1e-3);
}

TEST_CASE("expected rate against a 200-layer broadcast code") {
    const PowerConfig p{1, 1000};
    EngineOptions opt;
    opt.samples = 400'000;
    const auto e = cf_expected_rate(p, opt);
    CHECK(e.method == "cf-continuous");
    const auto relay = CfRelaySamples::draw(p, e.param("D"), opt.samples, opt.seed.with_stream(kStreamCf));
    const auto dist = GainDistribution::from_samples(relay.gain);
    std::vector<double> th;
    for (int i = 0; i < 200; ++i) th.push_back(0.01 * std::pow(800.0, i / 199.0));
    const auto disc = discrete_broadcast_rate([&](double s) { return dist.Fbar(s); }, p.ps, e.param("P_C"), th);
    CHECK(e.value_nats == doctest::Approx(disc.value_nats).epsilon(0.02));
}

TEST_CASE("distortion search range") {
    const auto b = cf_distortion_range({1, 1});
    CHECK(b.lo > 0.0);
    CHECK(b.hi > 1.0);
    CHECK(cf_relay_rate_floor(1.0, 1.0, 0.5, 1.0) > 0.0);
    // relay floor grows as the quantizer gets finer
    CHECK(cf_relay_rate_floor(1.0, 1.0, 0.1, 1.0) > cf_relay_rate_floor(1.0, 1.0, 0.5, 1.0));
}

}  // TEST_SUITE
