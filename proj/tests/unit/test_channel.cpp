#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <vector>

#include "diamondbc/channel.hpp"

using namespace diamondbc;

TEST_SUITE("channel") {

TEST_CASE("dB conversion") {
    CHECK(db_to_linear(0.0) == 1.0);
    CHECK(db_to_linear(10.0) == doctest::Approx(10.0));
    CHECK(db_to_linear(25.0) == doctest::Approx(316.2278).epsilon(1e-6));
    CHECK(linear_to_db(100.0) == doctest::Approx(20.0));
    for (double x : {-30.0, -3.0, 0.5, 17.0, 60.0}) CHECK(linear_to_db(db_to_linear(x)) == doctest::Approx(x));
    CHECK_THROWS(linear_to_db(0.0));
}

TEST_CASE("power config") {
    const auto p = PowerConfig::from_db(0.0, 10.0);
    CHECK(p.ps == doctest::Approx(1.0));
    CHECK(p.pr == doctest::Approx(10.0));
    CHECK_NOTHROW(p.validate());
    CHECK_THROWS(PowerConfig{0.0, 1.0}.validate());
    CHECK_THROWS(PowerConfig{1.0, -1.0}.validate());
    CHECK_THROWS(PowerConfig{1.0, std::nan("")}.validate());
}

TEST_CASE("seed parsing") {
    CHECK(parse_seed("42") == 42u);
    CHECK(parse_seed("0x5EED") == 0x5EEDu);
    CHECK_THROWS(parse_seed("forty"));
    CHECK_THROWS(parse_seed(""));
}

TEST_CASE("philox known answers") {
    const auto z = philox4x32({0, 0, 0, 0}, {0, 0});
    CHECK(z[0] == 0x6627e8d5u);
    CHECK(z[1] == 0xe169c58du);
    CHECK(z[2] == 0xbc57ac4cu);
    CHECK(z[3] == 0x9b00dbd8u);
    const auto f = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    CHECK(f[0] == 0x408f276du);
    CHECK(f[1] == 0x41c83b0eu);
    CHECK(f[2] == 0xa20bc7c6u);
    CHECK(f[3] == 0x6d5451fdu);
}

TEST_CASE("fading sample consistency") {
    const auto s = fading_at({7, 3}, 11);
    CHECK(s.a1 == doctest::Approx(s.h1.norm2()));
    CHECK(s.ar2 == doctest::Approx(s.hr2.norm2()));
    const auto t = FadingSample::from_gains({1, 0}, {0, 2}, {0, 0}, {3, 4});
    CHECK(t.a1 == 1.0);
    CHECK(t.a2 == 4.0);
    CHECK(t.ar1 == 0.0);
    CHECK(t.ar2 == 25.0);
}

TEST_CASE("determinism and stream separation") {
    const SeedSpec seed{123, 4};
    const auto a = sample_fading(seed, 5000);
    const auto b = sample_fading(seed, 5000);
    REQUIRE(a.size() == 5000);
    bool same = true;
    for (std::size_t i = 0; i < a.size(); ++i)
        same = same && a[i].h1.re == b[i].h1.re && a[i].hr2.im == b[i].hr2.im && a[i].a2 == b[i].a2;
    CHECK(same);
    // index addressing agrees with the bulk draw
    CHECK(fading_at(seed, 4321).a1 == a[4321].a1);
    const auto c = sample_fading(seed.with_stream(5), 10);
    const auto d = sample_fading({124, 4}, 10);
    CHECK(c[0].a1 != a[0].a1);
    CHECK(d[0].a1 != a[0].a1);
}

TEST_CASE("draws do not depend on the worker count") {
    const unsigned saved = worker_threads();
    set_worker_threads(1);
    const auto one = sample_fading({9, 9}, 70000);
    set_worker_threads(3);
    const auto three = sample_fading({9, 9}, 70000);
    set_worker_threads(saved);
    bool same = true;
    for (std::size_t i = 0; i < one.size(); ++i) same = same && one[i].ar1 == three[i].ar1;
    CHECK(same);
}

TEST_CASE("gains are Exp(1): KS at n = 1e5") {
    const std::size_t n = 100'000;
    const auto s = sample_fading({kDefaultSeed, 77}, n);
    const double crit = 1.628 / std::sqrt(static_cast<double>(n));  // 1% level
    for (int which = 0; which < 4; ++which) {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& f = s[i];
            x[i] = which == 0 ? f.a1 : which == 1 ? f.a2 : which == 2 ? f.ar1 : f.ar2;
        }
        std::sort(x.begin(), x.end());
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double F = 1.0 - std::exp(-x[i]);
            d = std::max({d, std::abs(F - static_cast<double>(i) / n), std::abs(F - static_cast<double>(i + 1) / n)});
        }
        CAPTURE(which);
        CHECK(d < crit);
    }
}

TEST_CASE("phases uniform and gains uncorrelated at n = 1e6") {
    const std::size_t n = 1'000'000;
    std::complex<double> ph[4]{};
    double sum[4]{}, sum2[4]{}, cross[4][4]{};
    for (std::size_t i = 0; i < n; ++i) {
        const auto f = fading_at({kDefaultSeed, 78}, i);
        const ComplexGain h[4]{f.h1, f.h2, f.hr1, f.hr2};
        const double a[4]{f.a1, f.a2, f.ar1, f.ar2};
        for (int k = 0; k < 4; ++k) {
            ph[k] += std::polar(1.0, std::atan2(h[k].im, h[k].re));
            sum[k] += a[k];
            sum2[k] += a[k] * a[k];
            for (int j = k + 1; j < 4; ++j) cross[k][j] += a[k] * a[j];
        }
    }
    const double dn = static_cast<double>(n);
    for (int k = 0; k < 4; ++k) {
        CHECK(std::abs(ph[k] / dn) < 0.005);
        CHECK(sum[k] / dn == doctest::Approx(1.0).epsilon(0.005));
    }
    for (int k = 0; k < 4; ++k)
        for (int j = k + 1; j < 4; ++j) {
            const double mk = sum[k] / dn, mj = sum[j] / dn;
            const double cov = cross[k][j] / dn - mk * mj;
            const double corr = cov / std::sqrt((sum2[k] / dn - mk * mk) * (sum2[j] / dn - mj * mj));
            CAPTURE(k);
            CAPTURE(j);
            CHECK(std::abs(corr) < 0.005);
        }
}

TEST_CASE("chunked reduction covers every index once") {
    const std::size_t n = 3 * kChunkSize + 17;
    std::vector<std::size_t> hits(n, 0);
    std::vector<std::size_t> chunks(chunk_count(n), 0);
    parallel_chunks(n, [&](std::size_t chunk, std::size_t b, std::size_t e) {
        chunks[chunk] += 1;
        for (std::size_t i = b; i < e; ++i) hits[i] += 1;
    });
    CHECK(std::all_of(hits.begin(), hits.end(), [](std::size_t h) { return h == 1; }));
    CHECK(std::all_of(chunks.begin(), chunks.end(), [](std::size_t h) { return h == 1; }));
}

}  // TEST_SUITE
