#include <doctest.h>

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/lambert_w.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "diamondbc/numerics.hpp"

using namespace diamondbc;

TEST_SUITE("numerics") {

TEST_CASE("E1 reference values") {
    CHECK(exp_integral_e1(1.0) == doctest::Approx(0.2193839).epsilon(1e-7));
    CHECK(exp_integral_e1(0.5) == doctest::Approx(0.5597736).epsilon(1e-7));
    CHECK(exp_integral_e1(60.0) < 1e-27);
    CHECK_THROWS(exp_integral_e1(0.0));
    CHECK_THROWS(exp_integral_e1(-1.0));
}

TEST_CASE("E1 matches boost across scales") {
    for (double x = 1e-6; x < 200.0; x *= 1.37) {
        const double ref = -boost::math::expint(-x);  // E1(x) = -Ei(-x)
        CHECK(exp_integral_e1(x) == doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("E1 decreasing and bracketed") {
    double prev = std::numeric_limits<double>::infinity();
    for (double x = 1e-3; x < 50.0; x *= 1.1) {
        const double v = exp_integral_e1(x);
        CHECK(v < prev);
        CHECK(v > std::exp(-x) / (x + 1.0));
        CHECK(v < std::exp(-x) / x);
        prev = v;
    }
}

TEST_CASE("W_-1 special points") {
    CHECK(lambert_w_m1(-1.0 / std::numbers::e) == doctest::Approx(-1.0).epsilon(1e-7));
    CHECK(lambert_w_m1(-2.0 * std::exp(-2.0)) == doctest::Approx(-2.0).epsilon(1e-12));
    const double w = lambert_w_m1(-0.5 / std::sqrt(std::numbers::e));
    CHECK(w == doctest::Approx(-1.75645).epsilon(1e-5));
    CHECK(-(2.0 * w + 1.0) == doctest::Approx(2.5129).epsilon(1e-4));
    CHECK_THROWS(lambert_w_m1(0.1));
    CHECK_THROWS(lambert_w_m1(-0.5));
}

TEST_CASE("W_-1 residual and boost agreement on 1000 log-spaced points") {
    const double lo = 1e-6, hi = 1.0 / std::numbers::e;
    for (int i = 0; i < 1000; ++i) {
        // x runs from -1e-6 down toward -1/e
        const double x = -lo * std::pow(hi / lo, (i + 0.5) / 1000.0);
        const double w = lambert_w_m1(x);
        CHECK(std::abs(w * std::exp(w) - x) <= 1e-12);
        CHECK(w == doctest::Approx(boost::math::lambert_wm1(x)).epsilon(1e-9));
    }
}

TEST_CASE("find_root") {
    CHECK(find_root([](double s) { return s - 1.0; }, {0.0, 2.0, 1e-12}) == doctest::Approx(1.0));
    const double phi = find_root([](double s) { return s * s - s - 1.0; }, {1.0, 2.0, 1e-12});
    CHECK(phi == doctest::Approx((1 + std::sqrt(5.0)) / 2).epsilon(1e-12));
    const double r = find_root([](double s) { return std::exp(-s) - s; }, {0.0, 1.0, 1e-12});
    CHECK(r == doctest::Approx(0.5671433).epsilon(1e-7));
    CHECK_THROWS_AS(find_root([](double s) { return s * s + 1.0; }, {-1.0, 1.0, 1e-12}), NumericError);
}

TEST_CASE("find_root residual property") {
    auto check = [](const ScalarFn& f, double lo, double hi) {
        const double root = find_root(f, {lo, hi, 1e-14});
        const double scale = std::max({1.0, std::abs(f(lo)), std::abs(f(hi))});
        CHECK(std::abs(f(root)) <= 1e-9 * scale);
    };
    check([](double x) { return std::cos(x) - x; }, 0.0, 1.0);
    check([](double x) { return x * x * x - 2.0; }, 0.0, 3.0);
    check([](double x) { return std::log(x) - 1.0; }, 1.0, 10.0);
    check([](double x) { return 1e6 * (x - 0.3); }, 0.0, 1.0);
    check([](double x) { return std::tanh(50.0 * (x - 0.7)); }, 0.0, 1.0);
}

TEST_CASE("maximize_scalar") {
    auto q = maximize_scalar([](double x) { return -(x - 2.0) * (x - 2.0); }, {0.0, 5.0, 1e-10});
    CHECK(q.argmax[0] == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(q.value == doctest::Approx(0.0).epsilon(1e-12));
    auto mono = maximize_scalar([](double x) { return x; }, {0.0, 1.0, 1e-10});
    CHECK(mono.argmax[0] == doctest::Approx(1.0).epsilon(1e-8));
    // first-hop cut objective: dense-grid argmax 1.23998, value 0.522774
    auto cut = maximize_scalar([](double s) { return std::exp(-s) * (1 + s) * std::log1p(s); }, {0.0, 5.0, 1e-10});
    CHECK(cut.argmax[0] == doctest::Approx(1.23998).epsilon(1e-5));
    CHECK(cut.value == doctest::Approx(0.5227743).epsilon(1e-7));
}

TEST_CASE("maximize_scalar beats a 1e4 grid on unimodal functions") {
    const std::vector<ScalarFn> fns{
        [](double x) { return std::exp(-x) * std::log1p(3 * x); },
        [](double x) { return -std::abs(x - 0.123); },
        [](double x) { return std::sin(x); },
        [](double x) { return x * std::exp(-x * x); },
    };
    for (const auto& f : fns) {
        const double lo = 0.0, hi = 3.0;
        double grid = -std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 10000; ++i) grid = std::max(grid, f(lo + (hi - lo) * i / 10000.0));
        CHECK(maximize_scalar(f, {lo, hi, 1e-10}).value >= grid - 1e-6);
    }
}

TEST_CASE("maximize_nd") {
    auto r = maximize_nd([](const std::vector<double>& x) { return -(x[0] - 1) * (x[0] - 1) - (x[1] + 2) * (x[1] + 2); },
                         {0.0, 0.0}, {{-5, 5}, {-5, 5}});
    CHECK(r.argmax[0] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(r.argmax[1] == doctest::Approx(-2.0).epsilon(1e-4));
    auto rosen = maximize_nd(
        [](const std::vector<double>& x) {
            const double a = 1 - x[0], b = x[1] - x[0] * x[0];
            return -(a * a + 100 * b * b);
        },
        {0.0, 0.0}, {{-2, 2}, {-2, 2}});
    CHECK(rosen.value > -1e-4);
}

TEST_CASE("maximize_nd stays inside bounds and never below the start") {
    auto f = [](const std::vector<double>& x) { return x[0] + x[1]; };
    auto r = maximize_nd(f, {0.1, 0.1}, {{0, 1}, {0, 0.5}});
    CHECK(r.argmax[0] <= 1.0);
    CHECK(r.argmax[1] <= 0.5);
    CHECK(r.value == doctest::Approx(1.5).epsilon(1e-6));
    CHECK(r.value >= f({0.1, 0.1}));
}

TEST_CASE("integrate battery") {
    struct Case {
        ScalarFn f;
        double lo, hi, exact;
    };
    const double inf = std::numeric_limits<double>::infinity();
    const std::vector<Case> cases{
        {[](double x) { return x * x; }, 0, 3, 9.0},
        {[](double x) { return std::exp(-x); }, 0, inf, 1.0},
        {[](double x) { return x * std::exp(-x); }, 0, inf, 1.0},
        {[](double x) { return std::sin(x); }, 0, std::numbers::pi, 2.0},
        {[](double x) { return 1.0 / (1.0 + x * x); }, 0, 1, std::numbers::pi / 4},
        {[](double x) { return std::log(x); }, 1, 2, 2 * std::log(2.0) - 1},
        {[](double x) { return std::sqrt(x); }, 0, 4, 16.0 / 3},
        {[](double x) { return std::exp(-x) / x; }, 1, inf, 0.21938393439552},
        {[](double x) { return std::cos(10 * x); }, 0, 1, std::sin(10.0) / 10},
        {[](double x) { return 1.0 / x; }, 1, std::numbers::e, 1.0},
    };
    for (const auto& c : cases) CHECK(integrate(c.f, c.lo, c.hi, 1e-10) == doctest::Approx(c.exact).epsilon(1e-8));
}

TEST_CASE("gauss-legendre integrates polynomials exactly") {
    for (int order : {4, 8, 12, 16}) {
        const auto& g = gauss_legendre(order);
        REQUIRE(g.nodes.size() == static_cast<std::size_t>(order));
        for (int deg = 0; deg < 2 * order; ++deg) {
            double sum = 0.0;
            for (int i = 0; i < order; ++i) sum += g.weights[i] * std::pow(g.nodes[i], deg);
            const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
            CHECK(sum == doctest::Approx(exact).epsilon(1e-12));
        }
    }
}

}  // TEST_SUITE
