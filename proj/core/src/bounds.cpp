#include "diamondbc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace diamondbc {

const char* to_string(BoundKind k) {
    switch (k) {
        case BoundKind::cutset_throughput: return "cutset-throughput";
        case BoundKind::cutset_expected: return "cutset-expected";
        case BoundKind::rc_throughput: return "rc-throughput";
        case BoundKind::dfub_cutset: return "dfub-cutset";
    }
    return "?";
}

BoundKind bound_from_string(const std::string& tag) {
    for (auto k : {BoundKind::cutset_throughput, BoundKind::cutset_expected, BoundKind::rc_throughput,
                   BoundKind::dfub_cutset})
        if (tag == to_string(k)) return k;
    throw std::invalid_argument("unknown bound tag: " + tag);
}

double cutset_lower_boundary(double power) {
    if (!(power > 0.0)) throw std::domain_error("cutset_lower_boundary: power must be > 0");
    const double P = power;
    const double a = 1.0 / (2.0 * P) - 1.0 / (6.0 * P * P) - 1.0 / (27.0 * P * P * P);
    const double b = 1.0 / (3.0 * P) + 1.0 / (9.0 * P * P);
    const double shift = 1.0 / (3.0 * P);
    const double disc = a * a - b * b * b;
    double s;
    if (disc >= 0.0) {
        const double c = std::cbrt(std::sqrt(disc) + a);
        s = c + b / c - shift;
    } else {
        // three real roots; the largest is the positive one
        const double phi = std::acos(std::clamp(a / std::pow(b, 1.5), -1.0, 1.0));
        s = 2.0 * std::sqrt(b) * std::cos(phi / 3.0) - shift;
    }
    // one Newton step cleans up cancellation at large P
    const double g = ((P * s + 1.0) * s - 1.0) * s - 1.0;
    const double dg = (3.0 * P * s + 2.0) * s - 1.0;
    if (dg > 0.0) s -= g / dg;
    return s;
}

double cutset_throughput_objective(double power, double s) {
    return std::exp(-s) * (1.0 + s) * std::log1p(power * s);
}

RateResult cutset_throughput(const PowerConfig& p) {
    p.validate();
    const double P = std::min(p.ps, p.pr);
    auto r = maximize_scalar([&](double s) { return cutset_throughput_objective(P, s); }, {0.0, 20.0, 1e-10});
    RateResult out;
    out.value_nats = std::max(r.value, 0.0);
    out.params = {{"s", r.argmax[0]}, {"P", P}};
    out.evaluations = r.evaluations;
    out.converged = r.converged;
    out.method = "cutset-throughput";
    return out;
}

double cutset_expected_closed(double power) {
    const double s0 = cutset_lower_boundary(power);
    const double s1 = kGoldenRatio;
    if (s0 >= s1) return 0.0;
    return 3.0 * exp_integral_e1(s0) - 3.0 * exp_integral_e1(s1) - (s0 - 1.0) * std::exp(-s0) +
           (s1 - 1.0) * std::exp(-s1);
}

double cutset_expected_quadrature(double power) {
    const double s0 = cutset_lower_boundary(power);
    return integrate([](double s) { return std::exp(-s) * (1.0 + s) * (3.0 / s - 1.0); }, s0, kGoldenRatio, 1e-12);
}

RateResult cutset_expected_rate(const PowerConfig& p) {
    p.validate();
    const double P = std::min(p.ps, p.pr);
    RateResult out;
    out.value_nats = std::max(cutset_expected_closed(P), 0.0);
    out.params = {{"s0", cutset_lower_boundary(P)}, {"s1", kGoldenRatio}, {"P", P}};
    out.method = "cutset-expected";
    return out;
}

double rc_threshold_cap(const PowerConfig& p) {
    const double ps = p.ps, pr = p.pr;
    return (std::sqrt(ps * ps + 4.0 * ps * pr + 20.0 * pr * pr) - ps + 2.0 * pr) / (2.0 * ps + 4.0 * pr);
}

double rc_throughput_objective(const PowerConfig& p, double s) {
    const double rho = p.ps / p.pr;
    return (1.0 + s) * (1.0 + s * rho) * std::exp(-s * (1.0 + rho)) * std::log1p(p.ps * s);
}

RateResult rc_throughput(const PowerConfig& p) {
    p.validate();
    const double cap = rc_threshold_cap(p);
    auto r = maximize_scalar([&](double s) { return rc_throughput_objective(p, s); }, {0.0, cap, 1e-10});
    RateResult out;
    out.value_nats = std::max(r.value, 0.0);
    out.params = {{"s", r.argmax[0]}, {"s_t", cap}};
    out.evaluations = r.evaluations;
    out.converged = r.converged;
    out.method = "rc-throughput";
    return out;
}

namespace {

double dfub_lhs(double s) {
    const double e = std::exp(-s);
    return (2.0 - e) / (2.0 * s * -std::expm1(-s));
}

}  // namespace

double dfub_boundary(double rhs_const, double rhs_slope) {
    // lhs falls from +inf to 0 while the right side 1 + ps s grows
    auto g = [&](double s) { return dfub_lhs(s) - (rhs_const + rhs_slope * s); };
    double hi = 1.0;
    while (g(hi) > 0.0 && hi < 1e6) hi *= 2.0;
    double lo = 1e-3;
    while (g(lo) < 0.0 && lo > 1e-300) lo *= 0.5;
    return find_root(g, {lo, hi, 1e-14});
}

double dfub_antiderivative(double s) {
    return -4.0 * exp_integral_e1(s) + 2.0 * exp_integral_e1(2.0 * s) - std::exp(-2.0 * s) + 3.0 * std::exp(-s) +
           std::log(-std::expm1(-s));
}

double dfub_r1_closed(double ps) {
    if (!(ps > 0.0)) throw std::domain_error("dfub_r1_closed: ps must be > 0");
    return -dfub_antiderivative(dfub_boundary(1.0, ps)) - kDfubConstant1;
}

double dfub_r1_quadrature(double ps) {
    if (!(ps > 0.0)) throw std::domain_error("dfub_r1_quadrature: ps must be > 0");
    const double s0 = dfub_boundary(1.0, ps);
    const double s1 = dfub_boundary(1.0, 0.0);
    if (s0 >= s1) return 0.0;
    return integrate(
        [](double s) {
            const double e = std::exp(-s);
            return e * (2.0 - e) * (2.0 / s + (2.0 * e - 1.0) / -std::expm1(-s));
        },
        s0, s1, 1e-12);
}

double dfub_r2_closed(double pr) {
    const double s2 = cutset_lower_boundary(pr);
    return 3.0 * exp_integral_e1(s2) - (s2 - 1.0) * std::exp(-s2) - kDfubConstant2;
}

double dfub_r2_quadrature(double pr) { return cutset_expected_quadrature(pr); }

RateResult dfub_cutset(const PowerConfig& p) {
    p.validate();
    const double r1 = dfub_r1_closed(p.ps);
    const double r2 = dfub_r2_closed(p.pr);
    RateResult out;
    out.value_nats = std::max(std::min(r1, r2), 0.0);
    out.params = {{"R1", r1},
                  {"R2", r2},
                  {"R1_quad", dfub_r1_quadrature(p.ps)},
                  {"R2_quad", dfub_r2_quadrature(p.pr)}};
    out.method = "dfub-cutset";
    return out;
}

RateResult evaluate_bound(BoundKind k, const PowerConfig& p) {
    switch (k) {
        case BoundKind::cutset_throughput: return cutset_throughput(p);
        case BoundKind::cutset_expected: return cutset_expected_rate(p);
        case BoundKind::rc_throughput: return rc_throughput(p);
        case BoundKind::dfub_cutset: return dfub_cutset(p);
    }
    throw std::invalid_argument("evaluate_bound: bad kind");
}

}  // namespace diamondbc
