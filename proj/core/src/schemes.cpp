#include "diamondbc/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace diamondbc {

double df_threshold_cap(const PowerConfig& p) { return std::min(2.0 * p.pr / p.ps, 1.212); }

double df_throughput_objective(const PowerConfig& p, double s) {
    const double rho = p.ps / p.pr;
    const double es = std::exp(-s);
    return (rho * s * es - es + 2.0) * std::exp(-s * (rho + 1.0)) * std::log1p(p.ps * s);
}

RateResult df_throughput(const PowerConfig& p) {
    p.validate();
    const double cap = df_threshold_cap(p);
    auto r = maximize_scalar([&](double s) { return df_throughput_objective(p, s); }, {0.0, cap, 1e-10});
    RateResult out;
    out.value_nats = std::max(r.value, 0.0);
    out.params = {{"s", r.argmax[0]}};
    out.evaluations = r.evaluations;
    out.converged = r.converged;
    out.method = "df-closed-form";
    return out;
}

namespace {

GainDistribution af_table(const std::string& tag, const GainFunction& g, const PowerConfig& p,
                          const EngineOptions& opt, std::uint64_t stream) {
    return cached_tabulation(opt.cache, tag, g, p, opt.samples, opt.seed.with_stream(stream));
}

double table_span(const GainDistribution& d) { return d.grid.back(); }

}  // namespace

AfTableSet af_tables(const PowerConfig& p, const EngineOptions& opt) {
    p.validate();
    const double ath = af_on_threshold(p);
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    if (opt.af_tables == AfTables::unconditional) {
        return {af_table("af2-u", [p](const FadingSample& s) { return gain_af2(s, p); }, p, opt, kStreamAf2),
                af_table("af1-u", [p](const FadingSample& s) { return gain_af1(s.ar1, s.a1, p); }, p, opt,
                         kStreamAf1)};
    }
    return {af_table("af2-g",
                     [p, ath](const FadingSample& s) {
                         return s.ar1 >= ath && s.ar2 >= ath ? gain_af2(s, p) : nan;
                     },
                     p, opt, kStreamAf2),
            af_table("af1-g", [p, ath](const FadingSample& s) { return s.ar1 >= ath ? gain_af1(s.ar1, s.a1, p) : nan; },
                     p, opt, kStreamAf1)};
}

double af_throughput_objective(const PowerConfig& p, const AfTableSet& t, double s) {
    const double on = std::exp(-af_on_threshold(p));
    return on * (on * t.two.Fbar(s) + 2.0 * (1.0 - on) * t.one.Fbar(s)) * std::log1p(p.ps * s);
}

RateResult af_throughput(const PowerConfig& p, const AfTableSet& t) {
    const double hi = std::max(table_span(t.two), table_span(t.one));
    auto r = maximize_scalar([&](double s) { return af_throughput_objective(p, t, s); }, {0.0, hi, 1e-10});
    RateResult out;
    out.value_nats = std::max(r.value, 0.0);
    out.params = {{"s", r.argmax[0]}, {"a_th", af_on_threshold(p)}};
    out.evaluations = r.evaluations;
    out.converged = r.converged;
    out.method = "af-tabulated";
    return out;
}

RateResult af_throughput(const PowerConfig& p, const EngineOptions& opt) {
    auto r = af_throughput(p, af_tables(p, opt));
    r.method = opt.af_tables == AfTables::unconditional ? "af-tabulated" : "af-tabulated-gated";
    return r;
}

GainDistribution af_mixture(const PowerConfig& p, const AfTableSet& t) {
    const double on = std::exp(-af_on_threshold(p));
    return GainDistribution::mixture({&t.one, &t.two}, {2.0 * (1.0 - on), on});
}

RateResult af_expected_rate(const PowerConfig& p, bool power_saving, const EngineOptions& opt) {
    const auto t = af_tables(p, opt);
    const double ath = af_on_threshold(p);
    const double on = std::exp(-ath);
    const auto mix = af_mixture(p, t);
    auto r = continuous_expected_rate(mix, p.ps, on * (2.0 - on),
                                      power_saving ? S0Equation::power_saving : S0Equation::standard, ath);
    r.params.emplace_back("a_th", ath);
    r.method = power_saving ? "af-continuous-power-saving" : "af-continuous";
    return r;
}

namespace {

// First crossing of h from positive to nonpositive on the grid, refined.
double first_crossing(const GainDistribution& d, const std::function<double(double)>& h, const char* what) {
    const auto& g = d.grid;
    double prev_s = g.front();
    double prev_h = h(prev_s);
    if (!(prev_h > 0.0)) throw NumericError(std::string("continuous layering: boundary ") + what +
                                             " not found (no sign change on the grid)");
    for (std::size_t i = 1; i < g.size(); ++i) {
        const double hv = h(g[i]);
        if (hv <= 0.0) return find_root(h, {prev_s, g[i], 1e-13});
        prev_s = g[i];
        prev_h = hv;
    }
    // exponential tail beyond the grid
    double hi = std::max(2.0 * g.back(), 1.0);
    for (int i = 0; i < 60 && h(hi) > 0.0; ++i) hi *= 2.0;
    if (h(hi) > 0.0)
        throw NumericError(std::string("continuous layering: boundary ") + what + " not found (no sign change)");
    return find_root(h, {g.back(), hi, 1e-13});
}

}  // namespace

double continuous_upper_boundary(const GainDistribution& d) {
    return first_crossing(d, [&](double s) { return d.Fbar(s) - s * d.f(s); }, "s1");
}

double continuous_lower_boundary(const GainDistribution& d, double ps) {
    return first_crossing(d, [&](double s) { return d.Fbar(s) - s * (1.0 + ps * s) * d.f(s); }, "s0");
}

RateResult continuous_expected_rate(const GainDistribution& d, double ps, double prefactor, S0Equation eq,
                                    double a_th) {
    if (!(prefactor > 0.0 && prefactor <= 1.0)) throw std::invalid_argument("continuous_expected_rate: prefactor");
    if (!(ps > 0.0)) throw std::invalid_argument("continuous_expected_rate: ps must be > 0");
    const double ps_eff = eq == S0Equation::power_saving ? std::exp(a_th) * ps : ps;
    const double s1 = continuous_upper_boundary(d);
    const double s0 = continuous_lower_boundary(d, ps_eff);
    RateResult out;
    out.method = "continuous-layer";
    out.params = {{"s0", s0}, {"s1", s1}};
    if (s0 >= s1) {
        out.value_nats = 0.0;
        return out;
    }
    auto integrand = [&](double s) {
        const double f = d.f(s);
        const double ratio = f > 1e-300 ? d.fprime(s) / f : 0.0;
        return d.Fbar(s) * (2.0 / s + ratio);
    };
    const double value = integrate(integrand, s0, s1, 1e-10);
    out.value_nats = std::max(prefactor * value, 0.0);
    return out;
}

double daf_printed_objective(const PowerConfig& p, const AfTableSet& af, const GainDistribution& daf, double s) {
    const double rho = p.ps / p.pr;
    const double g = p.pr / p.ps;
    const double on = std::exp(-af_on_threshold(p));
    const double fail = 1.0 - std::exp(-s);
    const double df_branch =
        (2.0 * std::exp(s) + 2.0 * std::exp(-g) + s * rho - 2.0 * std::exp(s - g) - 1.0) * std::exp(-s * (2.0 + rho));
    const double af_branch = (on * af.two.Fbar(s) + (1.0 - on) * af.one.Fbar(s)) * on * fail * fail;
    const double mixed = 2.0 * std::exp(-(s + g)) * fail * daf.Fbar(s * rho);
    return (df_branch + af_branch + mixed) * std::log1p(p.ps * s);
}

RateResult daf_throughput_printed(const PowerConfig& p, const EngineOptions& opt) {
    EngineOptions o = opt;
    o.af_tables = AfTables::unconditional;
    const auto af = af_tables(p, o);
    const auto daf = cached_tabulation(opt.cache, "daf", [p](const FadingSample& s) { return gain_daf(s, p); }, p,
                                       opt.samples, opt.seed.with_stream(kStreamDaf));
    auto r = maximize_scalar([&](double s) { return daf_printed_objective(p, af, daf, s); }, {0.0, 4.0, 1e-10});
    RateResult out;
    out.value_nats = std::max(r.value, 0.0);
    out.params = {{"s", r.argmax[0]}};
    out.evaluations = r.evaluations;
    out.converged = r.converged;
    out.method = "daf-printed-formula";
    return out;
}

}  // namespace diamondbc
