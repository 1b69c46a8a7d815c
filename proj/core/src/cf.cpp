#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "diamondbc/schemes.hpp"

namespace diamondbc {

double cf_relay_rate_floor(double ar1, double ar2, double d, double ps) {
    const double t1 = std::max(quantizer_theta(d, ar1, ps), 0.0);
    const double t2 = std::max(quantizer_theta(d, ar2, ps), 0.0);
    const double acf = gain_cf_clamped(ar1, ar2, d, ps);
    const double sum_term = 0.5 * std::log1p((ar1 + ar2) * ps) - std::log(d);
    const double wz = std::log1p(acf * ps) + std::log((t1 + d) * (t2 + d) / (d * (1.0 + std::min(ar1, ar2) * ps)));
    return std::max(sum_term, wz);
}

namespace {

double cf_destination_ceiling(double a1, double a2, double pr) {
    return std::min(0.5 * std::log1p((a1 + a2) * pr), std::log1p(std::min(a1, a2) * pr));
}

}  // namespace

double cf_destination_probability(const PowerConfig& p, double relay_rate) {
    if (!(relay_rate > 0.0)) return 1.0;
    const double em1 = std::expm1(relay_rate);
    const double t = em1 / p.pr;
    const double v = em1 * em1 / p.pr;
    return std::exp(-2.0 * t) * (1.0 + v) * std::exp(-v);
}

double cf_decode_probability(const PowerConfig& p, const CfParams& c, std::size_t n, const SeedSpec& seed) {
    p.validate();
    if (!(c.distortion > 0.0)) throw std::invalid_argument("cf_decode_probability: distortion must be > 0");
    if (n == 0) throw std::invalid_argument("cf_decode_probability: n must be >= 1");
    std::vector<std::size_t> hits(chunk_count(n), 0);
    parallel_chunks(n, [&](std::size_t chunk, std::size_t b, std::size_t e) {
        std::size_t h = 0;
        for (std::size_t i = b; i < e; ++i) {
            const auto s = fading_at(seed, i);
            const double lo = cf_relay_rate_floor(s.ar1, s.ar2, c.distortion, p.ps);
            const double hi = cf_destination_ceiling(s.a1, s.a2, p.pr);
            if (lo < c.relay_rate && c.relay_rate < hi) ++h;
        }
        hits[chunk] = h;
    });
    std::size_t total = 0;
    for (auto h : hits) total += h;
    return static_cast<double>(total) / static_cast<double>(n);
}

CfRelaySamples CfRelaySamples::draw(const PowerConfig& p, double distortion, std::size_t n, const SeedSpec& seed) {
    if (!(distortion > 0.0)) throw std::invalid_argument("CfRelaySamples: distortion must be > 0");
    CfRelaySamples r;
    r.distortion = distortion;
    r.floor.resize(n);
    r.gain.resize(n);
    parallel_chunks(n, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const auto s = fading_at(seed, i);
            r.floor[i] = cf_relay_rate_floor(s.ar1, s.ar2, distortion, p.ps);
            r.gain[i] = gain_cf_clamped(s.ar1, s.ar2, distortion, p.ps);
        }
    });
    r.floor_sorted = r.floor;
    r.gain_sorted = r.gain;
    std::sort(r.floor_sorted.begin(), r.floor_sorted.end());
    std::sort(r.gain_sorted.begin(), r.gain_sorted.end());
    return r;
}

double CfRelaySamples::relay_probability(double relay_rate) const {
    const auto it = std::lower_bound(floor_sorted.begin(), floor_sorted.end(), relay_rate);
    return static_cast<double>(it - floor_sorted.begin()) / static_cast<double>(floor_sorted.size());
}

double CfRelaySamples::gain_tail(double s) const {
    const auto it = std::lower_bound(gain_sorted.begin(), gain_sorted.end(), s);
    return static_cast<double>(gain_sorted.end() - it) / static_cast<double>(gain_sorted.size());
}

double CfRelaySamples::joint_tail(double relay_rate, double s) const {
    std::size_t count = 0;
    for (std::size_t i = 0; i < gain.size(); ++i)
        if (floor[i] < relay_rate && gain[i] >= s) ++count;
    return static_cast<double>(count) / static_cast<double>(gain.size());
}

std::pair<double, double> cf_best_relay_rate(const PowerConfig& p, const CfRelaySamples& r) {
    const auto& f = r.floor_sorted;
    const std::size_t n = f.size();
    double best = 0.0;
    double best_rate = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j + 1 < n && f[j + 1] == f[j]) continue;  // take the last of a run of ties
        const double rate = std::nextafter(std::max(f[j], 0.0), std::numeric_limits<double>::infinity());
        const double v = static_cast<double>(j + 1) / static_cast<double>(n) * cf_destination_probability(p, rate);
        if (v > best) {
            best = v;
            best_rate = rate;
        }
    }
    return {best, best_rate};
}

namespace {

// max_s Fbar(s) ln(1 + ps s) over the empirical a_CF law
std::pair<double, double> best_source_threshold(const PowerConfig& p, const CfRelaySamples& r) {
    const auto& g = r.gain_sorted;
    const std::size_t n = g.size();
    double best = 0.0;
    double best_s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j > 0 && g[j - 1] == g[j]) continue;
        const double v = static_cast<double>(n - j) / static_cast<double>(n) * std::log1p(p.ps * g[j]);
        if (v > best) {
            best = v;
            best_s = g[j];
        }
    }
    return {best, best_s};
}

}  // namespace

double cf_throughput_objective(const PowerConfig& p, const CfRelaySamples& r, double s, double relay_rate,
                               CfModel model) {
    const double dest = cf_destination_probability(p, relay_rate);
    const double rate = std::log1p(p.ps * s);
    if (model == CfModel::product) return r.relay_probability(relay_rate) * dest * r.gain_tail(s) * rate;
    return r.joint_tail(relay_rate, s) * dest * rate;
}

Bracket cf_distortion_range(const PowerConfig& p) {
    return {1e-3, 1.0 + p.ps * std::numbers::ln10, 1e-4};
}

namespace {

template <class Inner>
RateResult optimize_distortion(const PowerConfig& p, const EngineOptions& opt, const Inner& inner,
                               const std::string& method) {
    p.validate();
    const auto range = cf_distortion_range(p);
    const SeedSpec seed = opt.seed.with_stream(kStreamCf);
    const std::size_t n_search = std::min(opt.search_samples, opt.samples);
    auto objective = [&](double logd) {
        const auto r = CfRelaySamples::draw(p, std::exp(logd), n_search, seed);
        return inner(r).value_nats;
    };
    auto best = maximize_scalar(objective, {std::log(range.lo), std::log(range.hi), 1e-3}, 24);
    const double d = std::exp(best.argmax[0]);
    const auto r = CfRelaySamples::draw(p, d, opt.samples, seed);
    RateResult out = inner(r);
    out.params.insert(out.params.begin(), {"D", d});
    out.evaluations = best.evaluations + 1;
    out.converged = best.converged;
    out.method = method;
    return out;
}

}  // namespace

RateResult cf_throughput(const PowerConfig& p, const EngineOptions& opt) {
    auto inner = [&](const CfRelaySamples& r) {
        const auto [pc, rate] = cf_best_relay_rate(p, r);
        const auto [src, s] = best_source_threshold(p, r);
        RateResult out;
        out.value_nats = pc * src;
        out.params = {{"R_r", rate}, {"s", s}, {"P_C", pc}};
        return out;
    };
    return optimize_distortion(p, opt, inner, "cf-product");
}

RateResult cf_expected_rate(const PowerConfig& p, const EngineOptions& opt) {
    auto inner = [&](const CfRelaySamples& r) {
        const auto [pc, rate] = cf_best_relay_rate(p, r);
        RateResult out;
        out.params = {{"R_r", rate}, {"P_C", pc}};
        if (pc <= 0.0) return out;
        double layered = 0.0;
        try {
            const auto dist = GainDistribution::from_samples(r.gain);
            const auto c = continuous_expected_rate(dist, p.ps, 1.0);
            layered = c.value_nats;
            out.params.emplace_back("s0", c.param("s0"));
            out.params.emplace_back("s1", c.param("s1"));
        } catch (const NumericError&) {
            layered = 0.0;
        }
        out.value_nats = pc * layered;
        return out;
    };
    return optimize_distortion(p, opt, inner, "cf-continuous");
}

}  // namespace diamondbc
