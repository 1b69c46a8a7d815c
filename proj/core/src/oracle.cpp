#include "diamondbc/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace diamondbc {

std::size_t SimReport::counter(const std::string& name) const {
    for (const auto& [k, v] : counters)
        if (k == name) return v;
    throw std::out_of_range("SimReport: no counter " + name);
}

namespace {

using cd = std::complex<double>;
using Mat2 = std::array<std::array<cd, 2>, 2>;

cd as_complex(const ComplexGain& g) { return {g.re, g.im}; }

// e^{2j arg h}, the second-slot phase a relay applies so the code stays orthogonal
cd phase_fix(cd h) {
    const double m = std::abs(h);
    return m > 0.0 ? (h / m) * (h / m) : cd{1.0, 0.0};
}

Mat2 adjoint_times(const Mat2& a, const Mat2& b) {
    Mat2 r{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) r[i][j] += std::conj(a[k][i]) * b[k][j];
    return r;
}

constexpr int kMaxCounters = 8;

struct Accum {
    double sum = 0.0;
    double sumsq = 0.0;
    std::array<std::size_t, kMaxCounters> counts{};
};

struct Outcome {
    double value;
    int bucket;
};

// Runs sample(i) -> Outcome over [0, n) in fixed chunks; chunk partials are
// merged in index order so the result does not depend on the thread count.
template <class F>
SimReport run(std::size_t n, const SeedSpec& seed, const std::vector<std::string>& names, const F& sample) {
    if (n < 2) throw std::invalid_argument("simulation: n must be >= 2");
    if (names.size() > kMaxCounters) throw std::logic_error("simulation: too many counters");
    std::vector<Accum> parts(chunk_count(n));
    parallel_chunks(n, [&](std::size_t chunk, std::size_t b, std::size_t e) {
        Accum a;
        for (std::size_t i = b; i < e; ++i) {
            const Outcome o = sample(i);
            a.sum += o.value;
            a.sumsq += o.value * o.value;
            ++a.counts[o.bucket];
        }
        parts[chunk] = a;
    });
    Accum total;
    for (const auto& a : parts) {
        total.sum += a.sum;
        total.sumsq += a.sumsq;
        for (int k = 0; k < kMaxCounters; ++k) total.counts[k] += a.counts[k];
    }
    const double nn = static_cast<double>(n);
    const double mean = total.sum / nn;
    const double var = std::max(total.sumsq - total.sum * mean, 0.0) / (nn - 1.0);
    SimReport r;
    r.estimate = mean;
    r.std_error = std::sqrt(var / nn);
    r.n = n;
    r.seed = seed;
    for (std::size_t k = 0; k < names.size(); ++k) r.counters.emplace_back(names[k], total.counts[k]);
    return r;
}

double af_coefficient(double ar, const PowerConfig& p) { return std::sqrt(p.pr / (ar * p.ps + 1.0)); }

}  // namespace

double alamouti_mutual_info(const FadingSample& s, const PowerConfig& p, double c1, double c2) {
    const cd h1 = as_complex(s.h1), h2 = as_complex(s.h2);
    const cd hr1 = as_complex(s.hr1), hr2 = as_complex(s.hr2);
    const double rp = std::sqrt(p.ps);
    // Slot 1: relay 1 sends c1 y_r1(1), relay 2 sends c2 y_r2(2).
    // Slot 2: relay 1 sends -c1 w1 y_r1(2)*, relay 2 sends c2 w2 y_r2(1)*.
    // Rows below are y(1) and y(2)* against (x1, x2).
    const cd w1 = phase_fix(hr1), w2 = phase_fix(hr2);
    Mat2 H{};
    H[0][0] = h1 * c1 * hr1 * rp;
    H[0][1] = h2 * c2 * hr2 * rp;
    H[1][0] = std::conj(h2) * c2 * std::conj(w2) * hr2 * rp;
    H[1][1] = -std::conj(h1) * c1 * std::conj(w1) * hr1 * rp;

    // noise sources: n_r1(1), n_r1(2), n_r2(1), n_r2(2), z(1), z(2)*
    std::array<std::array<cd, 6>, 2> N{};
    N[0] = {h1 * c1, 0.0, 0.0, h2 * c2, 1.0, 0.0};
    N[1] = {0.0, -std::conj(h1) * c1 * std::conj(w1), std::conj(h2) * c2 * std::conj(w2), 0.0, 0.0, 1.0};
    Mat2 K{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 6; ++k) K[i][j] += N[i][k] * std::conj(N[j][k]);

    // matched filter H^H: signal G = H^H H, noise H^H K H
    const Mat2 G = adjoint_times(H, H);
    Mat2 KH{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) KH[i][j] += K[i][k] * H[k][j];
    const Mat2 noise = adjoint_times(H, KH);
    const double sig = std::norm(G[0][0]);
    if (sig == 0.0) return 0.0;
    const double interf = std::norm(G[0][1]) + noise[0][0].real();
    return std::log1p(sig / interf);
}

double alamouti_af_mutual_info(const FadingSample& s, const PowerConfig& p) {
    return alamouti_mutual_info(s, p, af_coefficient(s.ar1, p), af_coefficient(s.ar2, p));
}

SimReport simulate_df_single(const PowerConfig& p, double s, std::size_t n, const SeedSpec& seed) {
    p.validate();
    if (!(s > 0.0)) throw std::invalid_argument("simulate_df_single: s must be > 0");
    const double rate = std::log1p(p.ps * s);
    const double need = p.ps * s;
    return run(n, seed, {"both", "one", "none"}, [&](std::size_t i) {
        const auto f = fading_at(seed, i);
        const bool d1 = f.ar1 >= s, d2 = f.ar2 >= s;
        const double snr = p.pr * ((d1 ? f.a1 : 0.0) + (d2 ? f.a2 : 0.0));
        const int bucket = d1 && d2 ? 0 : (d1 || d2 ? 1 : 2);
        return Outcome{bucket < 2 && snr >= need ? rate : 0.0, bucket};
    });
}

SimReport simulate_af(const PowerConfig& p, double s, std::size_t n, const SeedSpec& seed, double gate) {
    p.validate();
    if (!(s > 0.0)) throw std::invalid_argument("simulate_af: s must be > 0");
    const double rate = std::log1p(p.ps * s);
    return run(n, seed, {"both_on", "one_on", "none_on"}, [&](std::size_t i) {
        const auto f = fading_at(seed, i);
        const bool on1 = f.ar1 >= gate, on2 = f.ar2 >= gate;
        const int bucket = on1 && on2 ? 0 : (on1 || on2 ? 1 : 2);
        if (bucket == 2) return Outcome{0.0, bucket};
        const double mi =
            alamouti_mutual_info(f, p, on1 ? af_coefficient(f.ar1, p) : 0.0, on2 ? af_coefficient(f.ar2, p) : 0.0);
        return Outcome{mi >= rate ? rate : 0.0, bucket};
    });
}

SimReport simulate_af(const PowerConfig& p, double s, std::size_t n, const SeedSpec& seed) {
    return simulate_af(p, s, n, seed, af_on_threshold(p));
}

SimReport simulate_daf_single(const PowerConfig& p, double s, std::size_t n, const SeedSpec& seed, DafMode mode) {
    p.validate();
    if (!(s > 0.0)) throw std::invalid_argument("simulate_daf_single: s must be > 0");
    const double rate = std::log1p(p.ps * s);
    const double need = p.ps * s;
    const double gate = p.pr / p.ps;
    return run(n, seed, {"both_decode", "one_decode", "none_decode"}, [&](std::size_t i) {
        const auto f = fading_at(seed, i);
        bool d1 = f.ar1 >= s, d2 = f.ar2 >= s;
        if (mode == DafMode::amplify_only) d1 = d2 = false;
        if (d1 && d2) return Outcome{(f.a1 + f.a2) * p.pr >= need ? rate : 0.0, 0};
        if (!d1 && !d2) {
            if (mode == DafMode::decode_only) return Outcome{0.0, 2};
            const double c1 = f.ar1 > gate ? af_coefficient(f.ar1, p) : 0.0;
            const double c2 = f.ar2 > gate ? af_coefficient(f.ar2, p) : 0.0;
            if (c1 == 0.0 && c2 == 0.0) return Outcome{0.0, 2};
            return Outcome{alamouti_mutual_info(f, p, c1, c2) >= rate ? rate : 0.0, 2};
        }
        // one relay re-encodes at full power, the other may amplify
        const double a_dec = d1 ? f.a1 : f.a2;
        const double a_amp = d1 ? f.a2 : f.a1;
        const double ar_amp = d1 ? f.ar2 : f.ar1;
        const bool df_ok = a_dec * p.pr >= need;
        if (mode == DafMode::decode_only) return Outcome{df_ok ? rate : 0.0, 1};
        const double c2 = p.pr / (ar_amp * p.ps + 1.0);
        const double snr = (a_dec * p.pr + a_amp * c2 * ar_amp * p.ps) / (1.0 + a_amp * c2);
        const bool amp_ok = snr >= need;
        bool ok;
        if (mode == DafMode::genie)
            ok = df_ok || amp_ok;
        else
            ok = ar_amp > gate ? amp_ok : df_ok;
        return Outcome{ok ? rate : 0.0, 1};
    });
}

namespace {

struct RelayTx {
    std::array<double, 3> power{};  // per-layer received power factor (times a_l at the destination)
    double noise = 0.0;            // forwarded relay noise factor
};

RelayTx relay_transmit(const PowerConfig& p, const LayerPlan& plan, const PrefixAllocations& alloc, double ar,
                       bool daf) {
    const int k = plan.k();
    int m = 0;
    while (m < k && ar >= plan.s[m]) ++m;
    RelayTx t;
    const double xi = daf ? alloc.xi[m] : 1.0;
    for (int i = 0; i < m; ++i) t.power[i] = xi * alloc.power[m][i];
    const bool gate_ok = m > 0 || ar > p.pr / p.ps;
    if (daf && m < k && xi < 1.0 && gate_ok) {
        // subtract the decoded layers, scale the rest to (1 - xi) P_r
        double rest = 0.0;
        for (int i = m; i < k; ++i) rest += plan.gamma2[i];
        const double c2 = (1.0 - xi) * p.pr / (ar * rest + 1.0);
        for (int i = m; i < k; ++i) t.power[i] = ar * c2 * plan.gamma2[i];
        t.noise = c2;
    }
    return t;
}

SimReport simulate_layered(const PowerConfig& p, const LayerPlan& plan, const PrefixAllocations& alloc,
                           std::size_t n, const SeedSpec& seed, bool daf) {
    p.validate();
    plan.validate(p.ps);
    alloc.validate(p.pr);
    const int k = plan.k();
    if (k > 3) throw std::invalid_argument("layered simulation: k must be <= 3");
    if (alloc.k() != k) throw std::invalid_argument("layered simulation: allocation/plan size mismatch");
    std::vector<double> tau(k), rate(k);
    for (int i = 0; i < k; ++i) {
        tau[i] = plan.threshold(i);
        rate[i] = plan.rate(i);
    }
    std::vector<std::string> names;
    for (int i = 0; i <= k; ++i) names.push_back("decoded_" + std::to_string(i));
    return run(n, seed, names, [&](std::size_t idx) {
        const auto f = fading_at(seed, idx);
        const RelayTx t1 = relay_transmit(p, plan, alloc, f.ar1, daf);
        const RelayTx t2 = relay_transmit(p, plan, alloc, f.ar2, daf);
        const double noise = 1.0 + f.a1 * t1.noise + f.a2 * t2.noise;
        double got = 0.0;
        int layers = 0;
        for (int i = 0; i < k; ++i) {
            const double sig = f.a1 * t1.power[i] + f.a2 * t2.power[i];
            double interf = noise;
            for (int j = i + 1; j < k; ++j) interf += f.a1 * t1.power[j] + f.a2 * t2.power[j];
            if (!(sig > 0.0) || sig < tau[i] * interf) break;
            got += rate[i];
            ++layers;
        }
        return Outcome{got, layers};
    });
}

}  // namespace

SimReport simulate_layered_df(const PowerConfig& p, const LayerPlan& plan, const PrefixAllocations& alloc,
                              std::size_t n, const SeedSpec& seed) {
    return simulate_layered(p, plan, alloc, n, seed, false);
}

SimReport simulate_layered_daf(const PowerConfig& p, const LayerPlan& plan, const PrefixAllocations& alloc,
                               std::size_t n, const SeedSpec& seed) {
    return simulate_layered(p, plan, alloc, n, seed, true);
}

namespace {

// a_CF as defined for the quantized pair; a relay with theta <= 0 adds nothing
double cf_quantized_gain(double ar1, double ar2, double d, double ps) {
    const double t1 = std::max(1.0 - d / (1.0 + ar1 * ps), 0.0);
    const double t2 = std::max(1.0 - d / (1.0 + ar2 * ps), 0.0);
    const double g1 = t1 > 0.0 ? ar1 / (1.0 + (t2 + d) / (t2 + 1.0) * d / t1) : 0.0;
    const double g2 = t2 > 0.0 ? ar2 / (1.0 + (t1 + d) / (t1 + 1.0) * d / t2) : 0.0;
    return g1 + g2;
}

// Relay side of the CF inequality block: Wyner-Ziv and sum-rate conditions.
bool cf_relay_ok(double ar1, double ar2, double d, double rr, double ps) {
    const double t1 = std::max(1.0 - d / (1.0 + ar1 * ps), 0.0);
    const double t2 = std::max(1.0 - d / (1.0 + ar2 * ps), 0.0);
    const double acf = cf_quantized_gain(ar1, ar2, d, ps);
    const double base = std::log1p(acf * ps) + std::log((t1 + d) * (t2 + d) / d);
    if (base - std::log1p(ar2 * ps) > rr) return false;
    if (base - std::log1p(ar1 * ps) > rr) return false;
    return std::log(((ar1 + ar2) * ps + 1.0) / (d * d)) <= 2.0 * rr;
}

// Destination side: two-user MAC region.
bool cf_destination_ok(double a1, double a2, double rr, double pr) {
    return rr < std::log1p(a1 * pr) && rr < std::log1p(a2 * pr) && 2.0 * rr < std::log1p((a1 + a2) * pr);
}

// Lebesgue measure of {v in (0,1): ok(v)} with v the Exp(1) CDF value.
template <class Ok>
double inner_measure(const Ok& ok) {
    constexpr int kGrid = 512;
    auto gain = [](double v) { return -std::log1p(-v); };
    auto at = [&](double v) { return ok(gain(v)); };
    double total = 0.0;
    double prev_v = 0.0;
    bool prev = at(0.0);
    for (int j = 1; j <= kGrid; ++j) {
        const double v = j == kGrid ? 1.0 - 1e-13 : static_cast<double>(j) / kGrid;
        const bool cur = at(v);
        if (cur == prev) {
            if (cur) total += v - prev_v;
        } else {
            double lo = prev_v, hi = v;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                (at(mid) == prev ? lo : hi) = mid;
            }
            total += prev ? lo - prev_v : v - lo;
        }
        prev_v = v;
        prev = cur;
    }
    return total;
}

template <class Ok>
double unit_square_measure(const Ok& ok, int panels) {
    const auto& rule = gauss_legendre(8);
    auto gain = [](double u) { return -std::log1p(-u); };
    double total = 0.0;
    const double h = 1.0 / panels;
    for (int q = 0; q < panels; ++q) {
        const double mid = (q + 0.5) * h;
        for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
            const double x = gain(mid + 0.5 * h * rule.nodes[j]);
            total += 0.5 * h * rule.weights[j] * inner_measure([&](double y) { return ok(x, y); });
        }
    }
    return total;
}

}  // namespace

SimReport simulate_cf(const PowerConfig& p, const CfParams& c, double s, std::size_t n, const SeedSpec& seed) {
    p.validate();
    if (!(c.distortion > 0.0)) throw std::invalid_argument("simulate_cf: distortion must be > 0");
    if (!(s > 0.0)) throw std::invalid_argument("simulate_cf: s must be > 0");
    const double rate = std::log1p(p.ps * s);
    return run(n, seed, {"success", "relay_fail", "source_fail"}, [&](std::size_t i) {
        const auto f = fading_at(seed, i);
        if (!(c.relay_rate > 0.0) || !cf_relay_ok(f.ar1, f.ar2, c.distortion, c.relay_rate, p.ps) ||
            !cf_destination_ok(f.a1, f.a2, c.relay_rate, p.pr))
            return Outcome{0.0, 1};
        if (std::log1p(p.ps * cf_quantized_gain(f.ar1, f.ar2, c.distortion, p.ps)) < rate) return Outcome{0.0, 2};
        return Outcome{rate, 0};
    });
}

double cf_decode_probability_quadrature(const PowerConfig& p, const CfParams& c, int panels) {
    p.validate();
    if (!(c.relay_rate > 0.0)) return 0.0;
    // the relay and destination gains are independent, so the 4-D integral
    // is a product of two 2-D ones
    const double relay = unit_square_measure(
        [&](double x, double y) { return cf_relay_ok(x, y, c.distortion, c.relay_rate, p.ps); }, panels);
    const double dest =
        unit_square_measure([&](double x, double y) { return cf_destination_ok(x, y, c.relay_rate, p.pr); }, panels);
    return relay * dest;
}

DiscreteBroadcast discrete_broadcast_rate(const std::function<double(double)>& fbar, double ps, double prefactor,
                                          const std::vector<double>& thresholds) {
    const std::size_t L = thresholds.size();
    if (L < 1) throw std::invalid_argument("discrete_broadcast_rate: need at least one threshold");
    for (std::size_t i = 1; i < L; ++i)
        if (!(thresholds[i] > thresholds[i - 1])) throw std::invalid_argument("discrete_broadcast_rate: unsorted");
    std::vector<double> fb(L);
    for (std::size_t i = 0; i < L; ++i) fb[i] = fbar(thresholds[i]);

    // value = fb_0 ln(1 + s_0 P) + sum_i g_i(I_i), I_i the power above layer i
    auto g = [&](std::size_t i, double I) {
        return fb[i + 1] * std::log1p(thresholds[i + 1] * I) - fb[i] * std::log1p(thresholds[i] * I);
    };
    auto block_best = [&](std::size_t b, std::size_t e) {
        if (e == b + 1) {
            const double s0 = thresholds[b], s1 = thresholds[b + 1];
            const double num = fb[b + 1] * s1 - fb[b] * s0;
            const double den = s0 * s1 * (fb[b] - fb[b + 1]);
            if (num <= 0.0) return 0.0;
            if (den <= 0.0) return ps;
            return std::clamp(num / den, 0.0, ps);
        }
        auto r = maximize_scalar(
            [&](double I) {
                double v = 0.0;
                for (std::size_t i = b; i < e; ++i) v += g(i, I);
                return v;
            },
            {0.0, ps, 1e-12}, 128);
        return r.argmax[0];
    };

    struct Block {
        std::size_t b, e;
        double level;
    };
    std::vector<Block> st;
    for (std::size_t i = 0; i + 1 < L; ++i) {
        st.push_back({i, i + 1, block_best(i, i + 1)});
        while (st.size() >= 2 && st[st.size() - 2].level < st.back().level) {
            const Block top = st.back();
            st.pop_back();
            st.back().e = top.e;
            st.back().level = block_best(st.back().b, st.back().e);
        }
    }
    DiscreteBroadcast out;
    out.thresholds = thresholds;
    out.interference.assign(L, 0.0);
    for (const auto& blk : st)
        for (std::size_t i = blk.b; i < blk.e; ++i) out.interference[i] = blk.level;
    double v = fb[0] * std::log1p(thresholds[0] * ps);
    for (std::size_t i = 0; i + 1 < L; ++i) v += g(i, out.interference[i]);
    out.value_nats = prefactor * v;
    return out;
}

}  // namespace diamondbc
