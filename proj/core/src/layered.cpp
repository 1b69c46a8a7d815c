#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "diamondbc/schemes.hpp"

namespace diamondbc {

double LayerPlan::total_power() const { return std::accumulate(gamma2.begin(), gamma2.end(), 0.0); }

double LayerPlan::interference(int i) const {
    double sum = 0.0;
    for (int j = i + 1; j < k(); ++j) sum += gamma2[j];
    return sum;
}

double LayerPlan::threshold(int i) const { return gamma2[i] * s[i] / (1.0 + interference(i) * s[i]); }

double LayerPlan::rate(int i) const { return std::log1p(threshold(i)); }

void LayerPlan::validate(double ps) const {
    if (s.empty() || s.size() != gamma2.size()) throw std::invalid_argument("LayerPlan: size mismatch");
    for (int i = 0; i < k(); ++i) {
        if (!(s[i] > 0.0) || (i > 0 && !(s[i] > s[i - 1])))
            throw std::invalid_argument("LayerPlan: thresholds must be positive and increasing");
        if (!(gamma2[i] >= 0.0)) throw std::invalid_argument("LayerPlan: negative layer power");
    }
    if (std::abs(total_power() - ps) > 1e-9 * std::max(1.0, ps))
        throw std::invalid_argument("LayerPlan: layer powers do not sum to P_s");
}

void PrefixAllocations::validate(double pr) const {
    const int kk = k();
    if (kk < 1 || static_cast<int>(xi.size()) != kk + 1)
        throw std::invalid_argument("PrefixAllocations: size mismatch");
    for (int m = 0; m <= kk; ++m) {
        if (static_cast<int>(power[m].size()) != kk) throw std::invalid_argument("PrefixAllocations: row size");
        double sum = 0.0;
        for (int i = 0; i < kk; ++i) {
            if (power[m][i] < 0.0) throw std::invalid_argument("PrefixAllocations: negative power");
            if (i >= m && power[m][i] != 0.0)
                throw std::invalid_argument("PrefixAllocations: power on an undecoded layer");
            sum += power[m][i];
        }
        if (m > 0 && std::abs(sum - pr) > 1e-9 * std::max(1.0, pr))
            throw std::invalid_argument("PrefixAllocations: decoded powers do not sum to P_r");
        if (!(xi[m] >= 0.0 && xi[m] <= 1.0)) throw std::invalid_argument("PrefixAllocations: xi outside [0, 1]");
    }
}

double RateResult::param(const std::string& key) const {
    for (const auto& [k, v] : params)
        if (k == key) return v;
    throw std::out_of_range("RateResult: no parameter " + key);
}

std::string RateResult::params_string() const {
    std::ostringstream os;
    os << std::setprecision(6);
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (i > 0) os << ';';
        os << params[i].first << '=' << params[i].second;
    }
    return os.str();
}

namespace {

// int_u^v e^{-x} e^{-(m x + b)} dx
double exp_segment(double m, double b, double u, double v) {
    const double k = 1.0 + m;
    if (std::isinf(v)) return std::exp(-b - k * u) / k;
    if (std::abs(k) < 1e-14) return std::exp(-b) * (v - u);
    return std::exp(-b) * (std::exp(-k * u) - std::exp(-k * v)) / k;
}

}  // namespace

double halfplane_probability(const HalfPlane* rows, int count) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    double xlo = 0.0;
    double xhi = inf;
    // a2 bounds as lines m*a1 + b
    std::array<double, 9> lm{}, lb{}, um{}, ub{};
    int nl = 1, nu = 0;
    lm[0] = 0.0;
    lb[0] = 0.0;
    for (int r = 0; r < count; ++r) {
        const auto& h = rows[r];
        if (h.c2 == 0.0) {
            if (h.c1 > 0.0)
                xlo = std::max(xlo, h.t / h.c1);
            else if (h.c1 < 0.0)
                xhi = std::min(xhi, h.t / h.c1);
            else if (h.t > 0.0)
                return 0.0;
            continue;
        }
        const double m = -h.c1 / h.c2;
        const double b = h.t / h.c2;
        if (h.c2 > 0.0) {
            lm[nl] = m;
            lb[nl++] = b;
        } else {
            um[nu] = m;
            ub[nu++] = b;
        }
    }
    if (!(xlo < xhi)) return 0.0;

    std::array<double, 64> cuts{};
    int nc = 0;
    cuts[nc++] = xlo;
    auto add_cut = [&](double m1, double b1, double m2, double b2) {
        if (m1 == m2) return;
        const double x = (b2 - b1) / (m1 - m2);
        if (x > xlo && x < xhi) cuts[nc++] = x;
    };
    for (int i = 0; i < nl; ++i) {
        for (int j = i + 1; j < nl; ++j) add_cut(lm[i], lb[i], lm[j], lb[j]);
        for (int j = 0; j < nu; ++j) add_cut(lm[i], lb[i], um[j], ub[j]);
    }
    for (int i = 0; i < nu; ++i)
        for (int j = i + 1; j < nu; ++j) add_cut(um[i], ub[i], um[j], ub[j]);
    std::sort(cuts.begin(), cuts.begin() + nc);
    cuts[nc++] = xhi;

    double total = 0.0;
    for (int c = 0; c + 1 < nc; ++c) {
        const double u = cuts[c];
        const double v = cuts[c + 1];
        if (!(v > u)) continue;
        const double mid = std::isinf(v) ? u + 1.0 : 0.5 * (u + v);
        int il = 0;
        for (int i = 1; i < nl; ++i)
            if (lm[i] * mid + lb[i] > lm[il] * mid + lb[il]) il = i;
        const double lo_mid = lm[il] * mid + lb[il];
        double part = exp_segment(lm[il], lb[il], u, v);
        if (nu > 0) {
            int iu = 0;
            for (int i = 1; i < nu; ++i)
                if (um[i] * mid + ub[i] < um[iu] * mid + ub[iu]) iu = i;
            if (um[iu] * mid + ub[iu] <= lo_mid) continue;
            part -= exp_segment(um[iu], ub[iu], u, v);
        }
        total += part;
    }
    return std::clamp(total, 0.0, 1.0);
}

namespace {

struct RelayState {
    double weight;
    std::array<double, 3> power;  // per layer, at destination scale
    double noise;                 // amplified-noise coefficient c^2
};

std::vector<RelayState> relay_states(const PowerConfig& p, const LayerPlan& plan, const PrefixAllocations& alloc,
                                     bool amplify, int nodes) {
    const int k = plan.k();
    const double gate = p.pr / p.ps;
    const auto& rule = gauss_legendre(nodes);
    std::vector<RelayState> out;
    for (int m = 0; m <= k; ++m) {
        const double lo = m == 0 ? 0.0 : plan.s[m - 1];
        const double hi = m == k ? std::numeric_limits<double>::infinity() : plan.s[m];
        const double xi = amplify ? alloc.xi[m] : 1.0;
        RelayState decoded{0.0, {0.0, 0.0, 0.0}, 0.0};
        for (int i = 0; i < m; ++i) decoded.power[i] = xi * alloc.power[m][i];

        const bool amp = amplify && m < k && xi < 1.0;
        const double amp_lo = m == 0 ? std::max(lo, gate) : lo;
        if (!amp || !(amp_lo < hi)) {
            decoded.weight = std::exp(-lo) - std::exp(-hi);
            if (decoded.weight > 0.0) out.push_back(decoded);
            continue;
        }
        if (amp_lo > lo) {
            RelayState silent = decoded;
            silent.weight = std::exp(-lo) - std::exp(-amp_lo);
            out.push_back(silent);
        }
        double residual = 0.0;
        for (int i = m; i < k; ++i) residual += plan.gamma2[i];
        const double half = 0.5 * (hi - amp_lo);
        const double mid = 0.5 * (hi + amp_lo);
        for (int j = 0; j < nodes; ++j) {
            const double r = mid + half * rule.nodes[j];
            RelayState st = decoded;
            st.weight = half * rule.weights[j] * std::exp(-r);
            const double c2 = (1.0 - xi) * p.pr / (r * residual + 1.0);
            for (int i = m; i < k; ++i) st.power[i] = r * c2 * plan.gamma2[i];
            st.noise = c2;
            out.push_back(st);
        }
    }
    return out;
}

double pair_rate(const LayerPlan& plan, const std::vector<double>& tau, const std::vector<double>& rate,
                 const RelayState& u, const RelayState& v) {
    const int k = plan.k();
    std::array<HalfPlane, 3> rows{};
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
        if (u.power[i] == 0.0 && v.power[i] == 0.0) break;
        double au = 0.0, av = 0.0;
        for (int j = i + 1; j < k; ++j) {
            au += u.power[j];
            av += v.power[j];
        }
        rows[i] = {u.power[i] - tau[i] * (au + u.noise), v.power[i] - tau[i] * (av + v.noise), tau[i]};
        const double pr = halfplane_probability(rows.data(), i + 1);
        if (pr <= 0.0) break;
        sum += pr * rate[i];
    }
    return sum;
}

}  // namespace

double layered_expected_rate(const PowerConfig& p, const LayerPlan& plan, const PrefixAllocations& alloc, bool amplify,
                             int quad_nodes) {
    const int k = plan.k();
    if (k < 1 || k > 3) throw std::invalid_argument("layered_expected_rate: k must be in {1, 2, 3}");
    if (alloc.k() != k) throw std::invalid_argument("layered_expected_rate: allocation/plan size mismatch");
    std::vector<double> tau(k), rate(k);
    for (int i = 0; i < k; ++i) {
        tau[i] = plan.threshold(i);
        rate[i] = plan.rate(i);
    }
    const auto states = relay_states(p, plan, alloc, amplify, quad_nodes);
    double total = 0.0;
    for (std::size_t a = 0; a < states.size(); ++a) {
        total += states[a].weight * states[a].weight * pair_rate(plan, tau, rate, states[a], states[a]);
        for (std::size_t b = a + 1; b < states.size(); ++b)
            total += 2.0 * states[a].weight * states[b].weight * pair_rate(plan, tau, rate, states[a], states[b]);
    }
    return total;
}

double daf_throughput_objective(const PowerConfig& p, double s, int quad_nodes) {
    if (!(s > 0.0)) return 0.0;
    LayerPlan plan{{s}, {p.ps}};
    PrefixAllocations alloc{{{0.0}, {p.pr}}, {0.0, 1.0}};
    return layered_expected_rate(p, plan, alloc, true, quad_nodes);
}

RateResult daf_throughput(const PowerConfig& p, int quad_nodes) {
    p.validate();
    auto r = maximize_scalar([&](double s) { return daf_throughput_objective(p, s, quad_nodes); },
                             {1e-6, 4.0, 1e-9}, 256);
    RateResult out;
    out.value_nats = std::max(r.value, 0.0);
    out.params = {{"s", r.argmax[0]}};
    out.evaluations = r.evaluations;
    out.converged = r.converged;
    out.method = "daf-exact-three-case";
    return out;
}

namespace {

constexpr double kIncrementLo = 1e-4;
constexpr double kIncrementHi = 4.0;
constexpr double kWeightHi = 20.0;

struct Layout {
    int k;
    bool xi;  // carries xi parameters

    int weights_offset() const { return k; }
    int alloc_offset() const { return k + (k - 1); }
    int xi_offset() const { return alloc_offset() + k * (k - 1) / 2; }
    int size() const { return xi_offset() + (xi ? k : 0); }
    // offset of the free weights of prefix M >= 2
    int prefix_offset(int m) const { return alloc_offset() + (m - 1) * (m - 2) / 2; }

    std::vector<Bracket> bounds() const {
        std::vector<Bracket> b(size());
        for (int i = 0; i < k; ++i) b[i] = {kIncrementLo, kIncrementHi, 1e-9};
        for (int i = k; i < xi_offset(); ++i) b[i] = {0.0, kWeightHi, 1e-9};
        for (int i = xi_offset(); i < size(); ++i) b[i] = {0.0, 1.0, 1e-9};
        return b;
    }

    std::pair<LayerPlan, PrefixAllocations> decode(const std::vector<double>& x, const PowerConfig& p) const {
        LayerPlan plan;
        double acc = 0.0;
        std::vector<double> w{1.0};
        for (int i = 0; i < k; ++i) {
            acc += x[i];
            plan.s.push_back(acc);
        }
        for (int i = 1; i < k; ++i) w.push_back(x[weights_offset() + i - 1]);
        const double wsum = std::accumulate(w.begin(), w.end(), 0.0);
        for (double wi : w) plan.gamma2.push_back(p.ps * wi / wsum);

        PrefixAllocations alloc;
        alloc.power.assign(k + 1, std::vector<double>(k, 0.0));
        alloc.xi.assign(k + 1, 1.0);
        for (int m = 1; m <= k; ++m) {
            std::vector<double> v{1.0};
            for (int i = 1; i < m; ++i) v.push_back(x[prefix_offset(m) + i - 1]);
            const double vsum = std::accumulate(v.begin(), v.end(), 0.0);
            for (int i = 0; i < m; ++i) alloc.power[m][i] = p.pr * v[i] / vsum;
        }
        if (xi)
            for (int m = 0; m < k; ++m) alloc.xi[m] = x[xi_offset() + m];
        return {plan, alloc};
    }

    // Embeds a (k-1)-layer point with a zero-power top layer.
    static std::vector<double> embed(const std::vector<double>& prev, const Layout& from) {
        const Layout to{from.k + 1, from.xi};
        std::vector<double> x(to.size(), 0.0);
        for (int i = 0; i < from.k; ++i) x[i] = prev[i];
        x[from.k] = 0.5;
        for (int i = 0; i < from.k - 1; ++i) x[to.weights_offset() + i] = prev[from.weights_offset() + i];
        x[to.weights_offset() + from.k - 1] = 0.0;
        for (int m = 2; m <= from.k; ++m)
            for (int i = 0; i < m - 1; ++i) x[to.prefix_offset(m) + i] = prev[from.prefix_offset(m) + i];
        // the new full prefix reuses the old full-prefix split
        const int top = to.k;
        for (int i = 0; i < top - 2; ++i) x[to.prefix_offset(top) + i] = prev[from.prefix_offset(from.k) + i];
        x[to.prefix_offset(top) + top - 2] = 0.0;
        if (from.xi) {
            for (int m = 0; m < from.k; ++m) x[to.xi_offset() + m] = prev[from.xi_offset() + m];
            x[to.xi_offset() + from.k] = 1.0;
        }
        return x;
    }
};

RateResult finite_result(const Layout& lay, const std::vector<double>& x, const OptimResult& r, const PowerConfig& p,
                         const std::string& method) {
    auto [plan, alloc] = lay.decode(x, p);
    RateResult out;
    out.value_nats = std::max(r.value, 0.0);
    for (int i = 0; i < lay.k; ++i) out.params.emplace_back("s" + std::to_string(i + 1), plan.s[i]);
    for (int i = 0; i < lay.k; ++i) out.params.emplace_back("g" + std::to_string(i + 1), plan.gamma2[i]);
    if (lay.xi)
        for (int m = 0; m < lay.k; ++m) out.params.emplace_back("xi" + std::to_string(m), alloc.xi[m]);
    out.plan = plan;
    out.allocations = alloc;
    out.evaluations = r.evaluations;
    out.converged = r.converged;
    out.method = method;
    return out;
}

// Parameter vector of a decode-only result laid out for the DAF search
// (every xi at 1).
std::vector<double> df_point(const RateResult& df, const Layout& lay) {
    const Layout plain{lay.k, false};
    std::vector<double> x(lay.size(), 1.0);
    const auto& plan = *df.plan;
    const auto& alloc = *df.allocations;
    double prev = 0.0;
    for (int i = 0; i < lay.k; ++i) {
        x[i] = std::clamp(plan.s[i] - prev, kIncrementLo, kIncrementHi);
        prev = plan.s[i];
    }
    for (int i = 1; i < lay.k; ++i)
        x[plain.weights_offset() + i - 1] = std::min(plan.gamma2[i] / plan.gamma2[0], kWeightHi);
    for (int m = 2; m <= lay.k; ++m)
        for (int i = 1; i < m; ++i)
            x[plain.prefix_offset(m) + i - 1] = std::min(alloc.power[m][i] / alloc.power[m][0], kWeightHi);
    return x;
}

std::vector<RateResult> ladder(bool daf, int k, const PowerConfig& p, const FiniteOptions& opt) {
    p.validate();
    if (k < 1 || k > 3) throw std::invalid_argument("finite expected rate: unsupported layer count (k must be 1..3)");
    const bool with_xi = daf && !opt.decode_only;
    Layout lay{1, with_xi};
    std::vector<double> x;
    if (daf) {
        x = {daf_throughput(p, opt.quad_nodes).param("s")};
        if (with_xi) x.push_back(0.0);
    } else {
        x = {df_throughput(p).param("s")};
    }
    x[0] = std::clamp(x[0], kIncrementLo, kIncrementHi);

    // DAF also restarts from the decode-only optimum so it never trails DF
    std::vector<RateResult> df_stages;
    if (with_xi) df_stages = ladder(false, k, p, opt);

    std::vector<RateResult> out;
    const std::string name = daf ? "daf-finite" : "df-finite";
    for (int kk = 1; kk <= k; ++kk) {
        if (kk > 1) {
            x = Layout::embed(x, lay);
            lay = Layout{kk, with_xi};
        }
        auto objective = [&](const std::vector<double>& v) {
            auto [plan, alloc] = lay.decode(v, p);
            return layered_expected_rate(p, plan, alloc, daf, opt.quad_nodes);
        };
        auto r = maximize_nd(objective, x, lay.bounds(), opt.nd);
        if (with_xi) {
            std::vector<double> y = df_stages[kk - 1].allocations ? df_point(df_stages[kk - 1], lay) : x;
            auto alt = maximize_nd(objective, y, lay.bounds(), opt.nd);
            alt.evaluations += r.evaluations;
            if (alt.value > r.value) r = alt;
            else r.evaluations = alt.evaluations;
        }
        x = r.argmax;
        out.push_back(finite_result(lay, x, r, p, name + "-k" + std::to_string(kk)));
    }
    return out;
}

}  // namespace

std::vector<RateResult> df_finite_ladder(int k, const PowerConfig& p, const FiniteOptions& opt) {
    return ladder(false, k, p, opt);
}

std::vector<RateResult> daf_finite_ladder(int k, const PowerConfig& p, const FiniteOptions& opt) {
    return ladder(true, k, p, opt);
}

RateResult df_finite_expected_rate(int k, const PowerConfig& p, const FiniteOptions& opt) {
    return df_finite_ladder(k, p, opt).back();
}

RateResult daf_finite_expected_rate(int k, const PowerConfig& p, const FiniteOptions& opt) {
    return daf_finite_ladder(k, p, opt).back();
}

}  // namespace diamondbc
