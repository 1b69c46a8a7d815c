#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "diamondbc/channel.hpp"
#include "diamondbc/gains.hpp"
#include "diamondbc/numerics.hpp"

namespace diamondbc {

/// K-layer broadcast code. Layer i (0-based) is decodable at a receiver with
/// gain a iff a >= s[i].
struct LayerPlan {
    std::vector<double> s;
    std::vector<double> gamma2;

    int k() const { return static_cast<int>(s.size()); }
    double total_power() const;
    /// Power of the layers above i.
    double interference(int i) const;
    /// SINR needed to decode layer i.
    double threshold(int i) const;
    double rate(int i) const;
    void validate(double ps) const;
};

/// Per-realization relay powers. Entries past a relay's decoded prefix hold
/// the amplified-layer power a_r c^2 gamma^2 when the relay amplifies.
struct RelayAllocation {
    std::vector<double> alpha2;
    std::vector<double> beta2;
    double xi = 1.0;
    double zeta = 1.0;
    double c1 = 0.0;
    double c2 = 0.0;
};

/// Power split used by a relay that decoded exactly M layers, shared by
/// both relays. power[M] has k entries summing to P_r with zeros past M;
/// xi[M] is the share of P_r spent on decoded layers (the rest amplifies).
struct PrefixAllocations {
    std::vector<std::vector<double>> power;
    std::vector<double> xi;

    int k() const { return static_cast<int>(power.size()) - 1; }
    void validate(double pr) const;
};

struct RateResult {
    double value_nats = 0.0;
    std::vector<std::pair<std::string, double>> params;
    std::optional<LayerPlan> plan;
    std::optional<PrefixAllocations> allocations;
    std::size_t evaluations = 0;
    bool converged = true;
    std::string method;

    double param(const std::string& key) const;
    std::string params_string() const;
};

struct CfParams {
    double distortion = 0.5;
    double relay_rate = 1.0;
};

/// How the AF gain CDFs are read: over all draws with the ON
/// probabilities as separate factors, or conditioned on the relays being ON.
enum class AfTables { unconditional, gated };

/// CF success: P_C times the source-layer probability (the engines), or
/// the joint event of both (what a per-realization simulation measures).
enum class CfModel { product, joint };

enum class S0Equation { standard, power_saving };

struct EngineOptions {
    std::size_t samples = 2'000'000;
    SeedSpec seed{default_master_seed(), 0};
    const TableCache* cache = nullptr;
    AfTables af_tables = AfTables::unconditional;
    /// Sample budget for the distortion search; the final evaluation uses `samples`.
    std::size_t search_samples = 200'000;
};

struct FiniteOptions {
    NdOptions nd{16, 1500, 1e-10, 1e-7};
    int quad_nodes = 12;
    /// DAF only: pin every xi at 1 (no amplification).
    bool decode_only = false;
};

// Substreams of EngineOptions::seed used for the engine tables.
inline constexpr std::uint64_t kStreamAf2 = 1;
inline constexpr std::uint64_t kStreamAf1 = 2;
inline constexpr std::uint64_t kStreamDaf = 3;
inline constexpr std::uint64_t kStreamCf = 4;

// ---- DF ----
double df_throughput_objective(const PowerConfig& p, double s);
double df_threshold_cap(const PowerConfig& p);
RateResult df_throughput(const PowerConfig& p);
RateResult df_finite_expected_rate(int k, const PowerConfig& p, const FiniteOptions& opt = {});

// ---- layered evaluator shared by DF and DAF ----
/// Probability that a1, a2 ~ iid Exp(1) satisfy c1*a1 + c2*a2 >= t for every
/// row, computed exactly.
struct HalfPlane {
    double c1, c2, t;
};
double halfplane_probability(const HalfPlane* rows, int count);

/// Expected decoded rate of (plan, allocations) with successive decoding,
/// averaged over the relay prefixes. `amplify` enables the DAF relays.
double layered_expected_rate(const PowerConfig& p, const LayerPlan& plan, const PrefixAllocations& alloc, bool amplify,
                             int quad_nodes = 12);

// ---- AF ----
struct AfTableSet {
    GainDistribution two;
    GainDistribution one;
};
AfTableSet af_tables(const PowerConfig& p, const EngineOptions& opt);
double af_throughput_objective(const PowerConfig& p, const AfTableSet& t, double s);
RateResult af_throughput(const PowerConfig& p, const EngineOptions& opt = {});
RateResult af_throughput(const PowerConfig& p, const AfTableSet& t);
GainDistribution af_mixture(const PowerConfig& p, const AfTableSet& t);
RateResult af_expected_rate(const PowerConfig& p, bool power_saving, const EngineOptions& opt = {});

// ---- continuous layering ----
/// Smallest positive root of Fbar(s) - s f(s) found on the table grid.
double continuous_upper_boundary(const GainDistribution& d);
double continuous_lower_boundary(const GainDistribution& d, double ps);
RateResult continuous_expected_rate(const GainDistribution& d, double ps, double prefactor,
                                    S0Equation eq = S0Equation::standard, double a_th = 0.0);

// ---- DAF ----
/// Exact success probability times rate of the three-case single-layer protocol.
double daf_throughput_objective(const PowerConfig& p, double s, int quad_nodes = 12);
RateResult daf_throughput(const PowerConfig& p, int quad_nodes = 12);
/// The printed three-branch throughput expression, kept as a diagnostic.
double daf_printed_objective(const PowerConfig& p, const AfTableSet& af, const GainDistribution& daf, double s);
RateResult daf_throughput_printed(const PowerConfig& p, const EngineOptions& opt = {});
RateResult daf_finite_expected_rate(int k, const PowerConfig& p, const FiniteOptions& opt = {});

/// Layer counts 1..k of one scheme, each stage warm-started from the
/// previous one so the values are nested.
std::vector<RateResult> df_finite_ladder(int k, const PowerConfig& p, const FiniteOptions& opt = {});
std::vector<RateResult> daf_finite_ladder(int k, const PowerConfig& p, const FiniteOptions& opt = {});

// ---- CF ----
/// Pr{max(...) < R_r < min(...)} estimated from n draws.
double cf_decode_probability(const PowerConfig& p, const CfParams& c, std::size_t n, const SeedSpec& seed);
/// Destination side of the decode region, Pr{R_r < min(...)}, in closed form.
double cf_destination_probability(const PowerConfig& p, double relay_rate);
/// Relay side lower limit on R_r for one realization.
double cf_relay_rate_floor(double ar1, double ar2, double distortion, double ps);

/// Relay-side draws for one distortion: sorted floors and sorted a_CF.
struct CfRelaySamples {
    double distortion = 0.0;
    std::vector<double> floor_sorted;
    std::vector<double> gain_sorted;
    std::vector<double> floor;  // unsorted, aligned with gain
    std::vector<double> gain;

    static CfRelaySamples draw(const PowerConfig& p, double distortion, std::size_t n, const SeedSpec& seed);
    double relay_probability(double relay_rate) const;
    double gain_tail(double s) const;
    double joint_tail(double relay_rate, double s) const;
};

/// max over R_r of P_C(D, R_r) with its argmax.
std::pair<double, double> cf_best_relay_rate(const PowerConfig& p, const CfRelaySamples& r);
double cf_throughput_objective(const PowerConfig& p, const CfRelaySamples& r, double s, double relay_rate,
                               CfModel model);
RateResult cf_throughput(const PowerConfig& p, const EngineOptions& opt = {});
RateResult cf_expected_rate(const PowerConfig& p, const EngineOptions& opt = {});
/// Search range for D.
Bracket cf_distortion_range(const PowerConfig& p);

}  // namespace diamondbc
