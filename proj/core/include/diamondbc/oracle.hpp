#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "diamondbc/channel.hpp"
#include "diamondbc/gains.hpp"
#include "diamondbc/schemes.hpp"

namespace diamondbc {

// Per-realization protocol simulations. Success is judged against the
// capacity of each fading block; noise is never sampled.

struct SimReport {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
    SeedSpec seed;
    std::vector<std::pair<std::string, std::size_t>> counters;

    std::size_t counter(const std::string& name) const;
};

/// Mutual information of the distributed Alamouti AF link built from the
/// explicit 2x2 channel and noise-mixing matrices. c1, c2 are the relay
/// amplification coefficients (0 for a silent relay).
double alamouti_mutual_info(const FadingSample& s, const PowerConfig& p, double c1, double c2);
/// Both relays ON with c = sqrt(P_r / (a_r P_s + 1)).
double alamouti_af_mutual_info(const FadingSample& s, const PowerConfig& p);

SimReport simulate_df_single(const PowerConfig& p, double s, std::size_t n, const SeedSpec& seed);

/// AF with ON/OFF relays: relay l forwards iff a_rl >= gate.
SimReport simulate_af(const PowerConfig& p, double s, std::size_t n, const SeedSpec& seed, double gate);
SimReport simulate_af(const PowerConfig& p, double s, std::size_t n, const SeedSpec& seed);

enum class DafMode {
    protocol,      // three cases, expected-value gate
    decode_only,   // relays never amplify
    amplify_only,  // relays never decode
    genie          // the failed relay amplifies only when that helps this block
};
SimReport simulate_daf_single(const PowerConfig& p, double s, std::size_t n, const SeedSpec& seed,
                              DafMode mode = DafMode::protocol);

SimReport simulate_layered_df(const PowerConfig& p, const LayerPlan& plan, const PrefixAllocations& alloc,
                              std::size_t n, const SeedSpec& seed);
/// Relay 1 uses xi = alloc.xi[M], relay 2 zeta = alloc.xi[N].
SimReport simulate_layered_daf(const PowerConfig& p, const LayerPlan& plan, const PrefixAllocations& alloc,
                               std::size_t n, const SeedSpec& seed);

SimReport simulate_cf(const PowerConfig& p, const CfParams& c, double s, std::size_t n, const SeedSpec& seed);

/// Decode probability of the CF inequality block by deterministic quadrature
/// over the four exponential gains.
double cf_decode_probability_quadrature(const PowerConfig& p, const CfParams& c, int panels = 64);

/// Best expected rate of a broadcast code with fixed thresholds and free
/// powers, solved exactly up to the scalar searches (pool-adjacent-violators
/// over the interference levels).
struct DiscreteBroadcast {
    double value_nats = 0.0;
    std::vector<double> thresholds;
    std::vector<double> interference;  // I_i after layer i, nonincreasing
};
DiscreteBroadcast discrete_broadcast_rate(const std::function<double(double)>& fbar, double ps, double prefactor,
                                          const std::vector<double>& thresholds);

}  // namespace diamondbc
