#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "diamondbc/channel.hpp"

namespace diamondbc {

double gain_af2(const FadingSample& s, const PowerConfig& p);
double gain_af1(double ar, double a, const PowerConfig& p);
/// Relay 1 decoded and forwards at full power, relay 2 amplifies.
double gain_daf(const FadingSample& s, const PowerConfig& p);

/// ON/OFF backward-gain threshold of the AF relays.
double af_on_threshold(const PowerConfig& p);

struct QuantizerParams {
    double distortion = 0.5;
    double theta1 = 0.5;
    double theta2 = 0.5;

    static QuantizerParams make(double distortion, double ar1, double ar2, double ps);
};

double quantizer_theta(double distortion, double ar, double ps);

double gain_cf(double ar1, double ar2, const QuantizerParams& q, double ps);

/// gain_cf with each theta clamped at zero, so a relay whose quantizer
/// swamps its observation contributes nothing instead of raising.
double gain_cf_clamped(double ar1, double ar2, double distortion, double ps);

enum class TableSource : std::uint8_t { quadrature = 0, monte_carlo = 1, exact = 2 };

const char* to_string(TableSource s);

/// CDF, PDF and PDF slope of a nonnegative scalar gain on an ascending grid.
/// Between nodes F is a cubic Hermite in (F, f) and f a cubic Hermite in
/// (f, f'); beyond the last node the tail is exponential with the hazard
/// at the last node.
class GainDistribution {
public:
    std::vector<double> grid;
    std::vector<double> cdf;
    std::vector<double> pdf;
    std::vector<double> pdf_slope;
    TableSource source = TableSource::monte_carlo;

    double F(double s) const;
    double Fbar(double s) const { return 1.0 - F(s); }
    double f(double s) const;
    double fprime(double s) const;

    /// Throws std::logic_error describing the first violated invariant.
    void validate() const;

    /// Tabulates known functions on `grid`.
    static GainDistribution from_functions(const std::vector<double>& grid, const std::function<double(double)>& cdf,
                                           const std::function<double(double)>& pdf,
                                           const std::function<double(double)>& pdf_slope);

    /// Monotone smoothing of an empirical sample: PCHIP through quantile
    /// knots, differentiated for f, central differences for f'. NaN entries
    /// are treated as excluded draws.
    static GainDistribution from_samples(std::vector<double> values, std::size_t grid_points = 2048);

    /// Convex combination of distributions, tabulated on a common grid.
    static GainDistribution mixture(const std::vector<const GainDistribution*>& parts,
                                    const std::vector<double>& weights, std::size_t grid_points = 2048);

private:
    std::size_t segment(double s) const;
};

std::vector<double> log_grid(double lo, double hi, std::size_t points);

using GainFunction = std::function<double(const FadingSample&)>;

/// Monte Carlo: n draws from `seed`, gain may return NaN to exclude a draw.
/// Quadrature: integrates over the joint density of (a_r1, a_1) with the
/// other links at zero; the gain must be nondecreasing in a_1.
GainDistribution tabulate_distribution(const GainFunction& gain, const PowerConfig& p, TableSource method,
                                       std::size_t n, const SeedSpec& seed);

inline constexpr std::size_t kMinTabulationSamples = 100000;

/// On-disk table cache keyed by (scheme tag, P_s, P_r, n, seed).
class TableCache {
public:
    explicit TableCache(std::filesystem::path dir);

    std::optional<GainDistribution> load(const std::string& tag, const PowerConfig& p, std::size_t n,
                                         const SeedSpec& seed) const;
    void store(const std::string& tag, const PowerConfig& p, std::size_t n, const SeedSpec& seed,
               const GainDistribution& d) const;

    std::filesystem::path path_for(const std::string& tag, const PowerConfig& p, std::size_t n,
                                   const SeedSpec& seed) const;

private:
    std::filesystem::path dir_;
};

void write_distribution(std::ostream& os, const GainDistribution& d);
GainDistribution read_distribution(std::istream& is);

/// Loads from the cache when possible, otherwise tabulates and stores.
GainDistribution cached_tabulation(const TableCache* cache, const std::string& tag, const GainFunction& gain,
                                   const PowerConfig& p, std::size_t n, const SeedSpec& seed);

}  // namespace diamondbc
