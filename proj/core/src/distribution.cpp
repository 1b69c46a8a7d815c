#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "diamondbc/gains.hpp"
#include "diamondbc/numerics.hpp"

namespace diamondbc {

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
    if (!(lo > 0.0 && hi > lo) || points < 2) throw std::invalid_argument("log_grid: bad range");
    std::vector<double> g(points);
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (std::size_t i = 0; i < points; ++i) g[i] = std::exp(a + (b - a) * i / (points - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

namespace {

// Fritsch-Butland derivatives of the monotone cubic through (x, y).
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> d(n, 0.0);
    if (n == 2) {
        d[0] = d[1] = (y[1] - y[0]) / (x[1] - x[0]);
        return d;
    }
    std::vector<double> h(n - 1), del(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        h[k] = x[k + 1] - x[k];
        del[k] = (y[k + 1] - y[k]) / h[k];
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (del[k - 1] * del[k] <= 0.0) continue;
        const double w1 = 2.0 * h[k] + h[k - 1];
        const double w2 = h[k] + 2.0 * h[k - 1];
        d[k] = (w1 + w2) / (w1 / del[k - 1] + w2 / del[k]);
    }
    auto edge = [](double h0, double h1, double m0, double m1) {
        double dd = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
        if (dd * m0 <= 0.0) return 0.0;
        if (m0 * m1 <= 0.0 && std::abs(dd) > std::abs(3.0 * m0)) dd = 3.0 * m0;
        return dd;
    };
    d[0] = edge(h[0], h[1], del[0], del[1]);
    d[n - 1] = edge(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
    return d;
}

struct Pchip {
    std::vector<double> x, y, d;

    Pchip(std::vector<double> xs, std::vector<double> ys) : x(std::move(xs)), y(std::move(ys)) {
        d = pchip_slopes(x, y);
    }
    // value and derivative
    std::pair<double, double> operator()(double s) const {
        if (s <= x.front()) return {y.front(), d.front()};
        if (s >= x.back()) return {y.back(), d.back()};
        const std::size_t k = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), s) - x.begin()) - 1;
        const double h = x[k + 1] - x[k];
        const double t = (s - x[k]) / h;
        const double t2 = t * t;
        const double t3 = t2 * t;
        const double v = (2 * t3 - 3 * t2 + 1) * y[k] + (t3 - 2 * t2 + t) * h * d[k] + (-2 * t3 + 3 * t2) * y[k + 1] +
                         (t3 - t2) * h * d[k + 1];
        const double dv = ((6 * t2 - 6 * t) * y[k] + (3 * t2 - 4 * t + 1) * h * d[k] + (-6 * t2 + 6 * t) * y[k + 1] +
                           (3 * t2 - 2 * t) * h * d[k + 1]) /
                          h;
        return {v, dv};
    }
};

std::vector<double> central_differences(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = i == 0 ? 0 : i - 1;
        const std::size_t b = i + 1 == n ? n - 1 : i + 1;
        d[i] = (y[b] - y[a]) / (x[b] - x[a]);
    }
    return d;
}

GainDistribution build_from_knots(std::vector<double> kx, std::vector<double> kp, const std::vector<double>& grid,
                                  TableSource source) {
    // Equal abscissae keep the largest level (right-continuous CDF).
    std::vector<double> x, p;
    for (std::size_t i = 0; i < kx.size(); ++i) {
        if (!x.empty() && kx[i] <= x.back()) {
            p.back() = std::max(p.back(), kp[i]);
            continue;
        }
        x.push_back(kx[i]);
        p.push_back(kp[i]);
    }
    if (x.size() < 2) throw NumericError("tabulation: distribution is degenerate");
    Pchip fit(x, p);

    GainDistribution d;
    d.source = source;
    d.grid = grid;
    d.cdf.resize(grid.size());
    d.pdf.resize(grid.size());
    double running = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto [v, dv] = fit(grid[i]);
        running = std::max(running, std::clamp(v, 0.0, 1.0));
        d.cdf[i] = running;
        d.pdf[i] = std::max(dv, 0.0);
    }
    d.pdf_slope = central_differences(d.grid, d.pdf);
    return d;
}

double hermite(double t, double h, double y0, double d0, double y1, double d1) {
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * d1;
}

}  // namespace

std::size_t GainDistribution::segment(double s) const {
    return static_cast<std::size_t>(std::upper_bound(grid.begin(), grid.end(), s) - grid.begin()) - 1;
}

double GainDistribution::F(double s) const {
    if (s <= 0.0) return 0.0;
    const double g0 = grid.front();
    if (s < g0) {
        const double f0 = cdf.front();
        if (f0 <= 0.0) return 0.0;
        const double k = std::clamp(g0 * pdf.front() / f0, 0.0, 10.0);
        return f0 * std::pow(s / g0, k);
    }
    if (s >= grid.back()) {
        const double tail = 1.0 - cdf.back();
        if (tail <= 0.0) return 1.0;
        const double lambda = pdf.back() / tail;
        return 1.0 - tail * std::exp(-lambda * (s - grid.back()));
    }
    const std::size_t k = segment(s);
    const double h = grid[k + 1] - grid[k];
    const double v = hermite((s - grid[k]) / h, h, cdf[k], pdf[k], cdf[k + 1], pdf[k + 1]);
    return std::clamp(v, cdf[k], cdf[k + 1]);
}

double GainDistribution::f(double s) const {
    if (s <= 0.0) return 0.0;
    const double g0 = grid.front();
    if (s < g0) {
        const double f0 = cdf.front();
        if (f0 <= 0.0) return 0.0;
        const double k = std::clamp(g0 * pdf.front() / f0, 0.0, 10.0);
        return k * F(s) / s;
    }
    if (s >= grid.back()) {
        const double tail = 1.0 - cdf.back();
        if (tail <= 0.0) return 0.0;
        const double lambda = pdf.back() / tail;
        return lambda * (1.0 - F(s));
    }
    const std::size_t k = segment(s);
    const double h = grid[k + 1] - grid[k];
    return std::max(0.0, hermite((s - grid[k]) / h, h, pdf[k], pdf_slope[k], pdf[k + 1], pdf_slope[k + 1]));
}

double GainDistribution::fprime(double s) const {
    if (s <= 0.0) return 0.0;
    const double g0 = grid.front();
    if (s < g0) {
        const double f0 = cdf.front();
        if (f0 <= 0.0) return 0.0;
        const double k = std::clamp(g0 * pdf.front() / f0, 0.0, 10.0);
        return (k - 1.0) * f(s) / s;
    }
    if (s >= grid.back()) {
        const double tail = 1.0 - cdf.back();
        if (tail <= 0.0) return 0.0;
        return -pdf.back() / tail * f(s);
    }
    const std::size_t k = segment(s);
    const double h = grid[k + 1] - grid[k];
    const double t = (s - grid[k]) / h;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * pdf[k] + (3 * t2 - 4 * t + 1) * h * pdf_slope[k] + (-6 * t2 + 6 * t) * pdf[k + 1] +
            (3 * t2 - 2 * t) * h * pdf_slope[k + 1]) /
           h;
}

void GainDistribution::validate() const {
    const std::size_t m = grid.size();
    if (m < 2 || cdf.size() != m || pdf.size() != m || pdf_slope.size() != m)
        throw std::logic_error("GainDistribution: inconsistent table sizes");
    for (std::size_t i = 0; i < m; ++i) {
        if (i > 0 && !(grid[i] > grid[i - 1])) throw std::logic_error("GainDistribution: grid not ascending");
        if (i > 0 && cdf[i] < cdf[i - 1]) throw std::logic_error("GainDistribution: CDF decreases");
        if (!(cdf[i] >= 0.0 && cdf[i] <= 1.0)) throw std::logic_error("GainDistribution: CDF outside [0, 1]");
        if (!(pdf[i] >= 0.0)) throw std::logic_error("GainDistribution: negative PDF");
    }
    if (cdf.back() < 0.999) throw std::logic_error("GainDistribution: CDF does not reach 0.999");
    double mass = 0.0;
    for (std::size_t i = 1; i < m; ++i) mass += 0.5 * (pdf[i] + pdf[i - 1]) * (grid[i] - grid[i - 1]);
    if (std::abs(mass - (cdf.back() - cdf.front())) > 1e-3)
        throw std::logic_error("GainDistribution: PDF does not integrate to the CDF increment");
}

GainDistribution GainDistribution::from_functions(const std::vector<double>& grid,
                                                  const std::function<double(double)>& cdf_fn,
                                                  const std::function<double(double)>& pdf_fn,
                                                  const std::function<double(double)>& slope_fn) {
    GainDistribution d;
    d.source = TableSource::exact;
    d.grid = grid;
    for (double s : grid) {
        d.cdf.push_back(cdf_fn(s));
        d.pdf.push_back(pdf_fn(s));
        d.pdf_slope.push_back(slope_fn(s));
    }
    return d;
}

GainDistribution GainDistribution::from_samples(std::vector<double> values, std::size_t grid_points) {
    std::erase_if(values, [](double v) { return std::isnan(v); });
    const std::size_t m = values.size();
    if (m < 1000) throw std::invalid_argument("tabulation: too few admissible samples");
    std::sort(values.begin(), values.end());
    if (values.front() < 0.0) throw std::domain_error("tabulation: gains must be nonnegative");

    auto quantile = [&](double p) {
        const double h = p * static_cast<double>(m - 1);
        const std::size_t lo = static_cast<std::size_t>(h);
        const std::size_t hi = std::min(lo + 1, m - 1);
        return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
    };

    std::vector<double> levels{1e-4, 2e-4, 5e-4, 1e-3, 2e-3, 5e-3};
    for (int i = 1; i <= 99; ++i) levels.push_back(i / 100.0);
    for (double p : {0.995, 0.998, 0.999, 0.9995, 0.9999}) levels.push_back(p);
    const double min_tail = 20.0 / static_cast<double>(m);

    std::vector<double> kx{0.0}, kp{0.0};
    for (double p : levels) {
        if (p < min_tail || 1.0 - p < min_tail) continue;
        kx.push_back(quantile(p));
        kp.push_back(p);
    }
    const double top = kx.back();
    if (!(top > 0.0)) throw NumericError("tabulation: distribution is concentrated at zero");
    const double lo = std::min(1e-4, top * 1e-3);
    return build_from_knots(std::move(kx), std::move(kp), log_grid(lo, top, grid_points), TableSource::monte_carlo);
}

GainDistribution GainDistribution::mixture(const std::vector<const GainDistribution*>& parts,
                                           const std::vector<double>& weights, std::size_t grid_points) {
    if (parts.empty() || parts.size() != weights.size()) throw std::invalid_argument("mixture: size mismatch");
    double lo = parts.front()->grid.front();
    double hi = parts.front()->grid.back();
    double total = 0.0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        lo = std::min(lo, parts[i]->grid.front());
        hi = std::max(hi, parts[i]->grid.back());
        if (weights[i] < 0.0) throw std::invalid_argument("mixture: negative weight");
        total += weights[i];
    }
    if (!(total > 0.0)) throw std::invalid_argument("mixture: weights sum to zero");
    GainDistribution d;
    d.source = parts.front()->source;
    d.grid = log_grid(lo, hi, grid_points);
    d.cdf.assign(grid_points, 0.0);
    d.pdf.assign(grid_points, 0.0);
    d.pdf_slope.assign(grid_points, 0.0);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const double w = weights[i] / total;
        for (std::size_t j = 0; j < grid_points; ++j) {
            const double s = d.grid[j];
            d.cdf[j] += w * parts[i]->F(s);
            d.pdf[j] += w * parts[i]->f(s);
            d.pdf_slope[j] += w * parts[i]->fprime(s);
        }
    }
    for (std::size_t j = 1; j < grid_points; ++j) d.cdf[j] = std::max(d.cdf[j], d.cdf[j - 1]);
    return d;
}

namespace {

GainDistribution tabulate_quadrature(const GainFunction& gain, const PowerConfig& p, std::size_t grid_points) {
    auto g = [&](double ar, double a) {
        FadingSample s;
        s.ar1 = ar;
        s.a1 = a;
        s.hr1 = {std::sqrt(ar), 0.0};
        s.h1 = {std::sqrt(a), 0.0};
        return gain(s);
    };
    constexpr double a_max = 60.0;
    auto cdf = [&](double s) {
        auto inner = [&](double ar) {
            // Pr{gain(ar, a) <= s} over a ~ Exp(1), gain nondecreasing in a
            if (g(ar, a_max) <= s) return std::exp(-ar);
            if (g(ar, 0.0) > s) return 0.0;
            const double root = find_root([&](double a) { return g(ar, a) - s; }, {0.0, a_max, 1e-13});
            return std::exp(-ar) * (1.0 - std::exp(-root));
        };
        const double split = std::min(s, 40.0);
        return integrate(inner, 0.0, split, 1e-11) + integrate(inner, split, 60.0, 1e-11);
    };
    const double top = find_root([&](double s) { return cdf(s) - 0.9999; }, {1e-6, 200.0, 1e-10});
    const double lo = std::min(1e-4, top * 1e-3);
    auto grid = log_grid(lo, top, grid_points);
    std::vector<double> kx{0.0}, kp{0.0};
    for (double s : grid) {
        kx.push_back(s);
        kp.push_back(cdf(s));
    }
    (void)p;
    return build_from_knots(std::move(kx), std::move(kp), grid, TableSource::quadrature);
}

}  // namespace

GainDistribution tabulate_distribution(const GainFunction& gain, const PowerConfig& p, TableSource method,
                                       std::size_t n, const SeedSpec& seed) {
    p.validate();
    if (method == TableSource::quadrature) {
        if (n < 512) throw std::invalid_argument("tabulate_distribution: quadrature grid below 512 points");
        return tabulate_quadrature(gain, p, n);
    }
    if (method != TableSource::monte_carlo) throw std::invalid_argument("tabulate_distribution: unsupported method");
    if (n < kMinTabulationSamples) throw std::invalid_argument("tabulate_distribution: insufficient samples");
    std::vector<double> values(n);
    parallel_chunks(n, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) values[i] = gain(fading_at(seed, i));
    });
    return GainDistribution::from_samples(std::move(values));
}

namespace {

constexpr std::array<char, 8> kMagic{'D', 'B', 'C', 'G', 'T', 'A', 'B', '\0'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u64(std::ostream& os, std::uint64_t v) {
    std::array<char, 8> b;
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    os.write(b.data(), 8);
}

std::uint64_t get_u64(std::istream& is) {
    std::array<unsigned char, 8> b{};
    is.read(reinterpret_cast<char*>(b.data()), 8);
    if (!is) throw std::runtime_error("table cache: truncated file");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{b[i]} << (8 * i);
    return v;
}

std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

}  // namespace

void write_distribution(std::ostream& os, const GainDistribution& d) {
    os.write(kMagic.data(), kMagic.size());
    put_u64(os, (std::uint64_t{kFormatVersion} << 32) | static_cast<std::uint8_t>(d.source));
    put_u64(os, d.grid.size());
    for (const auto* arr : {&d.grid, &d.cdf, &d.pdf, &d.pdf_slope})
        for (double v : *arr) put_u64(os, std::bit_cast<std::uint64_t>(v));
}

GainDistribution read_distribution(std::istream& is) {
    std::array<char, 8> magic{};
    is.read(magic.data(), magic.size());
    if (!is || magic != kMagic) throw std::runtime_error("table cache: bad magic");
    const std::uint64_t word = get_u64(is);
    if ((word >> 32) != kFormatVersion) throw std::runtime_error("table cache: unsupported version");
    GainDistribution d;
    d.source = static_cast<TableSource>(word & 0xFF);
    const std::uint64_t m = get_u64(is);
    if (m < 2 || m > (1u << 24)) throw std::runtime_error("table cache: bad length");
    for (auto* arr : {&d.grid, &d.cdf, &d.pdf, &d.pdf_slope}) {
        arr->resize(m);
        for (auto& v : *arr) v = std::bit_cast<double>(get_u64(is));
    }
    return d;
}

TableCache::TableCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::filesystem::path TableCache::path_for(const std::string& tag, const PowerConfig& p, std::size_t n,
                                           const SeedSpec& seed) const {
    std::string clean;
    for (char c : tag) clean += (std::isalnum(static_cast<unsigned char>(c)) || c == '-') ? c : '_';
    std::ostringstream name;
    name << clean << '_' << hex64(std::bit_cast<std::uint64_t>(p.ps)) << '_'
         << hex64(std::bit_cast<std::uint64_t>(p.pr)) << "_n" << n << '_' << hex64(seed.master_seed) << '_'
         << hex64(seed.stream_index) << ".gdt";
    return dir_ / name.str();
}

std::optional<GainDistribution> TableCache::load(const std::string& tag, const PowerConfig& p, std::size_t n,
                                                 const SeedSpec& seed) const {
    std::ifstream in(path_for(tag, p, n, seed), std::ios::binary);
    if (!in) return std::nullopt;
    try {
        return read_distribution(in);
    } catch (const std::runtime_error&) {
        return std::nullopt;
    }
}

void TableCache::store(const std::string& tag, const PowerConfig& p, std::size_t n, const SeedSpec& seed,
                       const GainDistribution& d) const {
    const auto target = path_for(tag, p, n, seed);
    auto tmp = target;
    tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("table cache: cannot write " + tmp.string());
        write_distribution(out, d);
    }
    std::filesystem::rename(tmp, target);
}

GainDistribution cached_tabulation(const TableCache* cache, const std::string& tag, const GainFunction& gain,
                                   const PowerConfig& p, std::size_t n, const SeedSpec& seed) {
    if (cache != nullptr)
        if (auto hit = cache->load(tag, p, n, seed)) return *hit;
    auto d = tabulate_distribution(gain, p, TableSource::monte_carlo, n, seed);
    if (cache != nullptr) cache->store(tag, p, n, seed, d);
    return d;
}

}  // namespace diamondbc
