#include "diamondbc/channel.hpp"

#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>

namespace diamondbc {

PowerConfig PowerConfig::from_db(double ps_db, double pr_db) {
    PowerConfig p{db_to_linear(ps_db), db_to_linear(pr_db)};
    p.validate();
    return p;
}

void PowerConfig::validate() const {
    if (!(ps > 0.0 && std::isfinite(ps)) || !(pr > 0.0 && std::isfinite(pr)))
        throw std::invalid_argument("PowerConfig: powers must be positive and finite");
}

FadingSample FadingSample::from_gains(ComplexGain h1, ComplexGain h2, ComplexGain hr1, ComplexGain hr2) {
    FadingSample s;
    s.h1 = h1;
    s.h2 = h2;
    s.hr1 = hr1;
    s.hr2 = hr2;
    s.a1 = h1.norm2();
    s.a2 = h2.norm2();
    s.ar1 = hr1.norm2();
    s.ar2 = hr2.norm2();
    return s;
}

std::uint64_t parse_seed(const char* text) {
    if (text == nullptr || *text == '\0') throw std::invalid_argument("seed: empty value");
    int base = 10;
    const char* digits = text;
    if (text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
        base = 16;
        digits = text + 2;
    }
    if (*digits == '\0' || *digits == '-' || *digits == '+')
        throw std::invalid_argument(std::string("seed: cannot parse '") + text + "'");
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(digits, &end, base);
    if (errno != 0 || end == digits || *end != '\0')
        throw std::invalid_argument(std::string("seed: cannot parse '") + text + "'");
    return static_cast<std::uint64_t>(v);
}

std::uint64_t default_master_seed() {
    const char* env = std::getenv("DIAMONDBC_SEED");
    if (env == nullptr || *env == '\0') return kDefaultSeed;
    return parse_seed(env);
}

double db_to_linear(double x_db) {
    if (!std::isfinite(x_db)) throw std::domain_error("db_to_linear: non-finite input");
    return std::pow(10.0, x_db / 10.0);
}

double linear_to_db(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) throw std::domain_error("linear_to_db: input must be positive");
    return 10.0 * std::log10(x);
}

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
    constexpr std::uint64_t m0 = 0xD2511F53u;
    constexpr std::uint64_t m1 = 0xCD9E8D57u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = m0 * c[0];
        const std::uint64_t p1 = m1 * c[2];
        c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
        k[0] += 0x9E3779B9u;
        k[1] += 0xBB67AE85u;
    }
    return c;
}

namespace {

ComplexGain gaussian(const SeedSpec& seed, std::uint64_t index, std::uint32_t link) {
    const std::array<std::uint32_t, 4> ctr{static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                                           link, static_cast<std::uint32_t>(seed.stream_index)};
    const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(seed.master_seed),
                                           static_cast<std::uint32_t>(seed.master_seed >> 32) ^
                                               static_cast<std::uint32_t>(seed.stream_index >> 32)};
    const auto w = philox4x32(ctr, key);
    const std::uint64_t x = (std::uint64_t{w[0]} << 32) | w[1];
    const std::uint64_t y = (std::uint64_t{w[2]} << 32) | w[3];
    const double u1 = (static_cast<double>(x >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = static_cast<double>(y >> 11) * 0x1.0p-53;          // [0, 1)
    const double r = std::sqrt(-std::log(u1));
    const double phase = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(phase), r * std::sin(phase)};
}

}  // namespace

FadingSample fading_at(const SeedSpec& seed, std::uint64_t index) {
    return FadingSample::from_gains(gaussian(seed, index, 0), gaussian(seed, index, 1), gaussian(seed, index, 2),
                                    gaussian(seed, index, 3));
}

std::vector<FadingSample> sample_fading(const SeedSpec& seed, std::size_t n) {
    if (n < 1) throw std::invalid_argument("sample_fading: n must be >= 1");
    std::vector<FadingSample> out(n);
    parallel_chunks(n, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) out[i] = fading_at(seed, i);
    });
    return out;
}

namespace {
std::atomic<unsigned> g_workers{0};
}

void set_worker_threads(unsigned n) { g_workers.store(n); }

unsigned worker_threads() {
    const unsigned n = g_workers.load();
    if (n != 0) return n;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void for_each_chunk(std::size_t n, const void* ctx,
                    void (*body)(const void*, std::size_t, std::size_t, std::size_t)) {
    const std::size_t chunks = chunk_count(n);
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_threads(), chunks));
    auto run = [&](std::size_t c) { body(ctx, c, c * kChunkSize, std::min(n, (c + 1) * kChunkSize)); };
    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) run(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= chunks) return;
            try {
                run(c);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace diamondbc
