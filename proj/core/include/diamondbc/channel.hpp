#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace diamondbc {

struct PowerConfig {
    double ps = 1.0;  // source power, linear
    double pr = 1.0;  // per-relay power, linear

    static PowerConfig from_db(double ps_db, double pr_db);
    void validate() const;
    double ratio() const { return ps / pr; }
};

struct ComplexGain {
    double re = 0.0;
    double im = 0.0;
    double norm2() const { return re * re + im * im; }
};

struct FadingSample {
    ComplexGain h1, h2, hr1, hr2;
    double a1 = 0.0, a2 = 0.0, ar1 = 0.0, ar2 = 0.0;

    static FadingSample from_gains(ComplexGain h1, ComplexGain h2, ComplexGain hr1, ComplexGain hr2);
};

inline constexpr std::uint64_t kDefaultSeed = 0x5EED;

struct SeedSpec {
    std::uint64_t master_seed = kDefaultSeed;
    std::uint64_t stream_index = 0;

    SeedSpec with_stream(std::uint64_t s) const { return {master_seed, s}; }
};

/// kDefaultSeed unless DIAMONDBC_SEED holds a decimal or 0x-hex value.
std::uint64_t default_master_seed();
std::uint64_t parse_seed(const char* text);

double db_to_linear(double x_db);
double linear_to_db(double x);

/// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key);

/// Realization `index` of the stream; independent of how the caller chunks
/// or schedules the work.
FadingSample fading_at(const SeedSpec& seed, std::uint64_t index);

std::vector<FadingSample> sample_fading(const SeedSpec& seed, std::size_t n);

/// Worker threads used by chunked reductions. Results never depend on it.
void set_worker_threads(unsigned n);
unsigned worker_threads();

inline constexpr std::size_t kChunkSize = 1 << 14;

/// Calls body(chunk_index, begin, end) for fixed-size chunks of [0, n),
/// spread across worker_threads(). Callers write into per-chunk slots and
/// merge them in index order.
void for_each_chunk(std::size_t n, const void* ctx,
                    void (*body)(const void* ctx, std::size_t chunk, std::size_t begin, std::size_t end));

template <class F>
void parallel_chunks(std::size_t n, const F& f) {
    for_each_chunk(n, &f, [](const void* c, std::size_t chunk, std::size_t b, std::size_t e) {
        (*static_cast<const F*>(c))(chunk, b, e);
    });
}

inline std::size_t chunk_count(std::size_t n) { return (n + kChunkSize - 1) / kChunkSize; }

}  // namespace diamondbc
