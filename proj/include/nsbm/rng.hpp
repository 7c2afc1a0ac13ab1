#pragma once

#include <cstdint>
#include <limits>

namespace nsbm {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Hashes a seed together with up to three counters into a single key.
constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                                   std::uint64_t c = 0) noexcept {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ a);
    h = mix64(h ^ (b + 0x632be59bd9b4e019ULL));
    h = mix64(h ^ (c + 0x8cb92ba72f3d8dd7ULL));
    return h;
}

/// Maps the top 53 bits of a 64-bit word onto [0, 1).
constexpr double to_unit(std::uint64_t x) noexcept {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

/// Independent random streams. Every draw in the library is a pure function
/// of (seed, stream, counters), so output never depends on evaluation order.
enum class Stream : std::uint64_t {
    adjacency = 1,
    nomination = 2,
    nsbm = 3,
    poisson = 4,
    labels = 5,
    lambda = 6,
    theta = 7,
    kmeans = 8,
    svd_start = 9,
    replication = 10,
};

constexpr std::uint64_t stream_key(std::uint64_t seed, Stream s, std::uint64_t a = 0,
                                   std::uint64_t b = 0) noexcept {
    return derive_key(seed, static_cast<std::uint64_t>(s), a, b);
}

/// Uniform draw in [0, 1) addressed by (seed, stream, a, b).
constexpr double counter_uniform(std::uint64_t seed, Stream s, std::uint64_t a,
                                 std::uint64_t b = 0) noexcept {
    return to_unit(stream_key(seed, s, a, b));
}

/// Small sequential generator (SplitMix64) satisfying UniformRandomBitGenerator,
/// for the places where a short local stream is needed (Poisson draws,
/// K-means++ seeding).
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t key) noexcept : state_(key) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    constexpr double uniform() noexcept { return to_unit((*this)()); }

private:
    std::uint64_t state_;
};

}  // namespace nsbm
