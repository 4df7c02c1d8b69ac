#pragma once

#include <cstdint>
#include <random>

namespace lexnet {

namespace detail {
__extension__ typedef unsigned __int128 uint128;
}  // namespace detail

/// Seedable generator used for every random decision in the library.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The standard <random> distributions are implementation-defined,
/// so the range reductions below are done by hand; results are therefore
/// identical across compilers and standard libraries for a given seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Derives an independent stream, e.g. one per worker thread.
    static Rng derive(std::uint64_t seed, std::uint64_t stream) {
        // splitmix64 finaliser over (seed, stream)
        std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return Rng(z ^ (z >> 31));
    }

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t uniform_index(std::uint64_t n) {
        // Lemire's nearly-divisionless method, unbiased.
        detail::uint128 m = static_cast<detail::uint128>(next()) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                m = static_cast<detail::uint128>(next()) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace lexnet
