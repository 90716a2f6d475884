#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace qfhe {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seeded random stream. All stochastic operations in the library take one of
// these explicitly so that runs are reproducible and shots can be distributed
// across threads: child streams are derived by counter, never by draw order.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed)
        : seed_(seed), engine_(splitmix64(seed)) {}

    // Independent stream; same (seed, counter) always yields the same child.
    RandomStream derive(std::uint64_t counter) const {
        return RandomStream(splitmix64(seed_ ^ (counter * 0xd1342543de82ef95ULL)));
    }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    int bit() { return static_cast<int>(next_u64() >> 63); }

    // Uniform index in [0, n).
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
    }

    // Box-Muller; implemented by hand so the byte stream is the only state.
    double gaussian() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace qfhe
