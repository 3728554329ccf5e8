#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace grabucb {

/// Seeded random stream. Wraps a fixed 64-bit Mersenne engine and keeps
/// the Gaussian and integer draws under our control so that a given seed
/// reproduces the exact same sequence on every run.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). n must be positive.
    int uniform_int(int n) {
        // rejection sampling keeps the draw exactly uniform
        const std::uint64_t un = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return static_cast<int>(x % un);
    }

    /// Standard normal via Box-Muller; the spare deviate is cached.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Derives a child seed for a named purpose ("graph", "noise", ...) so that
/// separate concerns consume independent streams of the same master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view purpose) {
    // FNV-1a over the tag, then a splitmix64 finalizer round
    std::uint64_t h = 14695981039346656037ull;
    for (char c : purpose) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    std::uint64_t z = master ^ h;
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline Rng derive_stream(std::uint64_t master, std::string_view purpose) {
    return Rng(derive_seed(master, purpose));
}

} // namespace grabucb
