#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace satmec {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E37'79B9'7F4A'7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58'476D'1CE4'E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D0'49BB'1331'11EBull;
    return x ^ (x >> 31);
}

/// Counter-based substream seed: stream `index` of `master` is
/// splitmix64(splitmix64(master) ^ splitmix64(index)). Streams never depend
/// on the order in which they are requested.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632B'E59B'D9B4'E019ull));
}

/// Portable stream: mt19937_64 bits are fixed by the standard, and every
/// distribution below is computed here rather than by <random> so results
/// match across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1].
    double uniform_open0() { return 1.0 - uniform(); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t bits() { return engine_(); }

    std::uint64_t below(std::uint64_t n) { return engine_() % n; }

    double exponential() { return -std::log(uniform_open0()); }

    /// Standard normal, Box-Muller; the second variate is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_open0()));
        const double th = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(th);
        has_spare_ = true;
        return r * std::cos(th);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace satmec
