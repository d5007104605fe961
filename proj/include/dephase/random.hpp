#ifndef DEPHASE_RANDOM_HPP
#define DEPHASE_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "dephase/core.hpp"

namespace dephase {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Seedable, splittable pseudo-random stream. A stream is identified by
/// (seed, path); split(k) derives an independent child stream, so trial k of
/// a Monte-Carlo loop is reproducible regardless of evaluation order.
/// Variates are produced by explicit transforms of the raw 64-bit engine
/// output, so results do not depend on the standard library's distributions.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed, std::uint64_t path = 0)
        : seed_(seed), path_(path), engine_(splitmix64(seed ^ splitmix64(path + 0x5851F42D4C957F2Dull))) {}

    RandomStream split(std::uint64_t index) const {
        return RandomStream(seed_, splitmix64(path_ * 0x9E3779B97F4A7C15ull + index + 1));
    }

    std::uint64_t seed() const { return seed_; }

    /// Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (one value per call; no caching).
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    /// Phase uniform on [0, 2 pi).
    double phase() { return 2.0 * kPi * uniform(); }

private:
    std::uint64_t seed_;
    std::uint64_t path_;
    std::mt19937_64 engine_;
};

} // namespace dephase

#endif // DEPHASE_RANDOM_HPP
