#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace cpdtv::detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Derives independent streams from one user seed (restart index, echo/motion
/// pair, ...). Chaining splitmix64 keeps the mapping deterministic and
/// platform-independent.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return splitmix64(splitmix64(splitmix64(seed) ^ (a + 1)) ^ ((b + 1) << 1));
}

/// mt19937_64 with hand-rolled output transforms. The engine's bit stream is
/// pinned by the standard; std:: distributions are not, so uniform and normal
/// draws are produced explicitly to keep outputs bit-identical everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform01(); // (0, 1]
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Circularly symmetric complex standard normal (unit total variance).
    std::complex<double> complex_normal() {
        constexpr double inv_sqrt2 = 0.70710678118654752440;
        const double re = normal();
        const double im = normal();
        return {re * inv_sqrt2, im * inv_sqrt2};
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace cpdtv::detail
