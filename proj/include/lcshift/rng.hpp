#pragma once

#include <cmath>
#include <cstdint>

namespace lcshift::rng {

// SplitMix64: a counter-based 64-bit generator. The state advances by a
// fixed odd increment and the output is a bijective finalizer of the
// counter, so any draw can be produced independently of the others.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// Substream derivation: fold an index into a seed through the same
// finalizer,  h' = mix64(h ^ (mix64(v + 1) + GOLDEN + (h << 6) + (h >> 2))).
// Folding scheme index, size index and replication index in turn gives every
// worker an independently computable stream.
inline std::uint64_t fold(std::uint64_t h, std::uint64_t v) {
    return mix64(h ^ (mix64(v + 1) + kGolden + (h << 6) + (h >> 2)));
}

class Stream {
public:
    explicit Stream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t bits() {
        state_ += kGolden;
        return mix64(state_);
    }

    // Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(bits() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard Gaussian via Box-Muller; the sine partner is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

inline Stream substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                        std::uint64_t c) {
    return Stream(fold(fold(fold(seed, a), b), c));
}

} // namespace lcshift::rng
